"""Semicircular Klaus-Shaw potential families.

A family is an immutable descriptor.  Four of the five kinds (semicircle,
hirota, lpd, polynomial) have polynomial phase and tail integrals

    Phi(lambda) = Phi0 (1 + lambda^2/A^2) (1 + sum_k B_k lambda^(2k)),
    Xi(lambda)  = i sum_q Xi_q lambda^(2q-1),

so they share one code path; the named kinds only differ in how
(Phi0, B_k, Xi_q) follow from the physical parameters.  The interpolation
kind has a linear density rho(s) = a + b s and Xi = 0.

Formulas are written against a small numeric "kit" so the same expression
can be evaluated in double precision or in ball arithmetic (python-flint
``arb``) at whatever precision the residue solver needs.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from math import comb

import numpy as np
from scipy.optimize import brentq

from .quadrature import gauss_legendre

KINDS = ("semicircle", "hirota", "lpd", "polynomial", "interpolation")


class FamilyError(ValueError):
    """Invalid family parameters or an argument outside the domain."""


class _FloatKit:
    conv = staticmethod(float)
    pi = math.pi

    @staticmethod
    def sqrt(v):
        return math.sqrt(v)


class _ArbKit:
    def __init__(self):
        from flint import arb
        self.conv = arb
        self.pi = arb.pi()

    @staticmethod
    def sqrt(v):
        return v.sqrt()


FLOAT = _FloatKit()


def arb_kit():
    """Kit evaluating in python-flint balls at the current ``ctx.prec``."""
    return _ArbKit()


@dataclass(frozen=True)
class SpectralIntegrals:
    """Coefficients of Phi(l) = sum Phi_p l^(2p) and Xi(l) = i sum Xi_q l^(2q-1)."""
    phi: tuple
    xi: tuple

    @property
    def P(self) -> int:
        return len(self.phi) - 1

    @property
    def Q(self) -> int:
        return len(self.xi)

    @property
    def M(self) -> int:
        return max(2 * self.P, 2 * self.Q - 1)


@dataclass(frozen=True)
class PotentialFamily:
    """Descriptor of a semicircular Klaus-Shaw potential.

    ``xi``, ``gamma`` and ``delta`` are the hirota, lpd and interpolation
    parameters; ``phi0``, ``B`` and ``Xi`` (the latter holding Xi_1, Xi_2, ...)
    describe a general polynomial family.  Use the ``make_*`` constructors
    rather than building this directly.
    """
    kind: str
    A_max: float
    X_minus: float
    X_plus: float
    x0: float
    xi: float = 0.0
    gamma: float = 0.0
    delta: float = 0.0
    phi0: float | None = None
    B: tuple = ()
    Xi: tuple = ()
    tol: float = 1e-12

    def __post_init__(self):
        if self.kind not in KINDS:
            raise FamilyError(f"unknown kind {self.kind!r}")
        if not self.A_max > 0:
            raise FamilyError("A_max must be positive")
        if not self.X_minus < self.x0 < self.X_plus:
            raise FamilyError("need X_minus < x0 < X_plus")
        if self.kind == "hirota" and not -1 < self.xi < 1:
            raise FamilyError("hirota requires xi in (-1, 1)")
        if self.kind == "lpd" and not -0.5 < self.gamma < 1:
            raise FamilyError("lpd requires gamma in (-1/2, 1)")
        if self.kind == "interpolation" and not 0 <= self.delta <= 1:
            raise FamilyError("interpolation requires delta in [0, 1]")

    @property
    def width(self) -> float:
        return self.X_plus - self.X_minus

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.X_plus + self.X_minus)

    @property
    def is_polynomial(self) -> bool:
        return self.kind != "interpolation"

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "A_max": self.A_max, "X_minus": self.X_minus,
             "X_plus": self.X_plus, "tol": self.tol}
        if self.kind == "hirota":
            d["xi"] = self.xi
        elif self.kind == "lpd":
            d["gamma"] = self.gamma
        elif self.kind == "interpolation":
            d = {"kind": self.kind, "delta": self.delta, "tol": self.tol}
        elif self.kind == "polynomial":
            d = {"kind": self.kind, "Phi0": self.phi0, "A_max": self.A_max,
                 "B": list(self.B), "Xi": list(self.Xi), "tol": self.tol}
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


# ---------------------------------------------------------------- constructors

def make_semicircle(A_max: float = 1.0, X_minus: float = -0.5, X_plus: float = 0.5,
                    tol: float = 1e-12) -> PotentialFamily:
    """A(x) = A_max sqrt(1 - y^2) with y the support coordinate mapped to [-1, 1]."""
    if not X_minus < X_plus:
        raise FamilyError("need X_minus < X_plus")
    return PotentialFamily("semicircle", float(A_max), float(X_minus), float(X_plus),
                           0.5 * (X_minus + X_plus), tol=tol)


def make_hirota(A_max: float, X_minus: float, X_plus: float, xi: float,
                tol: float = 1e-12) -> PotentialFamily:
    """Family with quadratic Phi and cubic Xi; xi in (-1, 1) skews the profile."""
    if not -1 < xi < 1:
        raise FamilyError("hirota requires xi in (-1, 1)")
    if not X_minus < X_plus:
        raise FamilyError("need X_minus < X_plus")
    x0 = 0.5 * (X_minus + X_plus) + 0.25 * (X_plus - X_minus) * xi
    return PotentialFamily("hirota", float(A_max), float(X_minus), float(X_plus), x0,
                           xi=float(xi), tol=tol)


def make_lpd(A_max: float, X_minus: float, X_plus: float, gamma: float,
             tol: float = 1e-12) -> PotentialFamily:
    """Even family with quartic Phi; amplitude defined implicitly through gamma."""
    if not -0.5 < gamma < 1:
        raise FamilyError("lpd requires gamma in (-1/2, 1)")
    if not X_minus < X_plus:
        raise FamilyError("need X_minus < X_plus")
    return PotentialFamily("lpd", float(A_max), float(X_minus), float(X_plus),
                           0.5 * (X_minus + X_plus), gamma=float(gamma), tol=tol)


def interpolation_coefficients(delta: float, kit=FLOAT):
    """Return (m, a, b) with m = A_max(delta) and rho(s) = a + b s."""
    d = kit.conv(delta)
    m = 1 - d / 2
    a = 1 / (2 * m) - m * m + m / 2
    return m, a, 1 - d


def make_interpolation(delta: float, tol: float = 1e-12) -> PotentialFamily:
    """Even family joining a unit semicircle (delta=0) to sech(x)/2 (delta=1).

    For delta > 0 the density has a constant part, the branches grow
    logarithmically as s -> 0 and the support is the whole line.
    """
    if not 0 <= delta <= 1:
        raise FamilyError("interpolation requires delta in [0, 1]")
    m = 1 - delta / 2
    edge = 1.0 if delta == 0 else math.inf
    return PotentialFamily("interpolation", m, -edge, edge, 0.0, delta=float(delta), tol=tol)


def polynomial_family(Phi0: float, A_max: float, B=(), Xi1: float = 0.0, Xi=(),
                      tol: float = 1e-12, validate: bool = True) -> PotentialFamily:
    """Family with prescribed polynomial phase and tail integrals.

    ``B`` holds B_1..B_{P-1} and ``Xi`` holds Xi_2..Xi_Q.  Support endpoints
    and the maximizer follow from the branch formula; with ``validate`` the
    branches are sampled to confirm x_- increases and x_+ decreases.
    """
    if not Phi0 > 0 or not A_max > 0:
        raise FamilyError("Phi0 and A_max must be positive")
    B = tuple(float(b) for b in B)
    xis = (float(Xi1),) + tuple(float(q) for q in Xi)
    xm, xp = _poly_branches(A_max, Phi0, B, xis, 0.0, FLOAT)
    x0 = _poly_branches(A_max, Phi0, B, xis, A_max, FLOAT)[0]
    if not xm < x0 < xp:
        raise FamilyError("coefficients do not define a single-hump potential")
    fam = PotentialFamily("polynomial", float(A_max), xm, xp, x0, phi0=float(Phi0), B=B,
                          Xi=xis, tol=tol)
    if validate:
        s = np.linspace(0.0, A_max, 401)[1:-1]
        lo, hi = inverse_branches(fam, s)
        if np.any(np.diff(lo) <= 0) or np.any(np.diff(hi) >= 0) or np.any(hi <= lo):
            raise FamilyError("branch monotonicity fails: coefficients outside the admissible set")
    return fam


def family_from_dict(d: dict) -> PotentialFamily:
    """Inverse of :meth:`PotentialFamily.to_dict`."""
    kind = d.get("kind")
    tol = d.get("tol", 1e-12)
    try:
        if kind == "semicircle":
            return make_semicircle(d.get("A_max", 1.0), d.get("X_minus", -0.5),
                                   d.get("X_plus", 0.5), tol=tol)
        if kind == "hirota":
            return make_hirota(d["A_max"], d["X_minus"], d["X_plus"], d["xi"], tol=tol)
        if kind == "lpd":
            return make_lpd(d["A_max"], d["X_minus"], d["X_plus"], d["gamma"], tol=tol)
        if kind == "interpolation":
            return make_interpolation(d["delta"], tol=tol)
        if kind == "polynomial":
            xis = list(d.get("Xi", [0.0]))
            return polynomial_family(d["Phi0"], d["A_max"], d.get("B", ()),
                                     xis[0] if xis else 0.0, xis[1:], tol=tol)
    except KeyError as exc:
        raise FamilyError(f"missing field {exc.args[0]!r} for kind {kind!r}") from None
    raise FamilyError(f"unknown kind {kind!r}")


# ---------------------------------------------------------- polynomial machinery

def _poly_params(fam: PotentialFamily, kit=FLOAT):
    """(A, Phi0, (B_1, ...), (Xi_1, Xi_2, ...)) in the kit's number type."""
    c = kit.conv
    A = c(fam.A_max)
    if fam.kind == "polynomial":
        return A, c(fam.phi0), tuple(c(b) for b in fam.B), tuple(c(q) for q in fam.Xi)
    L = c(fam.X_plus) - c(fam.X_minus)
    S = c(fam.X_plus) + c(fam.X_minus)
    if fam.kind in ("semicircle", "hirota"):
        phi0 = kit.pi * L * A / 4
        B = ()
    elif fam.kind == "lpd":
        g = c(fam.gamma)
        phi0 = (4 - g) * kit.pi * L * A / 16
        B = (3 * g / (4 - g) / (A * A),)
    else:
        raise FamilyError("interpolation family has no polynomial phase")
    xis = (-S,)
    if fam.kind == "hirota":
        xis = (-S, L * c(fam.xi) / (3 * A * A))
    return A, phi0, B, xis


def spectral_integrals(fam: PotentialFamily, kit=FLOAT) -> SpectralIntegrals:
    """Series coefficients of Phi and Xi for the polynomial kinds."""
    A, phi0, B, xis = _poly_params(fam, kit)
    base = [kit.conv(1)] + list(B)
    phi = [kit.conv(0)] * (len(base) + 1)
    for k, bk in enumerate(base):
        phi[k] = phi[k] + phi0 * bk
        phi[k + 1] = phi[k + 1] + phi0 * bk / (A * A)
    return SpectralIntegrals(tuple(phi), tuple(xis))


def _J(j, u, A2):
    """Integral over z in [0,1] of (u + (A2 - u) z^2)^j, expanded exactly."""
    return sum(comb(j, i) * u ** (j - i) * (A2 - u) ** i / (2 * i + 1) for i in range(j + 1))


def _P(k, u, A2):
    return (k + 1) * _J(k, u, A2) - A2 * k * _J(k - 1, u, A2)


def _double_factorial_ratio(q):
    """(2q-1)!! / (2q-2)!!"""
    r = 1.0
    for j in range(1, q):
        r *= (2 * j + 1) / (2 * j)
    return r


def _poly_branches(A, phi0, B, xis, s, kit):
    u = s * s
    A2 = A * A
    centre = -xis[0] / 2
    for q, xq in enumerate(xis[1:], start=2):
        centre = centre + (-1) ** q * xq / 2 * _double_factorial_ratio(q) * u ** (q - 1)
    corr = 1
    for k, bk in enumerate(B, start=1):
        corr = corr + (-1) ** k * bk * _P(k, u, A2)
    rad = A2 - u
    rad = math.sqrt(max(rad, 0.0)) if isinstance(rad, float) else kit.sqrt(rad)
    half = 2 * phi0 / (kit.pi * A2) * rad * corr
    return centre - half, centre + half


def _poly_phase(fam, s, kit):
    ints = spectral_integrals(fam, kit)
    u = s * s
    acc = kit.conv(0)
    for p in reversed(range(len(ints.phi))):
        acc = acc * (-u) + ints.phi[p]
    return acc


def _poly_phase_deriv(fam, s, kit):
    ints = spectral_integrals(fam, kit)
    acc = kit.conv(0)
    for p in range(1, len(ints.phi)):
        acc = acc + ints.phi[p] * (-1) ** p * 2 * p * s ** (2 * p - 1)
    return acc


def _poly_tail(fam, s, kit):
    ints = spectral_integrals(fam, kit)
    acc = kit.conv(0)
    for q, xq in enumerate(ints.xi, start=1):
        acc = acc + (-1) ** q * xq * s ** (2 * q - 1)
    return acc


def _poly_tail_deriv(fam, s, kit):
    ints = spectral_integrals(fam, kit)
    acc = kit.conv(0)
    for q, xq in enumerate(ints.xi, start=1):
        acc = acc + (-1) ** q * xq * (2 * q - 1) * s ** (2 * q - 2)
    return acc


# ----------------------------------------------------------------- operations

def _check_s(fam, s, closed=False):
    s = np.asarray(s, dtype=float)
    ok = (s >= 0) & (s <= fam.A_max) if closed else (s > 0) & (s < fam.A_max)
    if not np.all(ok):
        raise FamilyError("s outside the admissible range of the family")
    return s


def _vectorize(fn, arg):
    a = np.asarray(arg, dtype=float)
    if a.ndim == 0:
        return fn(float(a))
    return np.vectorize(fn, otypes=[float])(a)


def _lpd_root(y2, gamma, tol=1e-14):
    """Unique a in [0,1] with (1-a)(1-gamma a)^2 = y2."""
    g = lambda a: (1 - a) * (1 - gamma * a) ** 2 - y2
    lo, hi = 0.0, 1.0
    if g(lo) < 0 or g(hi) > 0:
        raise FamilyError("lpd root not bracketed")
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if g(mid) > 0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-9:
            break
    a = 0.5 * (lo + hi)
    for _ in range(3):
        d = -(1 - gamma * a) ** 2 - 2 * gamma * (1 - a) * (1 - gamma * a)
        if d == 0:
            break
        a_new = a - g(a) / d
        if not lo - 1e-9 <= a_new <= hi + 1e-9:
            break
        a = a_new
    if abs(g(a)) > max(tol, 1e-13):
        raise FamilyError("lpd implicit solve did not converge")
    return min(max(a, 0.0), 1.0)


def _amplitude_scalar(fam: PotentialFamily, x: float) -> float:
    if fam.kind == "interpolation":
        return _interp_amplitude(fam.delta, x)
    if x <= fam.X_minus or x >= fam.X_plus:
        return 0.0
    y = (2 * x - fam.X_plus - fam.X_minus) / fam.width
    if fam.kind == "semicircle":
        return fam.A_max * math.sqrt(max(0.0, 1 - y * y))
    if fam.kind == "hirota":
        xi = fam.xi
        den = math.sqrt(1 - 2 * y * xi + xi * xi) + 1 - y * xi
        return math.sqrt(2.0) * fam.A_max * math.sqrt(max(0.0, (1 - y * y) / den))
    if fam.kind == "lpd":
        return fam.A_max * math.sqrt(_lpd_root(y * y, fam.gamma))
    # general polynomial: invert the monotone branch on the relevant side
    if x == fam.x0:
        return fam.A_max
    side = 0 if x < fam.x0 else 1
    f = lambda s: inverse_branches(fam, s, _unchecked=True)[side] - x
    return brentq(f, 0.0, fam.A_max, xtol=1e-15, rtol=1e-15)


def amplitude(fam: PotentialFamily, x):
    """A(x); zero outside the support, A_max at the maximizer."""
    return _vectorize(lambda v: _amplitude_scalar(fam, v), x)


def _interp_branch(delta, s):
    m, a, b = interpolation_coefficients(delta)
    sig = math.sqrt(max(0.0, m * m - s * s))
    if a == 0:
        return b * sig
    return 0.5 * a * math.log((m + sig) / (m - sig)) + b * sig if sig < m else math.inf


def _interp_amplitude(delta, x):
    m, a, b = interpolation_coefficients(delta)
    ax = abs(x)
    if a == 0:
        return math.sqrt(max(0.0, m * m - (ax / b) ** 2)) if ax < b * m else 0.0
    if ax == 0:
        return m
    # parametrize by r = m - sigma in (0, m]; branch value decreases in r
    g = lambda lr: 0.5 * a * math.log((2 * m - math.exp(lr)) / math.exp(lr)) \
        + b * (m - math.exp(lr)) - ax
    hi = math.log(m)
    lo = hi - 10.0
    while g(lo) < 0:
        lo -= 10.0
        if lo < -1400:
            return 0.0
    lr = brentq(g, lo, hi, xtol=1e-15, rtol=1e-15)
    r = math.exp(lr)
    return math.sqrt(r * (2 * m - r))


def inverse_branches(fam: PotentialFamily, s, _unchecked: bool = False):
    """(x_-(s), x_+(s)), the two solutions of A(x) = s."""
    if not _unchecked:
        s = _check_s(fam, s, closed=True)
    if fam.kind == "interpolation":
        xp = _vectorize(lambda v: _interp_branch(fam.delta, v), s)
        return -xp, xp
    A, phi0, B, xis = _poly_params(fam)

    def one(v):
        return _poly_branches(A, phi0, B, xis, v, FLOAT)
    arr = np.asarray(s, dtype=float)
    if arr.ndim == 0:
        return one(float(arr))
    pairs = np.array([one(v) for v in arr.ravel()])
    return pairs[:, 0].reshape(arr.shape), pairs[:, 1].reshape(arr.shape)


def phase_integral(fam: PotentialFamily, s, kit=FLOAT):
    """Phi(i s) by closed form."""
    if kit is FLOAT:
        s = _check_s(fam, s, closed=True)
        if np.ndim(s):
            return np.array([phase_integral(fam, float(v)) for v in s])
        s = float(s)
    if fam.kind == "interpolation":
        m, a, b = interpolation_coefficients(fam.delta, kit)
        return kit.pi * (a * (m - s) + b * (m * m - s * s) / 2)
    return _poly_phase(fam, s, kit)


def tail_integral(fam: PotentialFamily, s, kit=FLOAT):
    """Xi(i s) by closed form (odd in s)."""
    if kit is FLOAT:
        if np.ndim(s):
            return np.array([tail_integral(fam, float(v)) for v in np.asarray(s)])
        s = float(s)
    if fam.kind == "interpolation":
        return kit.conv(0) * s
    return _poly_tail(fam, s, kit)


def density(fam: PotentialFamily, s, kit=FLOAT):
    """rho(s) = -(1/pi) d Phi(i s)/ds."""
    if kit is FLOAT:
        if np.ndim(s):
            return np.array([density(fam, float(v)) for v in np.asarray(s)])
        s = float(s)
    if fam.kind == "interpolation":
        m, a, b = interpolation_coefficients(fam.delta, kit)
        return a + b * s
    return -_poly_phase_deriv(fam, s, kit) / kit.pi


def tail_derivative(fam: PotentialFamily, s):
    """d Xi(i s)/ds."""
    if np.ndim(s):
        return np.array([tail_derivative(fam, float(v)) for v in np.asarray(s)])
    if fam.kind == "interpolation":
        return 0.0
    return _poly_tail_deriv(fam, float(s), FLOAT)


def l1_norm(fam: PotentialFamily) -> float:
    """Integral of A over the line, equal to Phi(0)."""
    return float(phase_integral(fam, 0.0))


# --------------------------------------------------------- quadrature versions

def phase_integral_quadrature(fam: PotentialFamily, s: float, tol: float | None = None) -> float:
    """Phi(i s) by direct quadrature of sqrt(A^2 - s^2) between the turning points.

    The substitution x = c - h cos(theta) makes the square-root endpoint
    behaviour smooth.
    """
    tol = fam.tol if tol is None else tol
    s = float(_check_s(fam, s, closed=True))
    if s == fam.A_max:
        return 0.0
    xm, xp = inverse_branches(fam, s)
    if not np.isfinite(xm) or not np.isfinite(xp):
        raise FamilyError("phase quadrature needs finite turning points")
    c, h = 0.5 * (xp + xm), 0.5 * (xp - xm)

    def f(th):
        x = c - h * np.cos(th)
        A = amplitude(fam, x)
        return np.sqrt(np.maximum(A * A - s * s, 0.0)) * h * np.sin(th)
    return gauss_legendre(f, 0.0, math.pi, tol=tol)


def tail_integral_quadrature(fam: PotentialFamily, s: float, tol: float | None = None) -> float:
    """Xi(i s) by quadrature of the compact-support form of the tail integral.

    Xi(is) = (X_+ + X_-) s + int_{X_-}^{x_-} sqrt(s^2 - A^2) - int_{x_+}^{X_+} sqrt(s^2 - A^2),
    each piece mapped to [0, pi/2] by a sine substitution anchored at the
    support endpoint.
    """
    tol = fam.tol if tol is None else tol
    s = float(_check_s(fam, s, closed=True))
    if not (np.isfinite(fam.X_minus) and np.isfinite(fam.X_plus)):
        raise FamilyError("tail quadrature needs a compact support")
    if s == 0.0:
        return 0.0
    xm, xp = inverse_branches(fam, s)

    def piece(edge, turn):
        span = turn - edge

        def f(ph):
            x = edge + span * np.sin(ph)
            A = amplitude(fam, x)
            return np.sqrt(np.maximum(s * s - A * A, 0.0)) * span * np.cos(ph)
        return gauss_legendre(f, 0.0, 0.5 * math.pi, tol=tol)
    # the right piece has span < 0, so its sign already carries the minus
    return (fam.X_plus + fam.X_minus) * s + piece(fam.X_minus, xm) + piece(fam.X_plus, xp)


def _derivative(f, m, h, lo, hi):
    """Fourth-order finite difference, shifted one-sided near the interval ends."""
    if m - 2 * h >= lo and m + 2 * h <= hi:
        return (f(m - 2 * h) - 8 * f(m - h) + 8 * f(m + h) - f(m + 2 * h)) / (12 * h)
    sgn = 1.0 if m - 2 * h < lo else -1.0
    k = sgn * h
    return (-25 * f(m) + 48 * f(m + k) - 36 * f(m + 2 * k) + 16 * f(m + 3 * k)
            - 3 * f(m + 4 * k)) / (12 * k)


def recover_branches(phase, tail, A_max: float, s: float, dphase=None, dtail=None,
                     tol: float = 1e-12):
    """Rebuild (x_-(s), x_+(s)) from the phase and tail integrals alone.

    ``phase`` and ``tail`` map s to Phi(is) and Xi(is).  Their s-derivatives
    may be supplied; otherwise fourth-order differences are used.  The two
    Abel-type integrals are taken with m = s sin(theta) and
    m^2 = s^2 + (A^2 - s^2) z^2, which remove the inverse square roots.
    """
    if not 0 < s < A_max:
        raise FamilyError("s outside (0, A_max)")
    h = 1e-3 * A_max
    if dphase is None:
        dphase = lambda m: _derivative(phase, m, h, 0.0, A_max)
    if dtail is None:
        dtail = lambda m: _derivative(tail, m, h, 0.0, A_max)
    dphase_v = np.vectorize(dphase, otypes=[float])
    dtail_v = np.vectorize(dtail, otypes=[float])
    rad = math.sqrt(A_max * A_max - s * s)
    centre = gauss_legendre(lambda th: dtail_v(s * np.sin(th)), 0.0, 0.5 * math.pi,
                            tol=tol) / math.pi

    def g(z):
        m = np.sqrt(s * s + rad * rad * z * z)
        return dphase_v(m) * rad / m
    half = gauss_legendre(g, 0.0, 1.0, tol=tol) / math.pi
    return centre + half, centre - half
