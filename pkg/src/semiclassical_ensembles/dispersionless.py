"""Solutions of the dispersionless focusing NLS system.

    rho_t + mu_x = 0,     mu_t + (mu^2/rho - rho^2/2)_x = 0.

Three objects live here: the Talanov parabolic-density solutions, whose
half-width obeys w'' = -2F/w^2; the Akhmanov-Sukhorukov-Khokhlov (ASK)
solution with sech^2 initial density; and the on-axis catastrophe of the
linear-density interpolation family between the two.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from . import potentials as pot


class DispersionlessError(ValueError):
    """Requested time lies outside the existence interval, or a solve failed."""


# ------------------------------------------------------------------ Talanov

@dataclass(frozen=True)
class TalanovParams:
    """Integration constants of a Talanov solution.

    ``w0`` is the width at t = 0 and ``direction`` the sign of w'(0) when
    it is not forced to vanish (E >= 0).  For E = 0 the collapse time
    ``t_focus`` follows from (w0, F).
    """
    E: float
    F: float
    w0: float
    direction: int = -1

    def __post_init__(self):
        if not self.F > 0 or not self.w0 > 0:
            raise DispersionlessError("need F > 0 and w0 > 0")
        if self.E < -2 * self.F / self.w0 * (1 + 1e-12):
            raise DispersionlessError("E below -2F/w0 leaves no real orbit through w0")
        if self.direction not in (-1, 1):
            raise DispersionlessError("direction is +1 or -1")

    @classmethod
    def from_amplitude(cls, A_max: float, w0: float) -> "TalanovParams":
        """E = -2 A_max^2, F = A_max^2 w0: the E < 0 orbit turning at t = 0."""
        return cls(-2.0 * A_max ** 2, A_max ** 2 * w0, w0)

    @property
    def A_max(self) -> float:
        """Peak amplitude sqrt(F/w0) at t = 0."""
        return math.sqrt(self.F / self.w0)

    @property
    def dw0(self) -> float:
        v = 2 * (self.E + 2 * self.F / self.w0)
        return 0.0 if v <= 0 else self.direction * math.sqrt(v)

    @property
    def t_focus(self) -> float:
        """Collapse time of the E = 0 branch, w(t) = (9F)^(1/3) (t_focus - t)^(2/3)."""
        if self.E != 0:
            raise DispersionlessError("t_focus is defined for E = 0")
        return -self.direction * self.w0 ** 1.5 / (3 * math.sqrt(self.F))

    def first_integral(self, w, dw):
        """w'^2/2 - 2F/w, conserved and equal to E."""
        return 0.5 * np.asarray(dw) ** 2 - 2 * self.F / np.asarray(w)


def talanov_duration(params: TalanovParams) -> float:
    """Lifetime sqrt(2) pi F (-E)^(-3/2) of an E < 0 solution (= pi w0/(2 A_max))."""
    if params.E >= 0:
        raise DispersionlessError("finite duration needs E < 0")
    return math.sqrt(2) * math.pi * params.F * (-params.E) ** -1.5


def T_of_W(W):
    """Rescaled time T(W) = int_W^1 (1/y - 1)^(-1/2) dy on the E < 0 orbit."""
    W = np.asarray(W, dtype=float)
    if np.any((W <= 0) | (W > 1)):
        raise DispersionlessError("W must lie in (0, 1]")
    r = np.sqrt((1 - W) * W)
    with np.errstate(divide="ignore"):
        return r + math.pi / 4 + 0.5 * np.arctan2(1 - 2 * W, 2 * r)


def rescale(params: TalanovParams):
    """(time unit, width unit): t = sqrt(2) F |E|^(-3/2) T and w = 2F |E|^(-1) W."""
    if params.E == 0:
        raise DispersionlessError("the rescaling needs E != 0")
    e = abs(params.E)
    return math.sqrt(2) * params.F * e ** -1.5, 2 * params.F / e


@dataclass
class WidthTrajectory:
    """Dense ODE solution on [0, t_end] (or [t_end, 0]) with collapse detection."""
    params: TalanovParams
    t_end: float
    sol: object
    collapse_time: float | None

    def __call__(self, t):
        y = self.sol.sol(np.asarray(t, dtype=float))
        return y[0], y[1]

    def invariant_drift(self) -> float:
        """max |w'^2/2 - 2F/w - E| over the accepted integration steps."""
        w, dw = self.sol.y
        return float(np.max(np.abs(self.params.first_integral(w, dw) - self.params.E)))


def width_trajectory(params: TalanovParams, t_end: float, rtol: float = 1e-13,
                     floor: float = 1e-6) -> WidthTrajectory:
    """Integrate w'' = -2F/w^2 from (w0, w'(0)) with an embedded RK4(5) scheme.

    Integration stops when w falls below ``floor * w0``; the crossing time
    is reported as the collapse time.  The first integral is conserved to
    about 1e-9 |E| while w stays above 1e-3 w0; closer to collapse the term
    2F/w magnifies the relative error of w by w0/w and the drift grows
    accordingly.
    """
    F = params.F

    def rhs(_, y):
        return [y[1], -2 * F / y[0] ** 2]

    def hit_floor(_, y):
        return y[0] - floor * params.w0
    hit_floor.terminal = True

    sol = solve_ivp(rhs, (0.0, t_end), [params.w0, params.dw0], method="RK45",
                    rtol=rtol, atol=1e-14 * params.w0, dense_output=True, events=hit_floor)
    if sol.status < 0:
        raise DispersionlessError(sol.message)
    ev = sol.t_events[0]
    return WidthTrajectory(params, t_end, sol, float(ev[0]) if len(ev) else None)


def width_solve(params: TalanovParams, t, rtol: float = 1e-13):
    """(w(t), w'(t)) for scalar or array t inside the existence interval."""
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    if params.E == 0:
        tf = params.t_focus
        s = tf - t_arr if params.direction < 0 else t_arr - tf
        if np.any(s <= 0):
            raise DispersionlessError("E = 0 solution exists only before its focus time")
        c = (9 * params.F) ** (1 / 3)
        w = c * s ** (2 / 3)
        dw = -params.direction * -(2 / 3) * c * s ** (-1 / 3)
        out = (w, dw)
    elif not np.any(t_arr):
        out = (np.full_like(t_arr, params.w0), np.full_like(t_arr, params.dw0))
    else:
        if params.E < 0 and params.dw0 == 0:
            half = 0.5 * talanov_duration(params)
            if np.any(np.abs(t_arr) >= half):
                raise DispersionlessError(f"|t| must stay below the collapse time {half}")
            # the orbit is symmetric about its turning point at t = 0
            tr = width_trajectory(params, float(np.max(np.abs(t_arr))), rtol)
            w, dw = tr(np.abs(t_arr))
            out = (w, np.sign(t_arr) * dw)
        else:
            ends = [float(t_arr.min()), float(t_arr.max())]
            w = np.empty_like(t_arr)
            dw = np.empty_like(t_arr)
            for end, mask in ((ends[1], t_arr >= 0), (ends[0], t_arr < 0)):
                if not mask.any() or end == 0:
                    w[mask], dw[mask] = params.w0, params.dw0
                    continue
                tr = width_trajectory(params, end, rtol)
                if tr.collapse_time is not None and np.any(np.abs(t_arr[mask]) >= abs(tr.collapse_time)):
                    raise DispersionlessError("time beyond the collapse of the width")
                w[mask], dw[mask] = tr(t_arr[mask])
            out = (w, dw)
    if np.ndim(t) == 0:
        return float(out[0][0]), float(out[1][0])
    return out


def talanov_profile(params: TalanovParams, x, t):
    """(rho, mu) = (F w^-3 (w^2 - x^2), F w^-4 w' x (w^2 - x^2)) on |x| < w."""
    w, dw = width_solve(params, float(t))
    x = np.asarray(x, dtype=float)
    inside = np.abs(x) < w
    core = np.where(inside, w * w - x * x, 0.0)
    rho = params.F * w ** -3 * core
    mu = params.F * w ** -4 * dw * x * core
    return rho, mu


# ---------------------------------------------------------------------- ASK

def ask_axis(A_max: float, t):
    """rho(0, t) = (1 - sqrt(1 - 4 A^2 t^2))/(2 t^2), written without cancellation.

    Valid for |t| <= 1/(2 A_max); the endpoint gives the catastrophe value 2 A_max^2.
    """
    t = np.asarray(t, dtype=float)
    disc = 1 - 4 * A_max ** 2 * t * t
    if np.any(disc < -1e-15):
        raise DispersionlessError("the axis solution ends at |t| = 1/(2 A_max)")
    out = 2 * A_max ** 2 / (1 + np.sqrt(np.maximum(disc, 0.0)))
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class DispersionlessState:
    """(rho, mu) at (x, t) with the residual of the defining equations."""
    x: float
    t: float
    rho: float
    mu: float
    residual: float = 0.0


def ask_residual(A_max: float, x: float, t: float, rho: float, mu: float) -> float:
    """Max residual of the two implicit ASK equations."""
    u = x - mu * t / rho
    r1 = mu + 2 * t * rho ** 2 * math.tanh(u)
    r2 = rho - (A_max ** 2 + t * t * rho * rho) / math.cosh(u) ** 2
    return max(abs(r1), abs(r2))


def _ask_newton(A2, x, t, rho, u, tol=1e-14, iters=50):
    """Newton on u - x - 2 t^2 rho tanh u = 0, rho - (A^2 + t^2 rho^2) sech^2 u = 0."""
    for _ in range(iters):
        th = math.tanh(u)
        s2 = 1 - th * th
        f1 = u - x - 2 * t * t * rho * th
        f2 = rho - (A2 + t * t * rho * rho) * s2
        j11, j12 = -2 * t * t * th, 1 - 2 * t * t * rho * s2
        j21, j22 = 1 - 2 * t * t * rho * s2, 2 * (A2 + t * t * rho * rho) * s2 * th
        det = j11 * j22 - j12 * j21
        if abs(det) < 1e-14:
            raise DispersionlessError("singular Jacobian: at or past the gradient catastrophe")
        drho = (f1 * j22 - j12 * f2) / det
        du = (j11 * f2 - f1 * j21) / det
        rho -= drho
        u -= du
        if abs(drho) <= tol * max(1.0, abs(rho)) and abs(du) <= tol * max(1.0, abs(u)):
            return rho, u
    raise DispersionlessError("ASK Newton iteration did not converge")


def ask_solve(A_max: float, x: float, t: float, steps: int | None = None) -> DispersionlessState:
    """Solve the implicit ASK pair by continuation in t from the sech^2 data.

    With u = x - mu t/rho the pair becomes u = x + 2 t^2 rho tanh u and
    rho = (A^2 + t^2 rho^2) sech^2 u; each continuation step seeds Newton
    with the previous (rho, u).
    """
    A2 = A_max ** 2
    if steps is None:
        steps = max(8, int(64 * abs(t) * A_max) + 8)
    rho, u = A2 / math.cosh(x) ** 2, x
    for k in range(1, steps + 1):
        tk = t * k / steps
        rho, u = _ask_newton(A2, x, tk, rho, u)
    mu = -2 * t * rho * rho * math.tanh(u)
    return DispersionlessState(x, t, rho, mu, ask_residual(A_max, x, t, rho, mu))


# ---------------------------------------------------- interpolation family

def interpolation_axis_time(delta: float, rho: float) -> float:
    """On-axis time at which rho(0, t) = rho for the interpolation family."""
    m, a, b = pot.interpolation_coefficients(delta)
    if not rho > m * m:
        raise DispersionlessError("rho must exceed A_max(delta)^2")
    r = math.sqrt(rho - m * m)
    return math.pi / 4 * b + (a + b * m / 2) * r / rho - b / 2 * math.atan(m / r)


@dataclass(frozen=True)
class Catastrophe:
    """(rho_c, t_c) of the on-axis gradient catastrophe; ``collapse`` marks delta = 0."""
    delta: float
    rho_c: float
    t_c: float
    collapse: bool = False


def interpolation_catastrophe(delta: float) -> Catastrophe:
    """rho_c = m^2 (2 + m b/a) with m = 1 - delta/2, and t_c = t(rho_c).

    At delta = 0 the density blows up instead; the blow-up time pi/4 is
    returned with ``collapse`` set.
    """
    if not 0 <= delta <= 1:
        raise DispersionlessError("delta must lie in [0, 1]")
    if delta == 0:
        return Catastrophe(0.0, math.inf, math.pi / 4, True)
    m, a, b = pot.interpolation_coefficients(delta)
    rho_c = m * m * (2 + m * b / a)
    return Catastrophe(float(delta), rho_c, interpolation_axis_time(delta, rho_c))
