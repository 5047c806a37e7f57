"""Suleimanov-Talanov focus points, flow mixtures and peak measurements.

For a family with polynomial phase and tail integrals

    Phi(l) = sum_p Phi_p l^(2p),     Xi(l) = i sum_q Xi_q l^(2q-1),

the focus points form the lattice

    (x, t2, t3, t4, ...) = -1/2 (Xi_1, (2K+1) Phi_1, Xi_2, (2K+1) Phi_2, ...),

indexed by an integer K.  Near each one the ensemble has amplitude
~ 4 nu / eps on a window of size eps^2/nu in x and eps^(m+1)/nu^m in t_m,
where nu = (1/2pi) int_0^A_max Phi(i s) ds.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import ensemble as en
from . import potentials as pot
from . import scattering as sc
from .ensemble import EvaluationPolicy, MultiTime
from .potentials import PotentialFamily
from .quadrature import gauss_legendre

PSI_CENTER = 4.0  # |Psi(0, ..., 0)| of the limiting rogue wave


class FocusError(ValueError):
    """The family or the requested flow does not admit the construction."""


def nu(fam: PotentialFamily, tol: float = 1e-14) -> float:
    """nu = (1/2pi) int_0^A_max Phi(i s) ds by Gauss-Legendre quadrature."""
    f = lambda s: np.array([float(pot.phase_integral(fam, float(v))) for v in s])
    return gauss_legendre(f, 0.0, fam.A_max, tol=tol) / (2 * math.pi)


def nu_closed_form(fam: PotentialFamily) -> float:
    """Cross-check values: A^2 L/12 (semicircle, hirota), (5 - 2 gamma) L A^2/60 (lpd)."""
    L, A = fam.width, fam.A_max
    if fam.kind in ("semicircle", "hirota"):
        return A * A * L / 12
    if fam.kind == "lpd":
        return (5 - 2 * fam.gamma) * L * A * A / 60
    raise FocusError(f"no closed form for kind {fam.kind!r}")


def _focus_vector(si: pot.SpectralIntegrals, K: int):
    """(x0, (t2, ..., tM)) interleaving Xi_q and (2K+1) Phi_p."""
    M = max(si.M, 2)
    phi = list(si.phi) + [0.0] * M
    xi = list(si.xi) + [0.0] * M
    times = []
    for m in range(2, M + 1):
        if m % 2 == 0:
            times.append(-0.5 * (2 * K + 1) * phi[m // 2])
        else:
            times.append(-0.5 * xi[(m + 1) // 2 - 1])
    return -0.5 * xi[0], tuple(times)


@dataclass(frozen=True)
class FocusEvent:
    """A focus point with its local scalings.

    ``epsilon`` and ``N`` are attached when the event is built for a
    concrete ensemble; the window scales need them.
    """
    family: PotentialFamily
    K: int
    x0: float
    t0: tuple
    nu: float
    epsilon: float | None = None
    N: int | None = None

    @property
    def M(self) -> int:
        return len(self.t0) + 1

    @property
    def x_scale(self) -> float:
        return self._eps() ** 2 / self.nu

    def t_scale(self, m: int) -> float:
        """eps^(m+1)/nu^m, the window scale of t_m."""
        return self._eps() ** (m + 1) / self.nu ** m

    @property
    def sign(self) -> int:
        """(-1)^(K+N), the predicted sign of Im psi at the focus."""
        if self.N is None:
            raise FocusError("the sign factor needs N")
        return -1 if (self.K + self.N) % 2 else 1

    def _eps(self) -> float:
        if self.epsilon is None:
            raise FocusError("window scales need epsilon; build the event with N")
        return self.epsilon

    def to_dict(self) -> dict:
        return {"family": self.family.to_dict(), "K": self.K, "x0": self.x0,
                "t0": list(self.t0), "nu": self.nu, "epsilon": self.epsilon, "N": self.N}


def focus_point(fam: PotentialFamily, K: int, N: int | None = None) -> FocusEvent:
    """The K-th focus point of ``fam`` (and its window data when N is given)."""
    if not fam.is_polynomial:
        raise FocusError("focus points need polynomial phase and tail integrals")
    x0, t0 = _focus_vector(pot.spectral_integrals(fam), int(K))
    eps = float(sc.epsilon_for(fam, N)) if N else None
    return FocusEvent(fam, int(K), float(x0), t0, nu(fam), eps, N)


# ------------------------------------------------------------- mixtures

@dataclass(frozen=True)
class FlowMixture:
    """t_m = a_m t with a focus at t = t_focus."""
    a: tuple
    alpha: float
    t_focus: float
    label: str = "mixture"
    periodic: bool = False

    def __post_init__(self):
        if not any(v != 0 for v in self.a):
            raise FocusError("a mixture needs a nonzero coefficient")

    @property
    def M(self) -> int:
        return len(self.a) + 1

    def times(self, t: float) -> MultiTime:
        return MultiTime.mixed(self.a, t)


def mixture_coefficients(fam: PotentialFamily, K: int, alpha: float) -> FlowMixture:
    """The mixture focusing at the K-th focus point.

    When Xi is linear (a potential even about its midpoint) only even flows
    enter, a_m = -alpha Phi_(m/2) / 2, and the flow refocuses with period
    2/|alpha| at t = (2K+1)/alpha.  Otherwise
    a = -alpha/2 ((2K+1) Phi_1, Xi_2, (2K+1) Phi_2, ...) with a single
    focus at t = 1/alpha.
    """
    if alpha == 0:
        raise FocusError("alpha must be nonzero")
    si = pot.spectral_integrals(fam)
    M = max(si.M, 2)
    phi = list(si.phi) + [0.0] * M
    xi = list(si.xi) + [0.0] * M
    even = si.Q == 1 or all(v == 0 for v in si.xi[1:])
    a = []
    for m in range(2, M + 1):
        if m % 2 == 0:
            a.append(-0.5 * alpha * phi[m // 2] * (1 if even else 2 * K + 1))
        else:
            a.append(0.0 if even else -0.5 * alpha * xi[(m + 1) // 2 - 1])
    while len(a) > 1 and a[-1] == 0:
        a.pop()
    t_focus = (2 * K + 1) / alpha if even else 1.0 / alpha
    return FlowMixture(tuple(a), float(alpha), t_focus, "even" if even else "single", even)


def hirota_condition(a2: float, a3: float, A_max: float, xi: float, K: int) -> float:
    """4 a2 xi - 3 pi (2K+1) a3 A_max; zero for a focusing Hirota mixture."""
    return 4 * a2 * xi - 3 * math.pi * (2 * K + 1) * a3 * A_max


def lpd_condition(a2: float, a4: float, A_max: float, gamma: float) -> float:
    """(4 + 2 gamma) a4 A_max^2 - 3 gamma a2; zero for a focusing LPD mixture."""
    return (4 + 2 * gamma) * a4 * A_max ** 2 - 3 * gamma * a2


def check_condition(kind: str, tol: float = 1e-12, **params) -> bool:
    """Whether the Hirota or LPD quantization condition holds within ``tol``."""
    if kind == "hirota":
        v = hirota_condition(params["a2"], params["a3"], params["A_max"], params["xi"],
                             params.get("K", 0))
    elif kind == "lpd":
        v = lpd_condition(params["a2"], params["a4"], params["A_max"], params["gamma"])
    else:
        raise FocusError(f"no quantization condition for {kind!r}")
    return abs(v) <= tol


def hirota_a3(a2: float, A_max: float, xi: float, K: int) -> float:
    """a3 solving the Hirota condition."""
    return 4 * a2 * xi / (3 * math.pi * (2 * K + 1) * A_max)


def lpd_a4(a2: float, A_max: float, gamma: float) -> float:
    """a4 solving the LPD condition."""
    return 3 * gamma * a2 / ((4 + 2 * gamma) * A_max ** 2)


# --------------------------------------------------------------- windows

def local_window(event: FocusEvent, X: float = 0.0, T=None, mixture: FlowMixture | None = None,
                 along: FlowMixture | None = None):
    """Map window coordinates to (x, MultiTime).

    ``T`` is a mapping {m: T_m} for explicit times.  With a mixture, ``T``
    is the scalar T_M and t = t_focus + eps^(M+1) T / (a_M nu^M).  ``along``
    evaluates a different mixture at the same (x, t), which is how detuned
    flows are compared on the window of the tuned one.
    """
    x = event.x0 + event.x_scale * X
    if mixture is not None:
        T = 0.0 if T is None else float(T)
        M = mixture.M
        t = mixture.t_focus + event.t_scale(M) * T / mixture.a[-1]
        return x, (along or mixture).times(t)
    times = list(event.t0)
    for m, v in dict(T or {}).items():
        if not 2 <= m <= event.M:
            raise FocusError(f"time index {m} outside 2..{event.M}")
        times[m - 2] += event.t_scale(m) * v
    return x, MultiTime(times=tuple(times))


@dataclass(frozen=True)
class PeakReport:
    """Window maximum of |psi| and the comparison with the focusing prediction."""
    max_abs: float
    argmax: tuple
    r: float
    center: complex
    phase_error: float
    failures: int

    def to_dict(self) -> dict:
        return {"max_abs": self.max_abs, "argmax": list(self.argmax), "r": self.r,
                "center": [self.center.real, self.center.imag],
                "phase_error": self.phase_error, "failures": self.failures}


def window_grid(spec, event: FocusEvent, half_width: float = 3.0, points: int = 41,
                mixture: FlowMixture | None = None, time_index: int | None = None,
                policy: EvaluationPolicy = en.DEFAULT_POLICY, workers: int = 1,
                along: FlowMixture | None = None):
    """Samples on a points x points grid over [-hw, hw]^2 in (X, T); rows follow X."""
    grid = np.linspace(-half_width, half_width, points)
    m = event.M if time_index is None else time_index
    cells = []
    for X in grid:
        for T in grid:
            cells.append(local_window(event, X, T if mixture else {m: T}, mixture, along))
    tasks = [(spec, x, mt, policy) for x, mt in cells]
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=workers) as pool:
            samples = list(pool.map(en._grid_task, tasks, chunksize=16))
    else:
        samples = [en._grid_task(t) for t in tasks]
    return grid, samples


def peak_check(spec, event: FocusEvent, half_width: float = 3.0, points: int = 41,
               mixture: FlowMixture | None = None, time_index: int | None = None,
               policy: EvaluationPolicy = en.DEFAULT_POLICY, workers: int = 1,
               along: FlowMixture | None = None) -> PeakReport:
    """Scan the window and compare with i (-1)^(K+N) (nu/eps) Psi, |Psi(0)| = 4."""
    grid, samples = window_grid(spec, event, half_width, points, mixture, time_index,
                                policy, workers, along)
    mags = np.array([abs(s.psi) if s.ok else -1.0 for s in samples]).reshape(points, points)
    i, j = np.unravel_index(int(np.argmax(mags)), mags.shape)
    peak = float(mags[i, j])
    x, mt = local_window(event, 0.0, 0.0 if mixture else {}, mixture, along)
    center = en.evaluate(spec, x, mt, policy).psi
    expected = 1j * event.sign
    phase_error = abs(cmath.phase(center / expected)) if center != 0 else math.pi
    r = spec.epsilon * peak / (PSI_CENTER * event.nu)
    return PeakReport(peak, (float(grid[i]), float(grid[j])), float(r), complex(center),
                      float(phase_error), sum(not s.ok for s in samples))


def pure_flow_shift(event: FocusEvent, n: int, t_shift: float) -> MultiTime:
    """(t2, ..., t_n - t_shift, ..., tM) for initial data of the n-th pure flow."""
    if not 2 <= n <= event.M:
        raise FocusError(f"flow index {n} outside 2..{event.M}")
    times = list(event.t0)
    times[n - 2] -= t_shift
    return MultiTime(times=tuple(times))
