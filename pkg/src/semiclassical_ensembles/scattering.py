"""WKB discrete scattering data of a semiclassical soliton ensemble.

For a family and a soliton count N this module produces epsilon_N, the
Bohr-Sommerfeld eigenvalue ordinates, the WKB connection coefficients and
the residue constants c_n^0.  Exponentials are never formed: tau_n and
c_n^0 are kept as (log-magnitude, sign/phase) pairs because their
exponents scale like 1/epsilon.

The double-precision record is what gets reported and serialized.  The
residue solver instead calls :func:`arb_spectral_data`, which rebuilds the
same quantities from the family parameters at the working precision.  This
matters: the reflectionless solution is exponentially sensitive to its
spectral data, and rounding s_n or log|c_n^0| to 53 bits visibly changes
the field at N of order 15 and beyond.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from . import potentials as pot
from .potentials import PotentialFamily


class ScatteringError(RuntimeError):
    """Eigenvalue root finding failed."""


@dataclass(frozen=True)
class SpectralData:
    """Soliton-ensemble spectral data for one family and one N."""
    family: PotentialFamily
    N: int
    epsilon: float
    s_tilde: np.ndarray
    log_tau: np.ndarray
    tau_sign: np.ndarray
    log_c0_magnitude: np.ndarray
    c0_phase: np.ndarray

    def to_dict(self) -> dict:
        return {"family": self.family.to_dict(), "N": self.N, "epsilon": self.epsilon,
                "s_tilde": self.s_tilde.tolist(), "log_tau": self.log_tau.tolist(),
                "tau_sign": [int(v) for v in self.tau_sign],
                "log_c0_magnitude": self.log_c0_magnitude.tolist(),
                "c0_phase": self.c0_phase.tolist()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def c0(self) -> np.ndarray:
        """c_n^0 as complex doubles (overflows to inf for large exponents).

        The phases are exactly +-pi/2, so the values are built purely imaginary.
        """
        with np.errstate(over="ignore"):
            return 1j * np.sign(self.c0_phase) * np.exp(self.log_c0_magnitude)


def spectral_from_dict(d: dict) -> SpectralData:
    fam = pot.family_from_dict(d["family"])
    return SpectralData(fam, int(d["N"]), float(d["epsilon"]), np.asarray(d["s_tilde"], float),
                        np.asarray(d["log_tau"], float), np.asarray(d["tau_sign"], int),
                        np.asarray(d["log_c0_magnitude"], float),
                        np.asarray(d["c0_phase"], float))


def epsilon_for(fam: PotentialFamily, N: int, kit=pot.FLOAT):
    """epsilon_N = (1/(N pi)) int A(x) dx = Phi(0)/(N pi)."""
    if N < 1:
        raise ValueError("N must be at least 1")
    return pot.phase_integral(fam, kit.conv(0) if kit is not pot.FLOAT else 0.0, kit) / (N * kit.pi)


def eigenvalues(fam: PotentialFamily, N: int, tol: float | None = None) -> np.ndarray:
    """Roots of Phi(i s) = (n + 1/2) eps pi, n = 0..N-1, in descending order.

    Bisection on [0, A_max] (Phi is strictly decreasing) followed by Newton
    steps with the analytic density.
    """
    if N == 0:
        return np.zeros(0)
    A = fam.A_max
    tol = 1e-13 * A if tol is None else tol
    eps = epsilon_for(fam, N)
    out = np.empty(N)
    hi_prev = A
    for n in range(N):
        target = (n + 0.5) * eps * math.pi
        f = lambda s: float(pot.phase_integral(fam, s)) - target
        lo, hi = 0.0, hi_prev
        if f(lo) < 0 or f(hi) > 0:
            raise ScatteringError(f"eigenvalue {n} not bracketed")
        while hi - lo > 1e-6 * A:
            mid = 0.5 * (lo + hi)
            if f(mid) > 0:
                lo = mid
            else:
                hi = mid
        s = 0.5 * (lo + hi)
        for _ in range(50):
            step = f(s) / (-math.pi * float(pot.density(fam, s)))
            s_new = min(max(s - step, lo), hi)
            if abs(s_new - s) <= 0.25 * tol:
                s = s_new
                break
            s = s_new
        else:
            raise ScatteringError(f"Newton iteration for eigenvalue {n} did not converge")
        out[n] = s
        hi_prev = s
    return out


def connection_coefficients(fam: PotentialFamily, N: int, eps: float, s: np.ndarray):
    """(log|tau_n|, sign tau_n) with tau_n = (-1)^(n+1) exp(Xi(i s_n)/eps)."""
    log_tau = np.array([float(pot.tail_integral(fam, v)) for v in s]) / eps
    sign = np.array([(-1) ** (n + 1) for n in range(len(s))], dtype=int)
    return log_tau, sign


def _log_products(s):
    """sum_j log(s_n + s_j) - sum_{j != n} log|s_n - s_j| for each n."""
    N = len(s)
    out = np.empty(N)
    for n in range(N):
        d = np.abs(s[n] - np.delete(s, n))
        out[n] = np.sum(np.log(s[n] + s)) - np.sum(np.log(d))
    return out


def residue_constants(fam_or_spec, log_tau=None, tau_sign=None, s=None):
    """(log|c_n^0|, arg c_n^0).

    c_n^0 = tau_n prod_j (i s_n + i s_j) / prod_{j != n} (i s_n - i s_j).  With
    descending s the denominator carries (-1)^n i^(N-1), so c_n^0 = i tau_n (-1)^n |ratio|,
    which is purely imaginary.  Accepts either a SpectralData or the raw arrays.
    """
    if isinstance(fam_or_spec, SpectralData):
        sp = fam_or_spec
        log_tau, tau_sign, s = sp.log_tau, sp.tau_sign, sp.s_tilde
    s = np.asarray(s, float)
    logmag = log_tau + _log_products(s)
    sign = tau_sign * np.array([(-1) ** n for n in range(len(s))])
    if len(s) > 1 and np.min(-np.diff(s)) < 1e-10 * np.max(s):
        import warnings
        warnings.warn("nearly degenerate eigenvalues: residue constants ill-conditioned")
    return logmag, 0.5 * math.pi * sign.astype(float)


def spectral_data(fam: PotentialFamily, N: int) -> SpectralData:
    """Assemble the full WKB record for ``fam`` with ``N`` solitons."""
    if N < 0:
        raise ValueError("N must be nonnegative")
    if N == 0:
        z = np.zeros(0)
        return SpectralData(fam, 0, math.inf, z, z, np.zeros(0, int), z, z)
    eps = epsilon_for(fam, N)
    s = eigenvalues(fam, N)
    log_tau, sign = connection_coefficients(fam, N, eps, s)
    logmag, phase = residue_constants(fam, log_tau, sign, s)
    return SpectralData(fam, N, float(eps), s, log_tau, sign, logmag, phase)


def trace_l2(spec: SpectralData) -> float:
    """Squared L2 norm of the ensemble from the trace formula, 4 eps sum s_n."""
    if spec.N == 0:
        return 0.0
    return float(4.0 * spec.epsilon * np.sum(spec.s_tilde))


def quantization_residual(spec: SpectralData) -> float:
    """max_n |Phi(i s_n) - (n + 1/2) eps pi| relative to Phi(0)."""
    if spec.N == 0:
        return 0.0
    phi0 = float(pot.phase_integral(spec.family, 0.0))
    tgt = (np.arange(spec.N) + 0.5) * spec.epsilon * math.pi
    return float(np.max(np.abs(pot.phase_integral(spec.family, spec.s_tilde) - tgt)) / phi0)


# ------------------------------------------------------- extended precision

def _polish_arb(fam, s0: float, target, kit, prec: int):
    """Newton refinement of Phi(i s) = target in ball arithmetic."""
    from flint import arb
    s = kit.conv(s0)
    for _ in range(64):
        step = (pot.phase_integral(fam, s, kit) - target) / (-kit.pi * pot.density(fam, s, kit))
        s = arb((s - step).mid())
        if abs(float(step.mid())) < 2.0 ** (-prec - 4) * max(1.0, abs(s0)):
            break
    return s


def arb_spectral_data(spec: SpectralData):
    """(eps, [s_n], [log|c_n^0|], [sign of c_n^0 / i]) as arb balls at ``ctx.prec``.

    Everything is recomputed from the family's float parameters, so the data
    are mutually consistent to the working precision.
    """
    from flint import ctx
    kit = pot.arb_kit()
    fam, N = spec.family, spec.N
    eps = epsilon_for(fam, N, kit)
    S = [_polish_arb(fam, float(spec.s_tilde[n]), (2 * n + 1) * eps * kit.pi / 2, kit, ctx.prec)
         for n in range(N)]
    logs = []
    for n in range(N):
        acc = pot.tail_integral(fam, S[n], kit) / eps
        for j in range(N):
            acc += (S[n] + S[j]).log()
            if j != n:
                acc -= abs(S[n] - S[j]).log()
        logs.append(acc)
    signs = [int(spec.tau_sign[n]) * (-1) ** n for n in range(N)]
    return eps, S, logs, signs
