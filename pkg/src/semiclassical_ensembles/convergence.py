"""Power-law fits of the initial-data error against epsilon."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from . import ensemble as en
from . import potentials as pot
from . import scattering as sc

# sup-norm regions used for the Hirota convergence study
HIROTA_INTERIOR = ((-0.45, 0.45),)
HIROTA_EXTERIOR = ((-0.65, -0.55), (0.55, 0.65))


@dataclass(frozen=True)
class FitReport:
    """error ~ prefactor * eps^exponent, fitted by least squares on logs."""
    exponent: float
    prefactor: float
    residual: float
    samples: tuple = field(default=())
    argmax: tuple = field(default=())

    def to_dict(self) -> dict:
        return {"exponent": self.exponent, "prefactor": self.prefactor,
                "residual": self.residual, "samples": [list(s) for s in self.samples],
                "argmax": list(self.argmax)}


def fit_power_law(eps, err) -> FitReport:
    """Unweighted OLS of log(err) on log(eps)."""
    eps = np.asarray(eps, dtype=float)
    err = np.asarray(err, dtype=float)
    if eps.size < 3 or eps.size != err.size:
        raise ValueError("need at least three (eps, error) pairs")
    if np.any(eps <= 0) or np.any(err <= 0):
        raise ValueError("eps and errors must be positive")
    X, Y = np.log(eps), np.log(err)
    slope, icpt = np.polyfit(X, Y, 1)
    res = Y - (slope * X + icpt)
    if not math.isfinite(slope):
        raise ValueError("non-finite exponent")
    return FitReport(float(slope), float(math.exp(icpt)), float(np.sqrt(np.mean(res ** 2))),
                     tuple(zip(eps.tolist(), err.tolist())))


def sup_error(spec, regions, per_eps: float = 8.0, refine: int = 3,
              policy: en.EvaluationPolicy = en.DEFAULT_POLICY):
    """(sup |psi(x, 0) - A(x)|, argmax) over the union of intervals.

    The grid spacing is eps/per_eps; the ``refine`` largest grid values are
    then polished by bounded scalar maximisation on their neighbouring cells.
    """
    fam = spec.family
    err = lambda x: abs(en.evaluate(spec, x, (), policy).psi - float(pot.amplitude(fam, x)))
    cand = []
    for lo, hi in regions:
        n = max(3, int(math.ceil((hi - lo) * per_eps / spec.epsilon)) + 1)
        xs = np.linspace(lo, hi, n)
        vals = np.array([err(x) for x in xs])
        h = xs[1] - xs[0]
        for k in np.argsort(vals)[::-1][:refine]:
            cand.append((vals[k], xs[k]))
            a, b = max(lo, xs[k] - h), min(hi, xs[k] + h)
            r = minimize_scalar(lambda x: -err(x), bounds=(a, b), method="bounded",
                                options={"xatol": 1e-3 * h})
            cand.append((-r.fun, float(r.x)))
    best = max(cand)
    return float(best[0]), float(best[1])


def converge_fit(fam: pot.PotentialFamily, Ns, regions, policy: en.EvaluationPolicy = en.DEFAULT_POLICY,
                 per_eps: float = 8.0) -> FitReport:
    """Fit the sup error over ``regions`` against eps_N for the listed N."""
    Ns = list(Ns)
    if len(Ns) < 3:
        raise ValueError("need at least three values of N")
    eps, errs, where = [], [], []
    for N in Ns:
        spec = sc.spectral_data(fam, N)
        e, x = sup_error(spec, regions, per_eps, policy=policy)
        eps.append(spec.epsilon)
        errs.append(e)
        where.append(x)
    rep = fit_power_law(eps, errs)
    return FitReport(rep.exponent, rep.prefactor, rep.residual, rep.samples, tuple(where))
