"""Batch driver: ``semiclassical-ensembles <subcommand> --config run.json --out dir``.

The configuration is a single JSON document.  Recognised keys (all optional,
each subcommand reads the ones it needs):

    family      family descriptor, e.g. {"kind": "semicircle", "A_max": 1}
    N           ensemble size;   Ns  list of sizes for ``converge``
    x           list of points or {"start", "stop", "num"}
    times       list of time vectors [t2, t3, ...] (default [[]])
    K, half_width, points, alpha     focus window settings
    region      "interior", "exterior" or a list of [lo, hi] intervals
    mode        dispersionless mode (talanov | ask | interpolation)
    A_max, w0, t, delta              dispersionless parameters
    policy      {"formulation", "rel_tol", "extra_bits", ...}
    criteria    acceptance criteria to run (default all)

Exit status: 0 success, 1 computation failure (partial artifacts carry a
``failed`` flag), 2 invalid configuration.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
import tempfile

import numpy as np

from . import __version__
from . import convergence as cv
from . import dispersionless as dl
from . import ensemble as en
from . import focusing as fo
from . import potentials as pot
from . import scattering as sc

SUBCOMMANDS = ("spectrum", "evaluate", "grid", "focus", "converge", "dispersionless", "acceptance")


class ConfigError(ValueError):
    """Invalid run configuration (exit status 2)."""


class ComputeError(RuntimeError):
    """A computation failed; artifacts written so far are flagged (exit status 1)."""


# ---------------------------------------------------------------- output

class Writer:
    """Serialises all artifact writes; each file appears atomically."""

    def __init__(self, out_dir: str, config: dict):
        self.out_dir = out_dir
        self.config_hash = config_hash(config)
        os.makedirs(out_dir, exist_ok=True)
        if not os.access(out_dir, os.W_OK):
            raise ConfigError(f"output directory {out_dir!r} is not writable")
        self.written = []

    def text(self, name: str, body: str) -> str:
        path = os.path.join(self.out_dir, name)
        fd, tmp = tempfile.mkstemp(dir=self.out_dir, prefix=f".{name}.")
        try:
            with os.fdopen(fd, "w", newline="") as fh:
                fh.write(body)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        self.written.append(path)
        return path

    def report(self, name: str, payload: dict) -> str:
        body = {"tool_version": __version__, "config_hash": self.config_hash, **payload}
        return self.text(name, json.dumps(body, indent=2, sort_keys=True, default=_jsonable) + "\n")

    def table(self, name: str, header, rows) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        return self.text(name, buf.getvalue())


def _jsonable(v):
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, complex):
        return [v.real, v.imag]
    raise TypeError(f"not serialisable: {type(v).__name__}")


def config_hash(config: dict) -> str:
    text = json.dumps(config, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(text.encode()).hexdigest()[:16]


# ---------------------------------------------------------------- config

def load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    return cfg


def _family(cfg: dict) -> pot.PotentialFamily:
    d = cfg.get("family", {"kind": "semicircle"})
    if not isinstance(d, dict):
        raise ConfigError("family must be an object")
    try:
        return pot.family_from_dict(d)
    except (pot.FamilyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid family: {exc}") from None


def _int(cfg, key, default, lo=0):
    v = cfg.get(key, default)
    if isinstance(v, bool) or not isinstance(v, int) or v < lo:
        raise ConfigError(f"{key} must be an integer >= {lo}")
    return v


def _points(spec, default):
    spec = default if spec is None else spec
    if isinstance(spec, dict):
        try:
            return np.linspace(float(spec["start"]), float(spec["stop"]), int(spec["num"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad range {spec!r}: {exc}") from None
    try:
        arr = np.atleast_1d(np.asarray(spec, dtype=float))
    except (TypeError, ValueError):
        raise ConfigError(f"bad point list {spec!r}") from None
    if arr.size == 0 or not np.all(np.isfinite(arr)):
        raise ConfigError("point lists must be nonempty and finite")
    return arr


def _times(cfg):
    raw = cfg.get("times", [[]])
    try:
        return [en.MultiTime(times=tuple(float(v) for v in t)) for t in raw]
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad times: {exc}") from None


def _policy(cfg, args) -> en.EvaluationPolicy:
    opts = dict(cfg.get("policy", {}))
    if args.precision_bits is not None:
        opts["precision_bits"] = args.precision_bits
    try:
        return en.EvaluationPolicy(**opts)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad policy: {exc}") from None


def _regions(cfg):
    r = cfg.get("region", "interior")
    if r == "interior":
        return cv.HIROTA_INTERIOR
    if r == "exterior":
        return cv.HIROTA_EXTERIOR
    try:
        out = tuple((float(a), float(b)) for a, b in r)
    except (TypeError, ValueError):
        raise ConfigError(f"bad region {r!r}") from None
    if not out or any(a >= b for a, b in out):
        raise ConfigError("regions need lo < hi")
    return out


# ------------------------------------------------------------ experiments

def run_spectrum(cfg, args, out: Writer) -> str:
    fam, N = _family(cfg), _int(cfg, "N", 2)
    try:
        spec = sc.spectral_data(fam, N)
    except sc.ScatteringError as exc:
        raise ComputeError(str(exc)) from None
    out.report("spectrum.json", {"experiment": "spectrum", **spec.to_dict(),
                                 "quantization_residual": sc.quantization_residual(spec) if N else 0.0,
                                 "trace_l2": sc.trace_l2(spec) if N else 0.0})
    return f"spectrum: {fam.kind} N={N} eps={spec.epsilon:.6g} s_tilde[:3]={spec.s_tilde[:3].tolist()}"


def _grid_run(cfg, args, out: Writer, name: str, default_x) -> str:
    fam, N = _family(cfg), _int(cfg, "N", 2)
    xs = _points(cfg.get("x"), default_x)
    spec = sc.spectral_data(fam, N)
    grid = en.evaluate_grid(spec, xs, _times(cfg), _policy(cfg, args), workers=args.threads)
    failed = sum(not s.ok for s in grid.samples)
    grid.metadata.update(config_hash=out.config_hash, failed=failed)
    out.text(f"{name}.csv", grid.to_csv())
    out.report(f"{name}.json", {"experiment": name, "metadata": grid.metadata,
                                "failed": failed > 0})
    if failed:
        raise ComputeError(f"{failed} of {len(grid.samples)} samples failed; see {name}.csv")
    peak = max(abs(s.psi) for s in grid.samples)
    return f"{name}: {fam.kind} N={N} {len(grid.samples)} samples, max|psi|={peak:.6g}"


def run_evaluate(cfg, args, out):
    return _grid_run(cfg, args, out, "evaluate", [0.0])


def run_grid(cfg, args, out):
    return _grid_run(cfg, args, out, "grid", {"start": -1.0, "stop": 1.0, "num": 101})


def run_focus(cfg, args, out: Writer) -> str:
    fam = _family(cfg)
    N, K = _int(cfg, "N", 10, lo=1), cfg.get("K", -1)
    if not isinstance(K, int):
        raise ConfigError("K must be an integer")
    try:
        ev = fo.focus_point(fam, K, N)
        mix = None
        if "alpha" in cfg:
            mix = fo.mixture_coefficients(fam, K, float(cfg["alpha"]))
    except fo.FocusError as exc:
        raise ConfigError(str(exc)) from None
    hw, pts = float(cfg.get("half_width", 3.0)), _int(cfg, "points", 41, lo=2)
    spec = sc.spectral_data(fam, N)
    policy = _policy(cfg, args)
    grid, samples = fo.window_grid(spec, ev, hw, pts, mix, policy=policy, workers=args.threads)
    rep = fo.peak_check(spec, ev, hw, pts, mix, policy=policy, workers=args.threads)
    rows = []
    k = 0
    for X in grid:
        for T in grid:
            s = samples[k]
            k += 1
            rows.append([repr(float(X)), repr(float(T)), repr(s.psi.real), repr(s.psi.imag),
                         repr(abs(s.psi)), s.formulation if s.ok else f"failed:{s.error}"])
    out.table("focus_window.csv", ["X", "T", "re_psi", "im_psi", "abs_psi", "formulation"], rows)
    body = {"experiment": "focus", "family": fam.to_dict(), "K": K, "x0": ev.x0,
            "t0": list(ev.t0), "nu": ev.nu, "epsilon": ev.epsilon, "r": rep.r,
            "argmax": list(rep.argmax), "phase_error": rep.phase_error,
            "max_abs": rep.max_abs, "failed": rep.failures > 0}
    if mix is not None:
        body["mixture"] = {"a": list(mix.a), "alpha": mix.alpha, "t_focus": mix.t_focus}
    out.report("focus.json", body)
    if rep.failures:
        raise ComputeError(f"{rep.failures} window samples failed")
    return f"focus: {fam.kind} K={K} N={N} r={rep.r:.6f} argmax={rep.argmax}"


def run_converge(cfg, args, out: Writer) -> str:
    fam = _family(cfg)
    Ns = cfg.get("Ns", [20, 30, 40])
    if not isinstance(Ns, list) or len(Ns) < 3 or any(not isinstance(n, int) or n < 1 for n in Ns):
        raise ConfigError("Ns must list at least three positive integers")
    try:
        rep = cv.converge_fit(fam, Ns, _regions(cfg), _policy(cfg, args),
                              per_eps=float(cfg.get("per_eps", 8.0)))
    except (en.EvaluationError, ValueError, ZeroDivisionError) as exc:
        raise ComputeError(f"fit aborted: {exc}") from None
    out.table("converge.csv", ["N", "epsilon", "sup_error", "argmax"],
              [[n, repr(e), repr(v), repr(x)] for n, (e, v), x in zip(Ns, rep.samples, rep.argmax)])
    out.report("converge.json", {"experiment": "converge", "family": fam.to_dict(), "Ns": Ns,
                                 "region": cfg.get("region", "interior"), **rep.to_dict()})
    return f"converge: {fam.kind} Ns={Ns} exponent={rep.exponent:.4f}"


def run_dispersionless(cfg, args, out: Writer) -> str:
    mode = args.mode or cfg.get("mode", "talanov")
    try:
        if mode == "talanov":
            p = dl.TalanovParams.from_amplitude(float(cfg.get("A_max", 1.0)), float(cfg.get("w0", 0.5)))
            dur = dl.talanov_duration(p)
            ts = _points(cfg.get("t"), {"start": 0.0, "stop": 0.45 * dur, "num": 5})
            xs = _points(cfg.get("x"), {"start": -p.w0, "stop": p.w0, "num": 41})
            rows = []
            for t in ts:
                rho, mu = dl.talanov_profile(p, xs, t)
                rows += [[repr(float(x)), repr(float(t)), repr(float(r)), repr(float(m))]
                         for x, r, m in zip(xs, rho, mu)]
            out.table("talanov.csv", ["x", "t", "rho", "mu"], rows)
            out.report("talanov.json", {"experiment": "dispersionless", "mode": mode,
                                        "A_max": p.A_max, "w0": p.w0, "E": p.E, "F": p.F,
                                        "delta_t": dur, "collapse_time": dur / 2})
            return f"dispersionless talanov: delta_t={dur:.12g}"
        if mode == "ask":
            A = float(cfg.get("A_max", 1.0))
            ts = _points(cfg.get("t"), {"start": 0.0, "stop": 0.45 / A, "num": 4})
            xs = _points(cfg.get("x"), {"start": -2.0, "stop": 2.0, "num": 41})
            rows, worst = [], 0.0
            for t in ts:
                for x in xs:
                    st = dl.ask_solve(A, float(x), float(t))
                    worst = max(worst, st.residual)
                    rows.append([repr(st.x), repr(st.t), repr(st.rho), repr(st.mu)])
            out.table("ask.csv", ["x", "t", "rho", "mu"], rows)
            out.report("ask.json", {"experiment": "dispersionless", "mode": mode, "A_max": A,
                                    "max_residual": worst, "catastrophe_time": 1 / (2 * A)})
            return f"dispersionless ask: {len(rows)} points, max residual {worst:.2e}"
        if mode == "interpolation":
            ds = _points(cfg.get("delta"), {"start": 0.0, "stop": 1.0, "num": 11})
            cats = [dl.interpolation_catastrophe(float(d)) for d in ds]
            out.table("interpolation.csv", ["delta", "rho_c", "t_c", "collapse"],
                      [[repr(c.delta), repr(c.rho_c), repr(c.t_c), int(c.collapse)] for c in cats])
            out.report("interpolation.json", {"experiment": "dispersionless", "mode": mode,
                                              "table": [c.__dict__ for c in cats]})
            return f"dispersionless interpolation: {len(cats)} rows"
    except dl.DispersionlessError as exc:
        raise ComputeError(str(exc)) from None
    raise ConfigError(f"unknown dispersionless mode {mode!r}")


def run_acceptance(cfg, args, out: Writer) -> str:
    from . import acceptance as ac
    only = cfg.get("criteria")
    if only is not None and (not isinstance(only, list) or any(k not in ac.CRITERIA for k in only)):
        raise ConfigError(f"criteria must be a list drawn from {sorted(ac.CRITERIA)}")
    results = []
    for r in ac.run_all(seed=args.seed, only=only, workers=args.threads):
        print(r.line(), flush=True)
        results.append(r)
    out.report("acceptance.json", {"experiment": "acceptance", "seed": args.seed,
                                   "results": [r.__dict__ for r in results]})
    failed = [r.number for r in results if not r.passed]
    if failed:
        raise ComputeError(f"criteria failed: {failed}")
    return f"acceptance: {len(results)} criteria passed"


RUNNERS = {"spectrum": run_spectrum, "evaluate": run_evaluate, "grid": run_grid,
           "focus": run_focus, "converge": run_converge, "dispersionless": run_dispersionless,
           "acceptance": run_acceptance}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--out", default="out", help="output directory (default ./out)")
    common.add_argument("--threads", type=int, default=1, help="worker processes for grids")
    common.add_argument("--precision-bits", type=int, default=None,
                        help="fixed working precision, overriding automatic escalation")
    common.add_argument("--seed", type=int, default=0, help="seed for randomised suites")
    parser = argparse.ArgumentParser(prog="semiclassical-ensembles", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name == "dispersionless":
            p.add_argument("mode", nargs="?", choices=("talanov", "ask", "interpolation"))
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and 2
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return 2
    try:
        cfg = load_config(args.config)
        out = Writer(args.out, cfg)
        print(RUNNERS[args.command](cfg, args, out))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ComputeError as exc:
        print(f"computation failed: {exc}", file=sys.stderr)
        return 1
    except (en.EvaluationError, sc.ScatteringError, ArithmeticError) as exc:
        print(f"computation failed: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
