import csv
import json
import math

import pytest

from semiclassical_ensembles import __version__
from semiclassical_ensembles import cli


def run(tmp_path, command, config=None, *extra):
    argv = [*command.split()]
    if config is not None:
        path = tmp_path / "config.json"
        path.write_text(json.dumps(config))
        argv += ["--config", str(path)]
    out = tmp_path / "out"
    return cli.main(argv + ["--out", str(out), *extra]), out


def test_spectrum_report(tmp_path):
    code, out = run(tmp_path, "spectrum", {"family": {"kind": "semicircle", "A_max": 1,
                                                      "X_minus": -0.5, "X_plus": 0.5}, "N": 2})
    assert code == 0
    rep = json.loads((out / "spectrum.json").read_text())
    assert rep["s_tilde"] == pytest.approx([math.sqrt(3) / 2, 0.5], abs=1e-14)
    assert rep["tool_version"] == __version__ and len(rep["config_hash"]) == 16


def test_evaluate_empty_ensemble(tmp_path):
    code, out = run(tmp_path, "evaluate", {"N": 0, "x": [0.0, 0.25, 1.0]})
    assert code == 0
    rows = list(csv.DictReader((out / "evaluate.csv").open()))
    assert len(rows) == 3 and all(float(r["abs_psi"]) == 0.0 for r in rows)


def test_grid_is_reproducible(tmp_path):
    cfg = {"N": 3, "x": {"start": -0.5, "stop": 0.5, "num": 4}, "times": [[0.0], [0.1, 0.02]]}
    code, out = run(tmp_path, "grid", cfg)
    first = (out / "grid.csv").read_bytes(), (out / "grid.json").read_bytes()
    code2, out = run(tmp_path, "grid", cfg, "--threads", "2")
    assert code == code2 == 0
    assert ((out / "grid.csv").read_bytes(), (out / "grid.json").read_bytes()) == first
    header = (out / "grid.csv").read_text().splitlines()[0]
    assert header.startswith("x,t2,t3,re_psi,im_psi,abs_psi")
    assert not list(out.glob(".*"))  # no temporary files left behind


def test_talanov_duration(tmp_path):
    code, out = run(tmp_path, "dispersionless talanov", {"A_max": 1, "w0": 0.5})
    assert code == 0
    rep = json.loads((out / "talanov.json").read_text())
    assert rep["delta_t"] == pytest.approx(math.pi / 4, abs=1e-12)
    assert (out / "talanov.csv").read_text().startswith("x,t,rho,mu")


def test_dispersionless_tables(tmp_path):
    code, out = run(tmp_path, "dispersionless interpolation", {"delta": [0.0, 1.0]})
    assert code == 0
    rows = list(csv.DictReader((out / "interpolation.csv").open()))
    assert float(rows[1]["rho_c"]) == pytest.approx(0.5) and float(rows[1]["t_c"]) == pytest.approx(1.0)
    code, out = run(tmp_path, "dispersionless", {"mode": "ask", "x": [0.0, 1.0], "t": [0.1]})
    assert code == 0 and json.loads((out / "ask.json").read_text())["max_residual"] < 1e-10


def test_focus_report(tmp_path):
    code, out = run(tmp_path, "focus", {"N": 4, "K": -1, "points": 5})
    assert code == 0
    rep = json.loads((out / "focus.json").read_text())
    for key in ("family", "K", "x0", "t0", "nu", "epsilon", "r", "argmax", "phase_error"):
        assert key in rep
    assert rep["nu"] == pytest.approx(1 / 12)
    assert len((out / "focus_window.csv").read_text().splitlines()) == 26


def test_converge_small(tmp_path):
    cfg = {"family": {"kind": "hirota", "A_max": 1, "X_minus": -0.5, "X_plus": 0.5, "xi": 2 / 3},
           "Ns": [4, 5, 6], "region": [[-0.3, 0.3]], "per_eps": 2}
    code, out = run(tmp_path, "converge", cfg)
    assert code == 0
    rep = json.loads((out / "converge.json").read_text())
    assert math.isfinite(rep["exponent"]) and len(rep["samples"]) == 3


@pytest.mark.parametrize("cfg", [{"family": {"kind": "bogus"}}, {"N": -1}, {"N": "three"},
                                 {"Ns": [10, 20]}, {"family": {"kind": "hirota", "A_max": 1}}])
def test_config_errors_exit_2(tmp_path, cfg):
    command = "converge" if "Ns" in cfg else "spectrum"
    assert run(tmp_path, command, cfg)[0] == 2


def test_unreadable_config_exit_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert cli.main(["spectrum", "--config", str(bad), "--out", str(tmp_path)]) == 2
    assert cli.main(["spectrum", "--config", str(tmp_path / "missing.json")]) == 2
    assert cli.main(["nonsense"]) == 2


def test_computation_failure_exit_1(tmp_path):
    code, _ = run(tmp_path, "dispersionless talanov", {"A_max": 1, "w0": 0.5, "t": [0.5]})
    assert code == 1


def test_failed_grid_is_flagged(tmp_path):
    cfg = {"N": 20, "x": [0.45], "policy": {"max_bits": 40, "min_bits": 32, "extra_bits": 0,
                                           "rel_tol": 1e-6}}
    code, out = run(tmp_path, "evaluate", cfg)
    assert code == 1
    assert json.loads((out / "evaluate.json").read_text())["failed"] is True
    assert "failed:" in (out / "evaluate.csv").read_text()


def test_precision_override(tmp_path):
    code, out = run(tmp_path, "evaluate", {"N": 3, "x": [0.1]}, "--precision-bits", "300")
    assert code == 0
    row = next(csv.DictReader((out / "evaluate.csv").open()))
    assert row["precision_bits"] == "300"


def test_acceptance_subset(tmp_path, capsys):
    code, out = run(tmp_path, "acceptance", {"criteria": [1, 2]}, "--seed", "7")
    assert code == 0
    assert capsys.readouterr().out.count("[PASS]") == 2
    assert json.loads((out / "acceptance.json").read_text())["seed"] == 7
