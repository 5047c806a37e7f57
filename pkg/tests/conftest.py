import pytest

from semiclassical_ensembles import potentials as pot


@pytest.fixture(scope="session")
def semicircle():
    return pot.make_semicircle(1.0, -0.5, 0.5)


@pytest.fixture(scope="session")
def hirota():
    return pot.make_hirota(1.0, -0.5, 0.5, 2 / 3)


@pytest.fixture(scope="session")
def lpd():
    return pot.make_lpd(1.0, -0.5, 0.5, 4 / 7)


@pytest.fixture(scope="session")
def named_families(semicircle, hirota, lpd):
    return {"semicircle": semicircle, "hirota": hirota, "lpd": lpd}


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", [])
    if results:
        terminalreporter.section("acceptance criteria")
        for r in sorted(results, key=lambda r: r.number):
            terminalreporter.write_line(r.line())
