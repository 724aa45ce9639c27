import numpy as np
import pytest

from sasaki3 import _jetcore_py, jets
from sasaki3.eta_einstein import family_structure
from sasaki3.fields import MetricEvaluator

try:
    from sasaki3 import _jetcore as _compiled
except ImportError:  # pragma: no cover
    _compiled = None

BACKENDS = {"python": _jetcore_py}
if _compiled is not None:
    BACKENDS["compiled"] = _compiled

FAMILY_GRID = [-3.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 3.0]


@pytest.fixture(params=sorted(BACKENDS))
def backend(request):
    """Run a test once per available jet kernel."""
    saved = jets._core
    jets._core = BACKENDS[request.param]
    yield request.param
    jets._core = saved


_families = {}


def family(W):
    if W not in _families:
        _families[W] = family_structure(W)
    return _families[W]


@pytest.fixture(scope="session")
def nil():
    return family(0.0)


@pytest.fixture(scope="session")
def round_s3():
    return family(2.0)


@pytest.fixture(scope="session")
def sl2():
    return family(-2.0)


def generic_metric():
    """A non-Sasakian metric with every component non-trivial."""
    J = jets

    def g(x, y, z):
        return [[2 + J.sin(x * y) + z * z, 0.3 * J.cos(z), 0.1 * x * z],
                [0.3 * J.cos(z), 1.5 + y * y * x, 0.2 * J.exp(0.2 * y)],
                [0.1 * x * z, 0.2 * J.exp(0.2 * y), 1 + 0.5 * J.sin(x + y + z) ** 2]]

    return MetricEvaluator.from_coordinates(g)


def fd_partial(f, x, alpha, h=1e-4):
    """Central finite difference of ``d^alpha f`` at ``x`` (|alpha| <= 2)."""
    x = np.asarray(x, dtype=float)
    idx = [i for i, a in enumerate(alpha) for _ in range(a)]
    if len(idx) == 0:
        return f(x)
    if len(idx) == 1:
        e = np.eye(len(x))[idx[0]] * h
        return (f(x + e) - f(x - e)) / (2 * h)
    ei, ej = np.eye(len(x))[idx[0]] * h, np.eye(len(x))[idx[1]] * h
    return (f(x + ei + ej) - f(x + ei - ej) - f(x - ei + ej) + f(x - ei - ej)) / (4 * h * h)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.write_sep("-", "acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if results[n] else 'FAIL'}")
