import numpy as np
import pytest

from nonlocal_fronts import KernelSpec, ReactionSpec


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def alg1():
    return KernelSpec.algebraic(1.0)


@pytest.fixture
def wd():
    return ReactionSpec.weakly_degenerate(1.0, 1.0)


def pytest_terminal_summary(terminalreporter):
    """Repeat the acceptance criteria lines at the end of the run."""
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        terminalreporter.write_line(results[number])
    missing = sorted(set(range(1, 11)) - set(results))
    if missing:
        terminalreporter.write_line(f"not run: criteria {', '.join(map(str, missing))}")
