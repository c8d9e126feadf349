import numpy as np
import pytest
from hypothesis import settings

from enrk import get_model

# reproducible example generation across runs
settings.register_profile("repro", derandomize=True, deadline=None)
settings.load_profile("repro")

MODEL_NAMES = ["predator_prey", "vaccination", "keymer", "amarasekare"]
POSITIVE_RADIUS_METHODS = ["euler", "rk2", "rk43", "rk54"]
ALL_METHODS = POSITIVE_RADIUS_METHODS + ["rk4classic"]


def sample_states(name, m, n, rng):
    """Random states from each model's positively invariant region."""
    if name == "predator_prey":
        return rng.uniform(0.0, 10.0, size=(n, 2))
    if name == "vaccination":
        return m.params["N"] * rng.dirichlet(np.ones(3), size=n)
    return rng.dirichlet(np.ones(m.dim), size=n)


@pytest.fixture(scope="session")
def models():
    return {name: get_model(name) for name in MODEL_NAMES}


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# -- acceptance reporting ----------------------------------------------------

_ACCEPTANCE = {}


@pytest.fixture
def acceptance_record():
    """Collects ``(criterion, ok, detail)`` lines for the terminal summary."""

    def record(number, title, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} -- {detail}"
        _ACCEPTANCE[number] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        terminalreporter.write_line(_ACCEPTANCE[number])
