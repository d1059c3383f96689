import numpy as np
import pytest
from hypothesis import settings
from hypothesis import strategies as st

from cogrelay.channel import SystemConfig

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


def crandn(rng, *shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def cvecs(dim, lo=-3.0, hi=3.0):
    """Hypothesis strategy for complex vectors of length ``dim``."""
    part = st.floats(lo, hi, allow_nan=False, allow_infinity=False)
    return st.lists(st.tuples(part, part), min_size=dim, max_size=dim).map(
        lambda xs: np.array([complex(a, b) for a, b in xs]))


@pytest.fixture
def cfg():
    return SystemConfig()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one "criterion N: PASS|FAIL ..." line per acceptance check, echoed after the run
ACCEPTANCE = []


def record(criterion: int, ok: bool, detail: str) -> bool:
    ACCEPTANCE.append(f"criterion {criterion:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split(":")[0].split()[1])):
            terminalreporter.write_line(line)
