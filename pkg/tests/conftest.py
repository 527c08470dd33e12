import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from varmono.core import WeightedSample

settings.register_profile("default", deadline=None, max_examples=200,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion():
    """Record one pass/fail line per acceptance criterion for the terminal summary."""

    def record(label: str, ok: bool, detail: str = "") -> bool:
        _ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  {label}  {detail}".rstrip())
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def sample_strategy(min_n=1, max_n=12, lo=0.0, hi=1e6, signed=False, allow_zero=True):
    """Weighted samples with values in [lo, hi] (optionally with random signs)."""
    value = st.floats(min_value=lo, max_value=hi, allow_nan=False, allow_infinity=False)
    if not allow_zero:
        value = value.filter(lambda v: v > 0)
    if signed:
        value = st.tuples(value, st.booleans()).map(lambda p: -p[0] if p[1] and p[0] != 0 else p[0])
    weight = st.floats(min_value=1e-3, max_value=1.0)

    @st.composite
    def build(draw):
        n = draw(st.integers(min_n, max_n))
        values = draw(st.lists(value, min_size=n, max_size=n))
        weights = draw(st.one_of(st.none(), st.lists(weight, min_size=n, max_size=n)))
        return WeightedSample(values, weights)

    return build()


def as_array(x):
    return np.asarray(x, dtype=np.float64)
