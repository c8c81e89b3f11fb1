import numpy as np
import pytest
from hypothesis import strategies as st

from mpccdlt.core import NormalizedPlatform

ACCEPTANCE = []


def record_criterion(number, title, ok, detail=""):
    ACCEPTANCE.append((number, title, ok, detail))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, ok, detail in sorted(ACCEPTANCE):
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"[{status}] {number:>2}. {title}  {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


w_values = st.floats(0.02, 0.08)
z_values = st.floats(0.01, 0.06)


@st.composite
def platforms(draw, min_children=0, max_children=13, z=z_values):
    n = draw(st.integers(min_children, max_children))
    children = tuple((draw(w_values), draw(z)) for _ in range(n))
    return NormalizedPlatform(draw(w_values), children)


def random_platform(rng, n=None, max_children=13, w=(0.02, 0.08), z=(0.01, 0.06)):
    if n is None:
        n = int(rng.integers(0, max_children + 1))
    children = tuple((rng.uniform(*w), rng.uniform(*z)) for _ in range(n))
    return NormalizedPlatform(rng.uniform(*w), children)
