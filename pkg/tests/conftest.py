import json
import pathlib

import numpy as np
import pytest
from hypothesis import strategies as st

from singpert.measure import Measure, Piece

HERE = pathlib.Path(__file__).parent
FIXTURES = HERE / "fixtures"
GOLDEN = HERE / "golden"

# lines printed by tests/test_acceptance.py, echoed in the terminal summary
ACCEPTANCE_LINES = {}


def load_fixture(name):
    return Measure.from_json((FIXTURES / f"{name}.json").read_text())


@pytest.fixture(scope="session")
def closed_forms():
    return json.loads((GOLDEN / "closed_forms.json").read_text())


@pytest.fixture(scope="session")
def delta0():
    return load_fixture("delta0")


@pytest.fixture(scope="session")
def two_atoms():
    return load_fixture("two_atoms")


@pytest.fixture(scope="session")
def uniform01():
    return load_fixture("uniform01")


# --- hypothesis strategies ----------------------------------------------------

finite = st.floats(-5.0, 5.0, allow_nan=False)
weights = st.floats(1e-3, 2.0, allow_nan=False)


@st.composite
def atomic_measures(draw, min_atoms=1, max_atoms=8):
    k = draw(st.integers(min_atoms, max_atoms))
    xs = draw(st.lists(finite, min_size=k, max_size=k, unique=True))
    ws = draw(st.lists(weights, min_size=k, max_size=k))
    return Measure(list(zip(xs, ws)))


@st.composite
def linear_pieces(draw):
    """Nonnegative density u + v (x - a) on [a, b]."""
    a = draw(st.floats(-4.0, 3.0))
    length = draw(st.floats(0.1, 2.0))
    u = draw(st.floats(0.0, 2.0))
    v = draw(st.floats(0.0, 2.0))
    return Piece(a, a + length, (u - v * a, v))


@st.composite
def mixed_measures(draw):
    atoms = draw(atomic_measures(min_atoms=0, max_atoms=4))
    pieces = draw(st.lists(linear_pieces(), min_size=0, max_size=2))
    m = Measure(atoms.atoms, pieces)
    if m.is_zero():
        m = Measure([(0.0, 1.0)], pieces)
    return m


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[key])


def np_close(a, b, tol):
    return np.allclose(np.asarray(a, float), np.asarray(b, float), rtol=0, atol=tol)
