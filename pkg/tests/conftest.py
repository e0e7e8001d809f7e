import itertools
import json
import math

import numpy as np
import pytest
from hypothesis import strategies as st

from app.business.presentation import MonoidPresentation, fibonacci, free_monoid
from app.business.sft import SftRules, full_shift

EXAMPLE_A = [[0, 1, 1], [0, 0, 1], [1, 1, 1]]
RHO_A = float(max(np.roots([1, -1, -2, -1]).real))
PHI = (1 + math.sqrt(5)) / 2


@pytest.fixture
def example():
    return MonoidPresentation.from_matrix(EXAMPLE_A)


@pytest.fixture
def fib():
    return fibonacci()


@pytest.fixture
def free2():
    return free_monoid(2)


@pytest.fixture
def full2():
    return lambda d: full_shift(d, 2)


@pytest.fixture
def write_problem(tmp_path):
    def _write(payload, name="problem.json"):
        path = tmp_path / name
        path.write_text(payload if isinstance(payload, str) else json.dumps(payload))
        return str(path)

    return _write


def finite_presentations(d):
    """Every d x d binary matrix whose non-free part is nilpotent."""
    from app.business.cayley import is_finite_representation

    for bits in itertools.product((0, 1), repeat=d * d):
        p = MonoidPresentation(d=d, A=np.array(bits).reshape(d, d).tolist())
        if is_finite_representation(p):
            yield p


@st.composite
def presentations(draw, max_d=3):
    d = draw(st.integers(1, max_d))
    bits = draw(st.lists(st.integers(0, 1), min_size=d * d, max_size=d * d))
    return MonoidPresentation(d=d, A=[bits[i * d:(i + 1) * d] for i in range(d)])


@st.composite
def finite_presentations_st(draw, max_d=3):
    """Upper-triangular non-free part plus at least one all-ones row."""
    d = draw(st.integers(1, max_d))
    free = draw(st.sets(st.integers(0, d - 1), min_size=1))
    rows = []
    for i in range(d):
        if i in free:
            rows.append([1] * d)
        else:
            row = [draw(st.integers(0, 1)) if (j in free or j > i) else 0 for j in range(d)]
            rows.append(row)
    return MonoidPresentation(d=d, A=rows)


@st.composite
def rules_for(draw, d, max_k=3):
    k = draw(st.integers(1, max_k))
    bits = draw(st.lists(st.integers(0, 1), min_size=d * k * k, max_size=d * k * k))
    matrices = [[bits[(l * k + i) * k:(l * k + i + 1) * k] for i in range(k)] for l in range(d)]
    return SftRules(k=k, rules=matrices)
