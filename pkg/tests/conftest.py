import numpy as np
import pytest

from qoracle.boolean import F2Polynomial, TruthTable


def table_from_rows(rows, n):
    """Rows given as output strings in natural input order."""
    cols = np.array([[int(r[c]) for r in rows] for c in range(len(rows[0]))], dtype=np.uint8)
    return TruthTable(n, cols)


# f0 = x0x2 + x0 + x1 + x2, f1 = x0x1 + x0x2 + x1 + x2 + 1, f2 = x0x1x2
RAW_POLYS = (
    F2Polynomial.from_terms([[0, 2], [0], [1], [2]]),
    F2Polynomial.from_terms([[0, 1], [0, 2], [1], [2], []]),
    F2Polynomial.from_terms([[0, 1, 2]]),
)


def poly_table(polys, n):
    cols = [p.truth_column(range(n)) for p in polys]
    return TruthTable(n, np.array(cols))


@pytest.fixture
def cse_example_table():
    return poly_table(RAW_POLYS, 3)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
