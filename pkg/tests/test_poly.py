from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from feikit.errors import BadParams
from feikit.poly import SparsePolynomial

import oracles


@st.composite
def polys(draw, max_n=5):
    n = draw(st.integers(0, max_n))
    terms = draw(st.dictionaries(st.integers(0, (1 << n) - 1),
                                 st.fractions(min_value=-3, max_value=3, max_denominator=12), max_size=6))
    return SparsePolynomial(n, terms)


@given(polys())
def test_evaluate_matches_definition(p):
    vals = p.values()
    for x in range(1 << p.n):
        want = sum((c * oracles.chi(s, x) for s, c in p.terms.items()), Fraction(0))
        assert p.evaluate(x) == want
        assert vals[x] == pytest.approx(float(want))
    assert p.evaluate(oracles.coords(p.n, 0)) == p.evaluate(0)


@given(polys(max_n=3), polys(max_n=3))
def test_arithmetic(p, q):
    if p.n != q.n:
        with pytest.raises(BadParams):
            p + q
        return
    for x in range(1 << p.n):
        assert (p + q).evaluate(x) == p.evaluate(x) + q.evaluate(x)
        assert (p - q).evaluate(x) == p.evaluate(x) - q.evaluate(x)
    assert (p - p).terms == {}


@given(polys())
def test_json_round_trip(p):
    again = SparsePolynomial.from_json(p.to_json())
    assert again.n == p.n
    for s, c in p.terms.items():
        assert float(again.terms[s]) == pytest.approx(float(c))


def test_properties():
    p = SparsePolynomial(3, {0b011: Fraction(1, 2), 0b100: -0.25, 0b001: 0})
    assert p.degree == 2 and p.sparsity == 2 and p.spectral_norm == 0.75 and not p.is_exact
    assert p.pruned(0.3).terms == {0b011: Fraction(1, 2)}
    assert np.array_equal(SparsePolynomial.from_dense(2, [0, 1e-15, 0.5, 0]).dense(), [0, 0, 0.5, 0])
    with pytest.raises(BadParams):
        SparsePolynomial(2, {4: 1})
    with pytest.raises(BadParams):
        SparsePolynomial.from_json({"n": 1, "terms": [{"mask": 0, "coeff": True}]})
