import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from feikit import BooleanFunction, construct, inverse_wht, kkl_ratio, measures, tensor, tensor_power, wht
from feikit.core import (FourierSpectrum, butterfly, influences_exact, min_entropy, renyi_entropy,
                         shannon_entropy, total_influence_exact, variance_exact)
from feikit.certificates import sensitivity
from feikit.errors import BadParams, ConstantFunction, NotBooleanValued, SizeLimit
from feikit.io import format_truth_table, parse_truth_table

import oracles
from strategies import functions

AND2 = construct("and", n=2)


def test_and2_table_convention():
    # TRUE is -1 and only the all-TRUE input is TRUE
    assert AND2.values.tolist() == [1, 1, 1, -1]
    assert AND2((-1, -1)) == -1 and AND2((1, -1)) == 1


def test_spectrum_examples():
    assert wht(construct("constant", n=3)).coeffs.tolist() == [8] + [0] * 7
    assert wht(construct("parity", n=2)).coeffs.tolist() == [0, 0, 0, 4]
    assert wht(AND2).coeffs.tolist() == [2, 2, 2, -2]
    d = wht(construct("dictator", n=3, i=0)).coeffs.tolist()
    assert d == [0, 8, 0, 0, 0, 0, 0, 0]


def test_majority_and_bent():
    c = wht(construct("majority", n=3)).coeffs
    # (x1 + x2 + x3 - x1 x2 x3) / 2 scaled by 8
    assert c.tolist() == [0, 4, 4, 0, 4, 0, 0, -4]
    ip = wht(construct("inner_product", n=4)).coeffs
    assert np.all(np.abs(ip) == 4)


def test_inverse_examples():
    assert inverse_wht(FourierSpectrum(2, [2, 2, 2, -2])) == AND2
    assert inverse_wht(FourierSpectrum(2, [4, 0, 0, 0])) == construct("constant", n=2)
    with pytest.raises(NotBooleanValued):
        inverse_wht(FourierSpectrum(2, [2, 2, 2, 2]))


@given(functions(max_n=6))
def test_wht_matches_direct_summation(f):
    assert wht(f).coeffs.tolist() == oracles.fourier(f)


@given(functions(max_n=8))
def test_round_trip_parseval_granularity(f):
    s = wht(f)
    assert inverse_wht(s) == f
    assert s.parseval_ok() and s.granularity_ok()


@given(st.integers(1, 4), st.data())
def test_butterfly_batches_rows_independently(n, data):
    rows = data.draw(st.lists(st.lists(st.integers(-5, 5), min_size=1 << n, max_size=1 << n), min_size=1, max_size=4))
    a = np.array(rows, dtype=np.int64)
    out = butterfly(a)
    for r, o in zip(a, out):
        assert o.tolist() == butterfly(r).tolist()
    assert np.array_equal(butterfly(out), a * (1 << n))


def test_measure_examples():
    m = measures(wht(construct("parity", n=3)))
    assert (m.shannon_entropy, m.min_entropy, m.total_influence, m.variance) == (0.0, 0.0, 3.0, 1.0)
    m = measures(wht(AND2))
    assert m.shannon_entropy == pytest.approx(2.0) and m.min_entropy == pytest.approx(2.0)
    assert m.total_influence == 1.0 and m.variance == 0.75 and m.spectral_norm == 2.0
    m = measures(wht(construct("majority", n=3)))
    assert m.shannon_entropy == pytest.approx(2.0)
    assert m.total_influence == 1.5 and m.per_coordinate_influence == (0.5, 0.5, 0.5)


@settings(max_examples=60)
@given(functions(max_n=5))
def test_measures_against_oracle(f):
    s = wht(f)
    assert shannon_entropy(s) == pytest.approx(oracles.entropy(f), abs=1e-12)
    assert min_entropy(s) == pytest.approx(oracles.min_entropy(f), abs=1e-12)
    assert influences_exact(s) == [oracles.influence(f, i) for i in range(f.n)]
    assert total_influence_exact(s) == oracles.total_influence(f)
    assert sensitivity(f)[1] == total_influence_exact(s)
    assert variance_exact(s) <= total_influence_exact(s)


@given(functions(max_n=6))
def test_entropy_chain(f):
    s = wht(f)
    h_inf, h, h_half, h0 = min_entropy(s), shannon_entropy(s), renyi_entropy(s, 0.5), renyi_entropy(s, 0)
    assert h_inf <= h + 1e-9 <= h_half + 2e-9 <= h0 + 3e-9
    assert renyi_entropy(s, 1) == pytest.approx(h)
    assert renyi_entropy(s, math.inf) == pytest.approx(h_inf)


def test_tensor_examples():
    and2 = AND2
    assert tensor(and2, construct("constant", n=1)).n == 3
    assert shannon_entropy(wht(tensor(and2, construct("constant", n=1)))) == pytest.approx(2.0)
    assert shannon_entropy(wht(tensor(and2, and2))) == pytest.approx(4.0)
    d = construct("dictator", n=1, i=0)
    assert tensor(d, d) == construct("parity", n=2)


@settings(max_examples=40)
@given(functions(max_n=3), functions(max_n=3))
def test_tensor_entropy_additive(f, g):
    h = tensor(f, g)
    assert shannon_entropy(wht(h)) == pytest.approx(shannon_entropy(wht(f)) + shannon_entropy(wht(g)), abs=1e-9)
    assert total_influence_exact(wht(h)) == total_influence_exact(wht(f)) + total_influence_exact(wht(g))


def test_tensor_power_size():
    assert tensor_power(AND2, 3).n == 6
    with pytest.raises(BadParams):
        tensor_power(AND2, 0)
    with pytest.raises(SizeLimit):
        tensor_power(construct("and", n=5), 5)


def test_constructors():
    assert construct("or", n=2).values.tolist() == [1, -1, -1, -1]
    t = construct("tribes", w=2, s=2)
    assert t.n == 4 and t.bits.sum() == 7
    a = construct("address", a=1)
    # x0 selects which of x1, x2 is returned
    for x in range(8):
        assert a.bits[x] == (x >> (1 + (x & 1))) & 1
    with pytest.raises(BadParams):
        construct("majority", n=4)
    with pytest.raises(BadParams):
        construct("nope", n=2)


def test_kkl_examples():
    r = kkl_ratio(construct("majority", n=3))
    assert (r.max_influence, r.var_log_term, r.ratio) == (0.5, 1.0, 1.5)
    assert math.isinf(kkl_ratio(construct("dictator", n=3, i=1)).ratio)
    assert math.isinf(kkl_ratio(construct("parity", n=2)).ratio)
    with pytest.raises(ConstantFunction):
        kkl_ratio(construct("constant", n=2))


@given(functions(max_n=7), st.booleans())
def test_truth_table_text_round_trip(f, hex_body):
    assert parse_truth_table(format_truth_table(f, hex_body)) == f


def test_truth_table_parse_forms():
    assert parse_truth_table("n=2\n0001\n") == AND2
    assert parse_truth_table("# and\nn=2\n8") == AND2
    assert parse_truth_table("n = 2\n0x8") == AND2
    assert AND2.to_hex() == "8"
    for bad in ("0001", "n=2\n000", "n=2\nzz", "n=x\n0"):
        with pytest.raises(BadParams):
            parse_truth_table(bad)


def test_bad_tables():
    with pytest.raises(BadParams):
        BooleanFunction(2, [0, 1, 0])
    with pytest.raises(NotBooleanValued):
        BooleanFunction.from_values(1, [1, 0])
    with pytest.raises(BadParams):
        BooleanFunction.from_int(1, 4)


def test_spectrum_json():
    s = wht(AND2)
    assert FourierSpectrum.from_json(s.to_json()) == s
    assert s.fhat(3) == Fraction(-1, 2)
