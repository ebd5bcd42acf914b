from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings

from feikit import AffineConstraintSystem, BooleanFunction, construct, wht
from feikit.certificates import (CERT_DP_N_MAX, certificate, certificate_aggregates, certificate_profile,
                                 min_parity_certificate, min_parity_certificate_batch, parity_certificate,
                                 parity_certificate_profile, sensitivity, subspace_fourier_witness,
                                 verify_fmei_bound)
from feikit.core import min_entropy
from feikit.errors import NotMonochromatic, SizeLimit

import oracles
from strategies import functions

AND2 = construct("and", n=2)


def test_sensitivity_examples():
    s, avg, per = sensitivity(construct("parity", n=3))
    assert (s, avg) == (3, 3)
    assert sensitivity(construct("constant", n=3))[0] == 0
    s, avg, per = sensitivity(AND2)
    assert per.tolist() == [0, 1, 1, 2] and avg == 1


def test_certificate_examples():
    k, w = certificate(construct("dictator", n=3, i=0), 5)
    assert k == 1 and w.fixed == {0: -1}
    k, w = certificate(AND2, (1, 1))
    assert k == 1 and w.fixed == {0: 1}
    assert certificate(AND2, (-1, -1))[0] == 2


def test_aggregate_examples():
    r = certificate_aggregates(AND2)
    assert (r.C_min, r.C, r.C1, r.C0) == (1, 2, 2, 1)
    r = certificate_aggregates(construct("parity", n=3))
    assert r.C_min == r.C == 3
    r = certificate_aggregates(construct("constant", n=3))
    assert (r.C, r.C0, r.C1, r.C_min, r.C_parity, r.C_min_parity, r.aC) == (0, 0, 0, 0, 0, 0, 0)


@settings(max_examples=60)
@given(functions(max_n=4))
def test_certificates_against_brute_force(f):
    per = certificate_profile(f)
    for x in range(1 << f.n):
        assert per[x] == oracles.certificate_at(f, x)
        assert certificate(f, x)[0] == per[x]
    s = sensitivity(f)[2]
    assert s.tolist() == [oracles.sensitivity_at(f, x) for x in range(1 << f.n)]
    assert np.all(s <= per)


@settings(max_examples=40)
@given(functions(max_n=4))
def test_parity_certificates_against_brute_force(f):
    prof = parity_certificate_profile(f)
    for x in range(1 << f.n):
        k, h = parity_certificate(f, x)
        assert k == prof[x] == oracles.parity_certificate_at(f, x)
        assert h.contains(x) and h.codim == k
        assert len({int(f.bits[y]) for y in h.points()}) == 1
    assert min_parity_certificate(f) == prof.min()
    assert np.all(prof <= certificate_profile(f))


def test_certificate_search_beyond_dp():
    f = construct("tribes", w=3, s=1)
    g = BooleanFunction(CERT_DP_N_MAX + 1, np.resize(f.bits, 1 << (CERT_DP_N_MAX + 1)))
    # g depends on its first three coordinates only
    per = certificate_profile(g)
    assert per.max() == 3 and per.min() == 1
    with pytest.raises(SizeLimit):
        certificate_profile(BooleanFunction(17, np.zeros(1 << 17, dtype=np.uint8)))


def test_parity_certificate_examples():
    par = construct("parity", n=4)
    assert all(parity_certificate(par, x)[0] == 1 for x in range(16))
    assert parity_certificate(AND2, (1, 1))[0] == 1
    ip = construct("inner_product", n=4)
    # the six TRUE inputs contain no 2-flat, so they need codimension 3
    got = [parity_certificate(ip, x)[0] for x in range(16)]
    assert got == [3 if b else 2 for b in ip.bits]
    assert min_parity_certificate(ip) == 2
    with pytest.raises(SizeLimit):
        parity_certificate(construct("parity", n=9), 0)


def test_batch_matches_single():
    fs = [BooleanFunction.from_int(3, v) for v in range(256)]
    coeffs = np.stack([wht(f).coeffs for f in fs])
    assert min_parity_certificate_batch(coeffs, 3).tolist() == [min_parity_certificate(f) for f in fs]


def test_fourier_witness_examples():
    w = subspace_fourier_witness(AND2, AffineConstraintSystem(2, [(1, -1), (2, -1)]))
    assert w.max_abs == Fraction(1, 2) and w.max_abs >= Fraction(1, 4)
    w = subspace_fourier_witness(construct("dictator", n=2, i=0), AffineConstraintSystem(2, [(1, -1)]))
    assert w.support == (0, 1) and w.max_abs == 1
    w = subspace_fourier_witness(construct("parity", n=2), AffineConstraintSystem(2, [(3, -1)]))
    assert w.max_abs == 1
    with pytest.raises(NotMonochromatic):
        subspace_fourier_witness(AND2, AffineConstraintSystem(2, [(1, -1)]))


@settings(max_examples=40)
@given(functions(max_n=5))
def test_fourier_witness_on_every_certificate(f):
    s = wht(f)
    for x in range(0, 1 << f.n, 3):
        k, h = parity_certificate(f, x, s)
        w = subspace_fourier_witness(f, h)
        assert w.abs_sum >= 1 and w.max_abs * (1 << k) >= 1


def test_fmei_bound_examples():
    assert verify_fmei_bound(AND2) == (pytest.approx(2.0), 2, True)
    h, b, ok = verify_fmei_bound(construct("parity", n=3))
    assert (h, b, ok) == (0.0, 2, True)
    assert verify_fmei_bound(construct("inner_product", n=4)) == (pytest.approx(4.0), 4, True)


@given(functions(max_n=6))
def test_fmei_bound_holds(f):
    h, bound, ok = verify_fmei_bound(f)
    assert ok and h <= bound + 1e-9
    assert min_entropy(wht(f)) == h
