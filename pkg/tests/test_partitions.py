from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from feikit import BooleanFunction, construct
from feikit.certificates import min_parity_certificate
from feikit.errors import BadParams, LengthMismatch, NotAPartition, NotMonochromatic, SizeLimit
from feikit.partitions import (AffinePartition, CertificateDistribution, SubcubePartition, TypicalSetSpec,
                               aep_sample_check, chebyshev_copies, heuristic_partition, min_aUC_exact,
                               partition_from_json, typical_membership, verify_entropy_vs_aUC,
                               verify_partition, verify_typical_coefficient_claims)

import oracles
from strategies import functions

AND2 = construct("and", n=2)
AND2_CELLS = [{0: 1}, {0: -1, 1: 1}, {0: -1, 1: -1}]


def and2_partition():
    return SubcubePartition(2, AND2_CELLS, [1, 1, -1])


def test_verify_examples():
    assert verify_partition(AND2, and2_partition()) == Fraction(3, 2)
    par = construct("parity", n=3)
    part = AffinePartition(3, [[(7, 1)], [(7, -1)]], [1, -1])
    assert verify_partition(par, part) == 1
    overlap = SubcubePartition(2, [{0: 1}, {1: 1}, {0: -1, 1: -1}], [1, 1, -1])
    with pytest.raises(NotAPartition):
        verify_partition(AND2, overlap)
    with pytest.raises(NotAPartition):
        verify_partition(AND2, SubcubePartition(2, [{0: 1}], [1]))
    with pytest.raises(NotMonochromatic) as err:
        verify_partition(AND2, SubcubePartition(2, [{0: 1}, {0: -1}], [1, 1]))
    assert err.value.cell == 1 and err.value.point == 3


def test_partition_json():
    part = and2_partition()
    again = partition_from_json(part.to_json())
    assert verify_partition(AND2, again) == Fraction(3, 2)
    bare = [{"fixed": {"0": 1}, "value": 1}, {"fixed": {"0": -1}, "value": -1}]
    assert verify_partition(construct("dictator", n=2, i=0), partition_from_json(bare, 2)) == 1
    aff = AffinePartition(2, [[(3, 1)], [(3, -1)]], [1, -1])
    assert partition_from_json(aff.to_json()).cells == aff.cells
    for bad in ([], {"n": 2, "cells": [{"fixed": {}}]}, [{"fixed": {}, "value": 1}, {"rows": [], "value": 1}]):
        with pytest.raises(BadParams):
            partition_from_json(bad, 2)


def test_min_auc_examples():
    assert min_aUC_exact(AND2)[0] == Fraction(3, 2)
    assert min_aUC_exact(construct("dictator", n=3, i=1))[0] == 1
    assert min_aUC_exact(construct("parity", n=2))[0] == 2
    assert min_aUC_exact(construct("constant", n=3))[0] == 0
    with pytest.raises(SizeLimit):
        min_aUC_exact(construct("and", n=5))


@pytest.mark.parametrize("v", range(256))
def test_min_auc_matches_brute_force_n3(v):
    f = BooleanFunction.from_int(3, v)
    auc, part = min_aUC_exact(f)
    assert auc == oracles.min_auc(f)
    assert verify_partition(f, part) == auc


@settings(max_examples=15, deadline=None)
@given(st.integers(0, (1 << 16) - 1))
def test_min_auc_matches_brute_force_n4(v):
    f = BooleanFunction.from_int(4, v)
    auc, part = min_aUC_exact(f)
    assert auc == oracles.min_auc(f)
    assert verify_partition(f, part) == auc


@settings(max_examples=60)
@given(functions(max_n=7), st.sampled_from(["subcube", "affine"]))
def test_heuristic_partitions_are_valid(f, mode):
    part = heuristic_partition(f, mode)
    auc = verify_partition(f, part)
    cells = [frozenset(int(x) for x in c.points()) for c in part.cells]
    assert oracles.is_affine_partition_of(f, cells)
    h, rhs, holds = verify_entropy_vs_aUC(f, part)
    assert holds and h <= rhs + 1e-9
    assert CertificateDistribution.of(part).entropy == auc
    if f.n <= 4 and mode == "subcube":
        assert auc >= min_aUC_exact(f)[0]
    if f.n <= 8:
        assert min_parity_certificate(f) <= max(part.codims)


def test_heuristic_examples():
    part = heuristic_partition(construct("parity", n=5), "affine")
    assert len(part.cells) == 2 and verify_partition(construct("parity", n=5), part) == 1
    part = heuristic_partition(construct("constant", n=4), "subcube")
    assert part.codims == [0]
    assert verify_partition(AND2, heuristic_partition(AND2, "subcube")) <= Fraction(3, 2)
    ip = construct("inner_product", n=4)
    h, rhs, holds = verify_entropy_vs_aUC(ip, heuristic_partition(ip, "affine"))
    assert holds
    with pytest.raises(BadParams):
        heuristic_partition(AND2, "nope")


def test_entropy_vs_auc_examples():
    assert verify_entropy_vs_aUC(AND2, and2_partition()) == (pytest.approx(2.0), 3.0, True)
    par = construct("parity", n=2)
    part = AffinePartition(2, [[(3, 1)], [(3, -1)]], [1, -1])
    assert verify_entropy_vs_aUC(par, part) == (0.0, 2.0, True)


def test_certificate_distribution():
    d = CertificateDistribution.of(and2_partition())
    assert d.probabilities == [Fraction(1, 2), Fraction(1, 4), Fraction(1, 4)]
    assert d.entropy == Fraction(3, 2) and d.variance == Fraction(1, 4)
    # Shannon entropy of the cell law computed directly
    direct = sum(float(p) * -np.log2(float(p)) for p in d.probabilities)
    assert float(d.entropy) == pytest.approx(direct)


def test_typical_membership_examples():
    assert typical_membership(TypicalSetSpec(4, Fraction(3, 10), Fraction(3, 2)), (1, 2, 2, 1))
    assert not typical_membership(TypicalSetSpec(2, Fraction(1, 10), Fraction(3, 2)), (2, 2))
    assert typical_membership(TypicalSetSpec(5, 0, 1), (1,) * 5)
    with pytest.raises(LengthMismatch):
        typical_membership(TypicalSetSpec(3, 0, 1), (1, 1))


def test_aep_sampling_examples():
    point = CertificateDistribution((0,))
    assert aep_sample_check(point, 7, 0, 100, rng=1) == 1.0
    d = CertificateDistribution.of(and2_partition())
    assert aep_sample_check(d, 64, 0.5, 10_000, rng=0) >= 0.95
    # with delta = 0 and M = 1 only codimension-exactly-1.5 cells count: none
    assert aep_sample_check(d, 1, 0, 1000, rng=0) == 0.0
    assert chebyshev_copies(d, Fraction(1, 2)) == 2
    with pytest.raises(BadParams):
        chebyshev_copies(d, 0)


def test_aep_sampling_is_seeded():
    d = CertificateDistribution((1, 2, 3, 3))
    assert aep_sample_check(d, 5, 0.4, 500, rng=3) == aep_sample_check(d, 5, 0.4, 500, rng=3)


def test_typical_claims_examples():
    const = construct("constant", n=2)
    for M in (1, 2, 3):
        r = verify_typical_coefficient_claims(const, SubcubePartition(2, [{}], [1]), M, 0)
        assert r.good_count == 1 and r.residual_weight == 0 and r.holds
    r = verify_typical_coefficient_claims(AND2, and2_partition(), 2, Fraction(1, 2))
    assert r.holds
    par = construct("parity", n=2)
    singletons = SubcubePartition(2, [{0: a, 1: b} for a in (1, -1) for b in (1, -1)],
                                  [par((a, b)) for a in (1, -1) for b in (1, -1)])
    r = verify_typical_coefficient_claims(par, singletons, 1, 0)
    assert r.good_count == 4 and r.residual_weight == 0 and r.holds


@pytest.mark.parametrize("v", range(16))
@pytest.mark.parametrize("M", [1, 2])
@pytest.mark.parametrize("delta", [Fraction(0), Fraction(1, 4), Fraction(1, 2)])
def test_typical_claims_against_oracle(v, M, delta):
    f = BooleanFunction.from_int(2, v)
    part = min_aUC_exact(f)[1]
    r = verify_typical_coefficient_claims(f, part, M, delta)
    count, residual, atypical, auc = oracles.typical_claims(f, [c.fixed for c in part.cells], M, delta)
    assert (r.good_count, r.residual_weight, r.atypical_mass, r.aUC) == (count, residual, atypical, auc)
    assert r.holds


def test_typical_claims_caps():
    with pytest.raises(SizeLimit):
        verify_typical_coefficient_claims(construct("and", n=4), heuristic_partition(construct("and", n=4)), 4, 0)
    with pytest.raises(BadParams):
        aff = AffinePartition(2, [[(3, 1)], [(3, -1)]], [1, -1])
        verify_typical_coefficient_claims(construct("parity", n=2), aff, 1, 0)
