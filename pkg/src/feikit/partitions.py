"""Monochromatic subcube / affine partitions and the typical-set checks.

The average codimension of a partition is the entropy of the random cell
``C`` of a uniform input, so several routines below double as entropy
bookkeeping for products of independent copies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product

import numpy as np

from .certificates import PartialAssignment
from .core import BooleanFunction, butterfly, shannon_entropy, tensor_power, wht
from .errors import BadParams, LengthMismatch, NotAPartition, NotMonochromatic, SizeLimit
from .gf2 import AffineConstraintSystem, parity

EXACT_AUC_N_MAX = 4
HEURISTIC_N_MAX = 16
TYPICAL_BITS_MAX = 12


def to_fraction(x) -> Fraction:
    """Exact rational for user numbers; floats are read by their shortest repr."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    return Fraction(repr(float(x)))


class SubcubePartition:
    def __init__(self, n: int, cells, values):
        if len(cells) != len(values):
            raise BadParams("each cell needs exactly one value")
        self.n = int(n)
        self.cells = [c if isinstance(c, PartialAssignment) else PartialAssignment(n, c) for c in cells]
        self.values = [int(v) for v in values]
        for c in self.cells:
            if c.n != self.n:
                raise BadParams("cell dimension does not match the partition")

    kind = "subcube"

    @property
    def codims(self) -> list[int]:
        return [c.codim for c in self.cells]

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "kind": self.kind,
            "cells": [{"fixed": c.to_json(), "value": v} for c, v in zip(self.cells, self.values)],
        }

    def __repr__(self):
        return f"SubcubePartition(n={self.n}, cells={len(self.cells)})"


class AffinePartition:
    def __init__(self, n: int, cells, values):
        if len(cells) != len(values):
            raise BadParams("each cell needs exactly one value")
        self.n = int(n)
        self.cells = [c if isinstance(c, AffineConstraintSystem) else AffineConstraintSystem(n, c) for c in cells]
        self.values = [int(v) for v in values]

    kind = "affine"

    @property
    def codims(self) -> list[int]:
        return [c.codim for c in self.cells]

    @property
    def parity_sets(self) -> list[tuple[int, ...]]:
        """Per cell, the parities fixed on it (span of its constraints)."""
        return [tuple(sorted(m for m, _ in c.span())) for c in self.cells]

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "kind": self.kind,
            "cells": [{**c.to_json(), "value": v} for c, v in zip(self.cells, self.values)],
        }

    def __repr__(self):
        return f"AffinePartition(n={self.n}, cells={len(self.cells)})"


def partition_from_json(data, n: int | None = None):
    """Accept ``{n, kind, cells}`` or a bare list of cells."""
    if isinstance(data, list):
        cells = data
    elif isinstance(data, dict):
        cells = data.get("cells")
        n = int(data.get("n", n)) if data.get("n", n) is not None else None
    else:
        raise BadParams("partition JSON must be a list of cells or an object")
    if n is None:
        raise BadParams("partition needs n (give it in the file or alongside)")
    if not isinstance(cells, list) or not cells:
        raise BadParams("partition must have at least one cell")
    try:
        if all("fixed" in c for c in cells):
            return SubcubePartition(n, [c["fixed"] for c in cells], [c["value"] for c in cells])
        if all("rows" in c for c in cells):
            return AffinePartition(n, [AffineConstraintSystem.from_json(n, c) for c in cells],
                                   [c["value"] for c in cells])
    except (KeyError, TypeError) as exc:
        raise BadParams(f"malformed partition cell: {exc}") from None
    raise BadParams("cells must all be subcubes ('fixed') or all affine ('rows')")


def verify_partition(f: BooleanFunction, part) -> Fraction:
    """Check a partition against ``f`` and return its average codimension.

    Coverage is checked twice: the cell measures must sum to exactly 1, and
    every point must lie in exactly one cell.
    """
    if part.n != f.n:
        raise BadParams(f"partition has n={part.n}, function has n={f.n}")
    n = f.n
    measure = sum(Fraction(1, 1 << k) for k in part.codims)
    hits = np.zeros(1 << n, dtype=np.int64)
    for i, (cell, value) in enumerate(zip(part.cells, part.values)):
        if value not in (1, -1):
            raise BadParams(f"cell {i} has value {value}, expected +-1")
        pts = cell.points()
        hits[pts] += 1
        vals = f.bits[pts]
        want = 1 if value == -1 else 0
        wrong = np.flatnonzero(vals != want)
        if wrong.size:
            raise NotMonochromatic(
                f"cell {i} is labelled {value:+d} but f differs at input {int(pts[wrong[0]])}",
                cell=i, point=int(pts[wrong[0]]))
    over = np.flatnonzero(hits > 1)
    if over.size:
        raise NotAPartition(f"input {int(over[0])} lies in {int(hits[over[0]])} cells", point=int(over[0]))
    miss = np.flatnonzero(hits == 0)
    if miss.size:
        raise NotAPartition(f"input {int(miss[0])} is not covered", point=int(miss[0]))
    if measure != 1:
        raise NotAPartition(f"cell measures sum to {measure}, not 1")
    return sum((Fraction(k, 1 << k) for k in part.codims), start=Fraction(0))


@dataclass(frozen=True)
class CertificateDistribution:
    """Law of the cell hit by a uniform input: cell i has mass 2**-codim_i."""

    codims: tuple

    @classmethod
    def of(cls, part) -> "CertificateDistribution":
        return cls(tuple(part.codims))

    @property
    def probabilities(self) -> list[Fraction]:
        return [Fraction(1, 1 << k) for k in self.codims]

    @property
    def entropy(self) -> Fraction:
        # log2(1 / 2**-k) = k, so the entropy is the mean codimension.
        return sum((Fraction(k, 1 << k) for k in self.codims), start=Fraction(0))

    @property
    def variance(self) -> Fraction:
        mean = self.entropy
        return sum((Fraction(1, 1 << k) * (k - mean) ** 2 for k in self.codims), start=Fraction(0))


# exact search over subcube partitions for n <= 4


@lru_cache(maxsize=None)
def _subcube_catalog(n: int):
    """All 3**n subcubes as (sort key, point bitmask, fixed mask, value bits).

    Returned per point: the subcubes through it, sorted by (codim, assignment).
    """
    cubes = []
    for assign in product((0, 1, -1), repeat=n):
        fixed = {i: v for i, v in enumerate(assign) if v}
        mask = sum(1 << i for i in fixed)
        vbits = sum(1 << i for i, v in fixed.items() if v == -1)
        pts = 0
        for x in range(1 << n):
            if x & mask == vbits:
                pts |= 1 << x
        key = (len(fixed), tuple(sorted(fixed.items())))
        cubes.append((key, pts, mask, vbits))
    cubes.sort()
    per_point = []
    for x in range(1 << n):
        per_point.append([c for c in cubes if (c[1] >> x) & 1])
    return per_point


def min_aUC_exact(f: BooleanFunction):
    """Exact ``aUC(f)`` and an optimal partition, by memoized branch and bound.

    Regions are bitmasks of uncovered points. From the lowest uncovered
    point we branch over every monochromatic subcube through it that fits in
    the region. Costs are kept as integers ``sum codim * 2**(n - codim)``.
    Candidates are tried in (codim, assignment) order and only strict
    improvements replace the incumbent, so the cell list returned is the
    lexicographically least optimal one.
    """
    n = f.n
    if n > EXACT_AUC_N_MAX:
        raise SizeLimit(f"exact aUC search is capped at n <= {EXACT_AUC_N_MAX}")
    full = (1 << (1 << n)) - 1
    ones = f.to_int()
    zeros = full ^ ones
    per_point = _subcube_catalog(n)
    cand = []
    for x in range(1 << n):
        cand.append([(c[0][0] << (n - c[0][0]), c) for c in per_point[x]
                     if (c[1] & ones) == c[1] or (c[1] & zeros) == c[1]])
    memo = {0: (0, ())}

    def solve(region):
        hit = memo.get(region)
        if hit is not None:
            return hit
        p = (region & -region).bit_length() - 1
        best_cost, best_cells = None, None
        for cost, cube in cand[p]:
            if best_cost is not None and cost >= best_cost:
                continue
            pts = cube[1]
            if pts & region != pts:
                continue
            sub_cost, sub_cells = solve(region ^ pts)
            total = cost + sub_cost
            if best_cost is None or total < best_cost:
                best_cost, best_cells = total, (cube,) + sub_cells
        memo[region] = (best_cost, best_cells)
        return memo[region]

    cost, cells = solve(full)
    part = SubcubePartition(
        n,
        [PartialAssignment(n, dict(c[0][1])) for c in cells],
        [-1 if (ones >> ((c[1] & -c[1]).bit_length() - 1)) & 1 else 1 for c in cells],
    )
    return Fraction(cost, 1 << n), part


# greedy partitions


def heuristic_partition(f: BooleanFunction, mode: str = "subcube"):
    """Leaves of a greedy (parity) decision tree; always a valid partition.

    Each split picks the query whose two halves carry the most monochromatic
    mass, then the largest imbalance, then the lowest coordinate / parity mask.
    """
    if f.n > HEURISTIC_N_MAX:
        raise SizeLimit(f"heuristic partitions are capped at n <= {HEURISTIC_N_MAX}")
    if mode == "subcube":
        part = _greedy_subcube(f)
    elif mode == "affine":
        part = _greedy_affine(f)
    else:
        raise BadParams(f"mode must be 'subcube' or 'affine', got {mode!r}")
    verify_partition(f, part)
    return part


def _greedy_subcube(f):
    n = f.n
    cells, values = [], []
    vals = f.values

    def grow(fixed: dict, sub: np.ndarray, free: list):
        # sub is f on the subcube, indexed by the free coordinates in order
        if sub.min() == sub.max():
            cells.append(PartialAssignment(n, fixed))
            values.append(int(sub[0]))
            return
        best = None
        for pos, i in enumerate(free):
            halves = sub.reshape(-1, 2, 1 << pos)
            lo = halves[:, 0, :]
            hi = halves[:, 1, :]
            mass = sum(h.size for h in (lo, hi) if h.min() == h.max())
            imbalance = abs(int(lo.sum())) + abs(int(hi.sum()))
            score = (mass, imbalance)
            if best is None or score > best[0]:
                best = (score, pos, lo, hi)
        _, pos, lo, hi = best
        i = free[pos]
        rest = free[:pos] + free[pos + 1:]
        grow({**fixed, i: 1}, lo.reshape(-1), rest)
        grow({**fixed, i: -1}, hi.reshape(-1), rest)

    grow({}, vals, list(range(n)))
    return SubcubePartition(n, cells, values)


def _beta_table(n, basis):
    """beta[S] = (parity(S & v_i))_i as a bitmask, for every S."""
    beta = np.zeros(1 << n, dtype=np.int64)
    for j in range(n):
        e = sum(((v >> j) & 1) << i for i, v in enumerate(basis))
        beta[1 << j:2 << j] = beta[:1 << j] ^ e
    return beta


def _greedy_affine(f):
    n = f.n
    cells, values = [], []
    table = f.values

    def grow(rows, x0, basis):
        m = len(basis)
        pts = np.array([x0], dtype=np.int64)
        for v in basis:
            pts = np.concatenate((pts, pts ^ v))
        g = table[pts]
        if g.min() == g.max():
            cells.append(AffineConstraintSystem(n, rows))
            values.append(int(g[0]))
            return
        ghat = butterfly(g)
        half = 1 << (m - 1)
        sums0 = (ghat[0] + ghat) // 2
        sums1 = (ghat[0] - ghat) // 2
        mass = half * ((np.abs(sums0) == half).astype(np.int64) + (np.abs(sums1) == half))
        imbalance = np.abs(sums0) + np.abs(sums1)
        mass[0] = -1
        beta = _beta_table(n, basis)
        score_mass = mass[beta]
        score_imb = imbalance[beta]
        top = score_mass.max()
        cand = np.flatnonzero(score_mass == top)
        S = int(cand[np.argmax(score_imb[cand])])
        b = int(beta[S])
        piv = (b & -b).bit_length() - 1
        vp = basis[piv]
        child = [v ^ vp if (b >> i) & 1 else v for i, v in enumerate(basis) if i != piv]
        sign0 = -1 if parity(S & x0) else 1
        grow(rows + [(S, sign0)], x0, child)
        grow(rows + [(S, -sign0)], x0 ^ vp, child)

    grow([], 0, [1 << j for j in range(n)])
    return AffinePartition(n, cells, values)


def verify_entropy_vs_aUC(f: BooleanFunction, part, tol: float = 1e-9):
    """``(H(fhat^2), 2 * aUC(f, part), holds)`` for a verified partition."""
    auc = verify_partition(f, part)
    h = shannon_entropy(wht(f))
    return h, 2 * float(auc), h <= 2 * float(auc) + tol


# typical sets


@dataclass(frozen=True)
class TypicalSetSpec:
    M: int
    delta: object
    entropy: object

    def window(self) -> tuple[Fraction, Fraction]:
        h = to_fraction(self.entropy)
        d = to_fraction(self.delta)
        return h - d, h + d


def typical_membership(spec: TypicalSetSpec, codims) -> bool:
    """Mean codimension within ``[H - delta, H + delta]``, compared exactly."""
    codims = list(codims)
    if len(codims) != spec.M:
        raise LengthMismatch(f"expected {spec.M} codimensions, got {len(codims)}")
    lo, hi = spec.window()
    mean = Fraction(sum(int(c) for c in codims), spec.M)
    return lo <= mean <= hi


def chebyshev_copies(dist: CertificateDistribution, delta) -> int:
    """Copies M with ``Var / (M delta^2) <= delta`` (Chebyshev at epsilon = delta)."""
    d = to_fraction(delta)
    if d <= 0:
        raise BadParams("Chebyshev rule needs delta > 0")
    var = dist.variance
    return max(1, math.ceil(var / d ** 3))


def aep_sample_check(dist: CertificateDistribution, M: int, delta, trials: int, rng=None) -> float:
    """Fraction of ``trials`` i.i.d. M-tuples of cells that are typical."""
    if trials < 1 or M < 1:
        raise BadParams("need trials >= 1 and M >= 1")
    rng = np.random.default_rng(rng)
    probs = np.array([float(p) for p in dist.probabilities])
    codims = np.array(dist.codims, dtype=np.int64)
    draws = rng.choice(codims.size, size=(trials, M), p=probs / probs.sum())
    totals = codims[draws].sum(axis=1)
    lo, hi = TypicalSetSpec(M, delta, dist.entropy).window()
    # M*lo <= total <= M*hi, all exact
    ok = [(M * lo <= int(t) <= M * hi) for t in totals]
    return sum(ok) / trials


@dataclass
class TypicalClaimsReport:
    M: int
    delta: Fraction
    aUC: Fraction
    good_count: int
    bound_exponent: Fraction
    good_holds: bool
    residual_weight: Fraction
    atypical_mass: Fraction
    bad_holds: bool

    @property
    def bound(self) -> float:
        return 2.0 ** float(self.bound_exponent)

    @property
    def holds(self) -> bool:
        return self.good_holds and self.bad_holds

    def to_json(self) -> dict:
        return {
            "M": self.M,
            "delta": str(self.delta),
            "aUC": str(self.aUC),
            "good_count": self.good_count,
            "good_bound": self.bound,
            "good_holds": self.good_holds,
            "residual_weight": str(self.residual_weight),
            "atypical_mass": str(self.atypical_mass),
            "bad_holds": self.bad_holds,
        }


def _pow2_at_least(count: int, exponent: Fraction) -> bool:
    """Exactly decide ``count <= 2**exponent``."""
    if count <= 0:
        return True
    if exponent < 0:
        return False
    p, q = exponent.numerator, exponent.denominator
    if q <= 4096:
        return count ** q <= 1 << p
    # huge denominators only come from float deltas; a tiny margin suffices
    return math.log2(count) <= float(exponent) + 1e-12


def verify_typical_coefficient_claims(f: BooleanFunction, part: SubcubePartition, M: int, delta) -> TypicalClaimsReport:
    """Finite-M check of the typical-coefficient counting argument.

    For M independent copies, the typical cell tuples have mean codimension
    within ``delta`` of aUC(f, part). Their indicators only carry parities
    inside the fixed coordinates of each cell, giving the set B. We check
    ``|B| <= 2**(2M(aUC + delta))`` and that the Fourier weight of ``f^M``
    outside B is at most the exact mass of atypical tuples.
    """
    if not isinstance(part, SubcubePartition):
        raise BadParams("typical-coefficient claims need a subcube partition")
    if M < 1:
        raise BadParams("M must be >= 1")
    if M * f.n > TYPICAL_BITS_MAX:
        raise SizeLimit(f"M*n = {M * f.n} exceeds {TYPICAL_BITS_MAX}")
    d = to_fraction(delta)
    if d < 0:
        raise BadParams("delta must be >= 0")
    auc = verify_partition(f, part)
    n = f.n
    spec = TypicalSetSpec(M, d, auc)
    in_b = np.zeros(1 << (M * n), dtype=bool)
    atypical = Fraction(0)
    sub_masks = [_submasks(c.mask) for c in part.cells]
    for rho in product(range(len(part.cells)), repeat=M):
        codims = [part.cells[i].codim for i in rho]
        if typical_membership(spec, codims):
            combined = np.zeros(1, dtype=np.int64)
            for block, i in enumerate(rho):
                combined = (combined[:, None] | (sub_masks[i][None, :] << (block * n))).reshape(-1)
            in_b[combined] = True
        else:
            atypical += Fraction(1, 1 << sum(codims))
    c = wht(tensor_power(f, M)).coeffs
    outside = c[~in_b]
    residual = Fraction(int(np.dot(outside, outside)), 1 << (2 * M * n))
    count = int(in_b.sum())
    exponent = 2 * M * (auc + d)
    return TypicalClaimsReport(
        M=M, delta=d, aUC=auc, good_count=count, bound_exponent=exponent,
        good_holds=_pow2_at_least(count, exponent),
        residual_weight=residual, atypical_mass=atypical,
        bad_holds=residual <= atypical,
    )


def _submasks(mask: int) -> np.ndarray:
    out = [0]
    s = mask
    while s:
        out.append(s)
        s = (s - 1) & mask
    return np.array(sorted(out), dtype=np.int64)
