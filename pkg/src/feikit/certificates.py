"""Sensitivity, certificate complexity and parity certificates."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

from .core import BooleanFunction, FourierSpectrum, butterfly, min_entropy, point_index, popcounts, wht
from .errors import BadParams, InvariantViolation, NotMonochromatic, SizeLimit
from .gf2 import SUBSPACE_N_MAX, AffineConstraintSystem, parity, subspace_table

# Free-mask dynamic programming stores 4**n bytes.
CERT_DP_N_MAX = 12
CERT_N_MAX = 16


class PartialAssignment:
    """Fixed coordinates of a subcube; everything else is free."""

    __slots__ = ("n", "fixed")

    def __init__(self, n: int, fixed=None):
        self.n = int(n)
        items = {}
        for i, v in dict(fixed or {}).items():
            i, v = int(i), int(v)
            if not 0 <= i < self.n:
                raise BadParams(f"coordinate {i} out of range for n={n}")
            if v not in (1, -1):
                raise BadParams(f"fixed value must be +-1, got {v}")
            items[i] = v
        self.fixed = dict(sorted(items.items()))

    @classmethod
    def from_point(cls, n: int, x: int, coords) -> "PartialAssignment":
        return cls(n, {i: -1 if (x >> i) & 1 else 1 for i in coords})

    @property
    def codim(self) -> int:
        return len(self.fixed)

    @property
    def mask(self) -> int:
        return sum(1 << i for i in self.fixed)

    @property
    def value_bits(self) -> int:
        return sum(1 << i for i, v in self.fixed.items() if v == -1)

    def key(self) -> tuple:
        return tuple(self.fixed.items())

    def contains(self, x: int) -> bool:
        return (x & self.mask) == self.value_bits

    def points(self) -> np.ndarray:
        return cube_points(self.n, self.mask, self.value_bits)

    def to_json(self) -> dict:
        return {str(i): v for i, v in self.fixed.items()}

    def __eq__(self, other):
        if not isinstance(other, PartialAssignment):
            return NotImplemented
        return self.n == other.n and self.fixed == other.fixed

    def __hash__(self):
        return hash((self.n, self.key()))

    def __repr__(self):
        return f"PartialAssignment(n={self.n}, fixed={self.fixed})"


def cube_points(n: int, fixed_mask: int, value_bits: int) -> np.ndarray:
    pts = np.array([value_bits & fixed_mask], dtype=np.int64)
    for j in range(n):
        if not (fixed_mask >> j) & 1:
            pts = np.concatenate((pts, pts | (1 << j)))
    return np.sort(pts)


def sensitivity_profile(f: BooleanFunction) -> np.ndarray:
    """Per-input count of neighbours with a different value."""
    idx = np.arange(1 << f.n)
    out = np.zeros(1 << f.n, dtype=np.int64)
    for i in range(f.n):
        out += f.bits != f.bits[idx ^ (1 << i)]
    return out


def sensitivity(f: BooleanFunction):
    """``(s(f), as(f), per-input s_f(x))`` with ``as(f)`` a Fraction."""
    per = sensitivity_profile(f)
    return int(per.max()), Fraction(int(per.sum()), 1 << f.n), per


def _is_mono(f: BooleanFunction, fixed_mask: int, x: int) -> bool:
    vals = f.bits[cube_points(f.n, fixed_mask, x)]
    return bool(vals.min() == vals.max())


def certificate(f: BooleanFunction, x):
    """Smallest certificate of ``f`` at ``x`` and its witness.

    Every sensitive coordinate of ``x`` must be fixed, so the search only
    tries supersets of that set, by size and then lexicographically.
    """
    if f.n > 24:
        raise SizeLimit("certificate search needs n <= 24")
    x = point_index(f.n, x)
    idx_bits = f.bits
    sens = [i for i in range(f.n) if idx_bits[x] != idx_bits[x ^ (1 << i)]]
    rest = [i for i in range(f.n) if i not in sens]
    base = sum(1 << i for i in sens)
    for extra in range(len(rest) + 1):
        for combo in combinations(rest, extra):
            fixed = base | sum(1 << i for i in combo)
            if _is_mono(f, fixed, x):
                coords = sorted(sens + list(combo))
                return len(coords), PartialAssignment.from_point(f.n, x, coords)
    raise InvariantViolation("fixing every coordinate must certify the point")


def certificate_profile(f: BooleanFunction) -> np.ndarray:
    """``C(f, x)`` for every input.

    For ``n <= 12`` this runs a dynamic program over free-coordinate masks:
    ``val[U][y]`` is the common value of the subcube through ``y`` with the
    coordinates in ``U`` free, or 2 if that subcube is mixed.
    """
    n = f.n
    if n > CERT_N_MAX:
        raise SizeLimit(f"certificate profile is capped at n <= {CERT_N_MAX}")
    if n > CERT_DP_N_MAX:
        return np.array([certificate(f, x)[0] for x in range(1 << n)], dtype=np.int64)
    size = 1 << n
    idx = np.arange(size)
    pc = popcounts(n)
    vals = np.empty((size, size), dtype=np.uint8)
    vals[0] = f.bits
    best_free = np.zeros(size, dtype=np.int64)
    for U in range(1, size):
        b = U & -U
        prev = vals[U ^ b]
        other = prev[idx ^ b]
        cur = np.where(prev == other, prev, 2).astype(np.uint8)
        vals[U] = cur
        np.maximum(best_free, np.where(cur != 2, pc[U], 0), out=best_free)
    return n - best_free


@dataclass
class CertificateReport:
    n: int
    per_input: np.ndarray
    per_input_parity: np.ndarray | None
    C: int
    C0: int
    C1: int
    C_min: int
    C_parity: int | None
    C_min_parity: int | None
    aC: Fraction
    s: int
    per_input_sensitivity: np.ndarray
    avg_sensitivity: Fraction

    def to_json(self, per_input=False) -> dict:
        out = {
            "n": self.n,
            "C": self.C,
            "C0": self.C0,
            "C1": self.C1,
            "C_min": self.C_min,
            "C_parity": self.C_parity,
            "C_min_parity": self.C_min_parity,
            "aC": str(self.aC),
            "s": self.s,
            "avg_sensitivity": str(self.avg_sensitivity),
        }
        if per_input:
            out["per_input"] = self.per_input.tolist()
            out["per_input_sensitivity"] = self.per_input_sensitivity.tolist()
            if self.per_input_parity is not None:
                out["per_input_parity"] = self.per_input_parity.tolist()
        return out


def certificate_aggregates(f: BooleanFunction, parity_certs: bool | None = None) -> CertificateReport:
    """All certificate aggregates. Constant functions get 0 everywhere.

    ``C0`` ranges over inputs with ``f(x) = +1`` and ``C1`` over ``f(x) = -1``.
    Parity measures are included when ``n`` is within the enumeration cap
    (or when ``parity_certs`` forces it).
    """
    n = f.n
    s_max, avg_s, s_per = sensitivity(f)
    if f.is_constant():
        zeros = np.zeros(1 << n, dtype=np.int64)
        want_par = n <= SUBSPACE_N_MAX if parity_certs is None else parity_certs
        return CertificateReport(n, zeros, zeros.copy() if want_par else None, 0, 0, 0, 0,
                                 0 if want_par else None, 0 if want_par else None,
                                 Fraction(0), 0, s_per, avg_s)
    per = certificate_profile(f)
    ones = f.bits == 1
    c1 = int(per[ones].max()) if ones.any() else 0
    c0 = int(per[~ones].max()) if (~ones).any() else 0
    want_par = n <= SUBSPACE_N_MAX if parity_certs is None else parity_certs
    par = parity_certificate_profile(f, upper=per) if want_par else None
    return CertificateReport(
        n=n,
        per_input=per,
        per_input_parity=par,
        C=int(per.max()),
        C0=c0,
        C1=c1,
        C_min=int(per.min()),
        C_parity=int(par.max()) if par is not None else None,
        C_min_parity=int(par.min()) if par is not None else None,
        aC=Fraction(int(per.sum()), 1 << n),
        s=s_max,
        per_input_sensitivity=s_per,
        avg_sensitivity=avg_s,
    )


def _coset_mono(coeffs: np.ndarray, n: int, k: int) -> np.ndarray:
    """Which cosets of each codim-k parity space are monochromatic.

    Summing f over the coset ``{y : chi_{S_j}(y) = (-1)**beta_j}`` gives
    ``2**-k * sum_t (-1)**(beta.t) c[span_t]``, so a size-2**k transform of
    the spectrum restricted to the span yields every coset sum at once. The
    coset is monochromatic iff the magnitude equals ``2**n``.
    Shape of the result: (..., N, 2**k), indexed by beta.
    """
    _, spans = subspace_table(n, k)
    gathered = coeffs[..., spans]
    return np.abs(butterfly(gathered)) == (1 << n)


def _coset_index(rows: np.ndarray, x: int) -> np.ndarray:
    out = np.zeros(rows.shape[0], dtype=np.int64)
    for j in range(rows.shape[1]):
        bits = np.array([parity(int(m) & x) for m in rows[:, j]], dtype=np.int64)
        out |= bits << j
    return out


def _parity_matrix(n: int) -> np.ndarray:
    idx = np.arange(1 << n)
    return (popcounts(n)[idx[:, None] & idx[None, :]] & 1).astype(np.int64)


def _require_cap(n):
    if n > SUBSPACE_N_MAX:
        raise SizeLimit(f"parity certificates are capped at n <= {SUBSPACE_N_MAX}")


def parity_certificate(f: BooleanFunction, x, spectrum: FourierSpectrum | None = None):
    """Least codimension of a monochromatic affine subspace through ``x``.

    Returns ``(C_parity(f, x), witness)``; the witness is the first such
    subspace in the canonical ordering (rows lexicographically smallest).
    """
    _require_cap(f.n)
    x = point_index(f.n, x)
    s = spectrum or wht(f)
    for k in range(f.n + 1):
        rows, _ = subspace_table(f.n, k)
        mono = _coset_mono(s.coeffs, f.n, k)
        beta = _coset_index(rows, x)
        hit = np.flatnonzero(mono[np.arange(rows.shape[0]), beta])
        if hit.size:
            masks = [int(m) for m in rows[hit[0]]]
            return k, AffineConstraintSystem.through_point(f.n, masks, x)
    raise InvariantViolation("a single point is always a monochromatic subspace")


def parity_certificate_profile(f: BooleanFunction, upper=None, spectrum=None) -> np.ndarray:
    """``C_parity(f, x)`` for every input.

    ``upper`` (e.g. the subcube certificate profile) bounds the search depth.
    """
    _require_cap(f.n)
    n = f.n
    size = 1 << n
    s = spectrum or wht(f)
    out = np.full(size, -1, dtype=np.int64)
    kmax = int(np.max(upper)) if upper is not None else n
    pm = None
    for k in range(kmax + 1):
        todo = out < 0
        if not todo.any():
            break
        rows, _ = subspace_table(n, k)
        mono = _coset_mono(s.coeffs, n, k)
        keep = np.flatnonzero(mono.any(axis=1))
        if keep.size == 0:
            continue
        if k == 0:
            out[todo] = 0
            break
        if pm is None:
            pm = _parity_matrix(n)
        covered = np.zeros(size, dtype=bool)
        for lo in range(0, keep.size, 2048):
            part = keep[lo:lo + 2048]
            # coset index of every input under each surviving subspace
            beta = np.zeros((part.size, size), dtype=np.int64)
            for j in range(k):
                beta |= pm[:, rows[part, j]].T << j
            covered |= np.take_along_axis(mono[part], beta, axis=1).any(axis=0)
        out[todo & covered] = k
    if (out < 0).any():
        raise InvariantViolation("parity certificate exceeded the subcube certificate")
    return out


def min_parity_certificate(f: BooleanFunction, spectrum=None) -> int:
    """``C_min_parity(f)``: least k with some monochromatic codim-k coset."""
    _require_cap(f.n)
    s = spectrum or wht(f)
    for k in range(f.n + 1):
        if _coset_mono(s.coeffs, f.n, k).any():
            return k
    raise InvariantViolation("points are monochromatic cosets")


def min_parity_certificate_batch(coeffs: np.ndarray, n: int) -> np.ndarray:
    """Vectorized ``C_min_parity`` for a stack of spectra of shape (B, 2**n)."""
    _require_cap(n)
    coeffs = np.asarray(coeffs, dtype=np.int64)
    out = np.full(coeffs.shape[0], -1, dtype=np.int64)
    for k in range(n + 1):
        todo = np.flatnonzero(out < 0)
        if todo.size == 0:
            break
        for lo in range(0, todo.size, 4096):
            part = todo[lo:lo + 4096]
            hit = _coset_mono(coeffs[part], n, k).any(axis=(1, 2))
            out[part[hit]] = k
    return out


@dataclass(frozen=True)
class FourierWitness:
    support: tuple
    max_abs: Fraction
    abs_sum: Fraction
    codim: int
    negated: bool


def subspace_fourier_witness(f: BooleanFunction, h: AffineConstraintSystem) -> FourierWitness:
    """Parities carrying the Fourier mass forced by a monochromatic subspace.

    With ``f = -1`` on ``h`` (negating ``f`` if it is ``+1`` there), expanding
    the indicator of ``h`` gives ``sum_t b^t fhat(span_t) = -1`` over the
    2**k parities of the constraint span, hence ``sum |fhat(T)| >= 1`` and
    some ``|fhat(T)| >= 2**-k``. Both facts are checked exactly.
    """
    if h.n != f.n:
        raise BadParams("subspace and function have different n")
    pts = h.points()
    vals = f.bits[pts]
    if vals.min() != vals.max():
        bad = int(pts[np.flatnonzero(vals != vals[0])[0]])
        raise NotMonochromatic("function is not constant on the subspace", cell=h, point=bad)
    negated = vals[0] == 0
    g = f.negate() if negated else f
    c = wht(g).coeffs
    span = h.span()
    k = h.codim
    relation = sum(sign * int(c[m]) for m, sign in span)
    if relation != -(1 << f.n):
        raise InvariantViolation(f"indicator expansion gives {relation}, expected {-(1 << f.n)}")
    mags = [abs(int(c[m])) for m, _ in span]
    max_abs = Fraction(max(mags), 1 << f.n)
    abs_sum = Fraction(sum(mags), 1 << f.n)
    if abs_sum < 1 or max_abs * (1 << k) < 1:
        raise InvariantViolation("subspace witness lost its Fourier mass")
    return FourierWitness(tuple(sorted(m for m, _ in span)), max_abs, abs_sum, k, bool(negated))


def fmei_holds(max_abs_coeff: int, n: int, k: int) -> bool:
    """Exact form of ``H_inf <= 2k``: ``max|c| * 2**k >= 2**n``."""
    return max_abs_coeff << k >= 1 << n


def verify_fmei_bound(f: BooleanFunction):
    """``(H_inf, 2 * C_min_parity, holds)``."""
    s = wht(f)
    k = min_parity_certificate(f, s)
    return min_entropy(s), 2 * k, fmei_holds(s.max_abs, f.n, k)
