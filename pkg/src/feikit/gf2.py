"""Affine subspaces of F_2^n given by parity constraints.

A constraint ``(S, b)`` means ``prod_{i in S} x_i = b``; in bit form the
parity of ``index & S`` is 0 when ``b = +1`` and 1 when ``b = -1``.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations

import numpy as np

from .errors import BadParams, SizeLimit

SUBSPACE_N_MAX = 8


def parity(x: int) -> int:
    return bin(x).count("1") & 1


def lowbit_index(x: int) -> int:
    return (x & -x).bit_length() - 1


class AffineConstraintSystem:
    """Independent parity constraints kept in canonical reduced echelon form.

    Pivot of a row is its lowest set bit; rows are sorted by pivot and every
    pivot column is cleared from all other rows. Two systems describe the
    same affine subspace iff their canonical rows are equal.
    """

    __slots__ = ("n", "rows")

    def __init__(self, n: int, rows=()):
        self.n = int(n)
        self.rows = _reduce(self.n, rows)

    @classmethod
    def through_point(cls, n: int, masks, x: int) -> "AffineConstraintSystem":
        """The coset of the given parity space that contains input ``x``."""
        return cls(n, [(m, -1 if parity(m & x) else 1) for m in masks])

    @property
    def codim(self) -> int:
        return len(self.rows)

    @property
    def masks(self) -> tuple[int, ...]:
        return tuple(m for m, _ in self.rows)

    @property
    def pivots(self) -> tuple[int, ...]:
        return tuple(lowbit_index(m) for m, _ in self.rows)

    def span(self) -> list[tuple[int, int]]:
        """Every parity fixed on the subspace with its value, index t over rows."""
        out = [(0, 1)]
        for m, b in self.rows:
            out += [(s ^ m, v * b) for s, v in out]
        return out

    def contains(self, x: int) -> bool:
        return all((1 - 2 * parity(m & x)) == b for m, b in self.rows)

    def points(self) -> np.ndarray:
        """Input indices of the subspace, ascending."""
        piv = self.pivots
        x0 = 0
        for p, (_, b) in zip(piv, self.rows):
            if b == -1:
                x0 |= 1 << p
        basis = []
        for c in range(self.n):
            if c in piv:
                continue
            v = 1 << c
            for p, (m, _) in zip(piv, self.rows):
                if (m >> c) & 1:
                    v |= 1 << p
            basis.append(v)
        pts = np.array([x0], dtype=np.int64)
        for v in basis:
            pts = np.concatenate((pts, pts ^ v))
        return np.sort(pts)

    def indicator_bits(self) -> np.ndarray:
        out = np.zeros(1 << self.n, dtype=bool)
        out[self.points()] = True
        return out

    def __eq__(self, other):
        if not isinstance(other, AffineConstraintSystem):
            return NotImplemented
        return self.n == other.n and self.rows == other.rows

    def __hash__(self):
        return hash((self.n, self.rows))

    def __repr__(self):
        return f"AffineConstraintSystem(n={self.n}, rows={list(self.rows)})"

    def to_json(self) -> dict:
        return {"rows": [{"mask": m, "sign": b} for m, b in self.rows]}

    @classmethod
    def from_json(cls, n: int, data) -> "AffineConstraintSystem":
        try:
            rows = [(int(r["mask"]), int(r["sign"])) for r in data["rows"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise BadParams(f"malformed affine cell: {exc}") from None
        return cls(n, rows)


def _reduce(n, rows):
    work = []
    for m, b in rows:
        m, b = int(m), int(b)
        if b not in (1, -1):
            raise BadParams(f"constraint sign must be +-1, got {b}")
        if m < 0 or m >> n:
            raise BadParams(f"parity mask {m} out of range for n={n}")
        for pm, pb in work:
            if (m >> lowbit_index(pm)) & 1:
                m ^= pm
                b *= pb
        if m == 0:
            if b == -1:
                raise BadParams("constraints are inconsistent (empty subspace)")
            continue
        p = lowbit_index(m)
        for i, (pm, pb) in enumerate(work):
            if (pm >> p) & 1:
                work[i] = (pm ^ m, pb * b)
        work.append((m, b))
    work.sort(key=lambda r: lowbit_index(r[0]))
    return tuple(work)


def _canonical_bases(n, k):
    """Row tuples of every k-dimensional parity space, in canonical RREF."""
    out = []
    for piv in combinations(range(n), k):
        pivset = set(piv)
        free = [[c for c in range(p + 1, n) if c not in pivset] for p in piv]
        flat = [(r, c) for r, cols in enumerate(free) for c in cols]
        vals = np.arange(1 << len(flat), dtype=np.int64)
        rows = np.tile(np.array([1 << p for p in piv], dtype=np.int64), (vals.size, 1))
        for j, (r, c) in enumerate(flat):
            rows[:, r] |= ((vals >> j) & 1) << c
        out.append(rows)
    if not out:
        return np.zeros((1, 0), dtype=np.int64)
    return np.concatenate(out)


@lru_cache(maxsize=None)
def subspace_table(n: int, k: int) -> tuple[np.ndarray, np.ndarray]:
    """All codim-k parity spaces of F_2^n, lexicographically sorted by rows.

    Returns ``(rows, spans)``: rows has shape (N, k), spans has shape
    (N, 2**k) with ``spans[:, t]`` the xor of the rows selected by ``t``.
    """
    if n > SUBSPACE_N_MAX:
        raise SizeLimit(f"subspace enumeration is capped at n <= {SUBSPACE_N_MAX}")
    if not 0 <= k <= n:
        raise BadParams(f"codimension {k} out of range for n={n}")
    rows = _canonical_bases(n, k)
    if k:
        order = np.lexsort(rows.T[::-1])
        rows = rows[order]
    spans = np.zeros((rows.shape[0], 1 << k), dtype=np.int64)
    for j in range(k):
        spans[:, 1 << j:2 << j] = spans[:, :1 << j] ^ rows[:, j:j + 1]
    rows.flags.writeable = False
    spans.flags.writeable = False
    return rows, spans


def gaussian_binomial(n: int, k: int) -> int:
    num = den = 1
    for i in range(k):
        num *= (1 << (n - i)) - 1
        den *= (1 << (i + 1)) - 1
    return num // den
