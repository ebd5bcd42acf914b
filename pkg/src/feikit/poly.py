"""Sparse multilinear polynomials over {-1,1}^n in the parity basis."""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational

import numpy as np

from .core import butterfly, popcounts
from .errors import BadParams, SizeLimit

DUST = 1e-12


def _as_coeff(c):
    if isinstance(c, (Rational, Fraction)):
        return Fraction(c)
    if isinstance(c, (np.integer,)):
        return Fraction(int(c))
    return float(c)


class SparsePolynomial:
    """``p(x) = sum_S c_S chi_S(x)`` with terms stored as ``{mask: c_S}``.

    Coefficients may be floats or Fractions; exact inputs stay exact.
    """

    def __init__(self, n: int, terms=None):
        if n < 0:
            raise BadParams("variable count must be non-negative")
        self.n = int(n)
        self.terms: dict[int, object] = {}
        for mask, c in dict(terms or {}).items():
            mask = int(mask)
            if mask < 0 or mask >> self.n:
                raise BadParams(f"monomial mask {mask} out of range for n={n}")
            c = _as_coeff(c)
            if c != 0:
                self.terms[mask] = c

    @classmethod
    def from_dense(cls, n, coeffs, dust=DUST):
        arr = np.asarray(coeffs, dtype=float)
        keep = np.flatnonzero(np.abs(arr) > dust)
        return cls(n, {int(s): float(arr[s]) for s in keep})

    def pruned(self, dust=DUST) -> "SparsePolynomial":
        return SparsePolynomial(self.n, {s: c for s, c in self.terms.items() if abs(c) > dust})

    @property
    def degree(self) -> int:
        return max((bin(s).count("1") for s in self.terms), default=0)

    @property
    def sparsity(self) -> int:
        return len(self.terms)

    @property
    def spectral_norm(self):
        return sum((abs(c) for c in self.terms.values()), start=0)

    @property
    def is_exact(self) -> bool:
        return all(isinstance(c, Fraction) for c in self.terms.values())

    def dense(self) -> np.ndarray:
        if self.n > 24:
            raise SizeLimit("dense coefficient vector needs n <= 24")
        out = np.zeros(1 << self.n)
        for s, c in self.terms.items():
            out[s] = float(c)
        return out

    def values(self) -> np.ndarray:
        """Float values at every point of the cube, by input index."""
        return butterfly(self.dense())

    def evaluate(self, x):
        """Evaluate at an input index or a +-1 coordinate sequence.

        Exact coefficients give an exact Fraction.
        """
        if isinstance(x, (int, np.integer)):
            index = int(x)
        else:
            index = sum(1 << j for j, v in enumerate(x) if v == -1)
        total = Fraction(0) if self.is_exact else 0.0
        for s, c in self.terms.items():
            total += -c if popcounts_int(s & index) & 1 else c
        return total

    def __add__(self, other):
        _same_n(self, other)
        out = dict(self.terms)
        for s, c in other.terms.items():
            out[s] = out.get(s, 0) + c
        return SparsePolynomial(self.n, out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, k) -> "SparsePolynomial":
        return SparsePolynomial(self.n, {s: c * k for s, c in self.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, SparsePolynomial):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __repr__(self):
        return f"SparsePolynomial(n={self.n}, terms={len(self.terms)})"

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "terms": [{"mask": s, "coeff": _coeff_to_json(c)} for s, c in sorted(self.terms.items())],
        }

    @classmethod
    def from_json(cls, data) -> "SparsePolynomial":
        try:
            n = int(data["n"])
            terms = {}
            for t in data["terms"]:
                terms[int(t["mask"])] = terms.get(int(t["mask"]), 0) + _coeff_from_json(t["coeff"])
        except (KeyError, TypeError, ValueError) as exc:
            raise BadParams(f"malformed polynomial JSON: {exc}") from None
        return cls(n, terms)


def _coeff_to_json(c):
    # exact rationals go out as "p/q" strings so a round trip loses nothing
    if isinstance(c, Fraction):
        return int(c) if c.denominator == 1 else str(c)
    return float(c)


def _coeff_from_json(value):
    # Decimal literals are read exactly so rational inputs stay rational.
    if isinstance(value, bool):
        raise ValueError("boolean coefficient")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, str):
        return Fraction(value)
    raise ValueError(f"bad coefficient {value!r}")


def popcounts_int(x: int) -> int:
    return bin(x).count("1")


def _same_n(a, b):
    if a.n != b.n:
        raise BadParams(f"variable counts differ: {a.n} vs {b.n}")


def degree_of_dense(coeffs) -> int:
    arr = np.asarray(coeffs)
    n = arr.size.bit_length() - 1
    supp = np.flatnonzero(arr)
    return int(popcounts(n)[supp].max()) if supp.size else 0
