"""Truth tables, the integer Walsh-Hadamard transform and spectral measures.

Conventions used throughout the package:

* ``f : {-1,1}^n -> {-1,1}`` with TRUE = -1 and FALSE = +1.
* Input index ``i`` encodes the point whose coordinate ``j`` is
  ``(-1)**((i >> j) & 1)``; a stored bit 1 means ``f = -1``.
* Subsets of ``[n]`` are little-endian bit masks (variable ``j`` is bit ``j``).
* Spectra are kept as exact integers ``2**n * fhat(S)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from .errors import BadParams, ConstantFunction, NotBooleanValued, SizeLimit

N_MAX = 24

DEFAULT_RENYI_ORDERS = (0.0, 0.5, 1.5, 2.0, 3.0)


def _popcount_table(n: int) -> np.ndarray:
    pc = np.zeros(1 << n, dtype=np.int64)
    for j in range(n):
        pc[1 << j:2 << j] = pc[:1 << j] + 1
    return pc


def popcounts(n: int) -> np.ndarray:
    """Popcount of every mask in ``range(2**n)``."""
    return _POPCOUNT_CACHE.setdefault(n, _popcount_table(n))


_POPCOUNT_CACHE: dict[int, np.ndarray] = {}


def _check_n(n: int) -> None:
    if not isinstance(n, (int, np.integer)) or n < 0:
        raise BadParams(f"variable count must be a non-negative integer, got {n!r}")
    if n > N_MAX:
        raise SizeLimit(f"n={n} exceeds the cap of {N_MAX} variables")


class BooleanFunction:
    """Immutable truth table of a Boolean function on ``n`` variables."""

    __slots__ = ("n", "_bits")

    def __init__(self, n: int, bits):
        _check_n(n)
        arr = np.array(bits, dtype=np.uint8).reshape(-1)
        if arr.size != 1 << n:
            raise BadParams(f"table length {arr.size} != 2**{n}")
        if arr.size and arr.max() > 1:
            raise BadParams("table entries must be 0 or 1")
        arr.flags.writeable = False
        self.n = int(n)
        self._bits = arr

    @classmethod
    def from_int(cls, n: int, value: int) -> "BooleanFunction":
        """Table whose bit ``i`` is bit ``i`` of the integer ``value``."""
        _check_n(n)
        size = 1 << n
        if value < 0 or value >> size:
            raise BadParams(f"integer {value} does not fit a table of {size} bits")
        raw = np.frombuffer(value.to_bytes((size + 7) // 8, "little"), dtype=np.uint8)
        bits = np.unpackbits(raw, bitorder="little")[:size]
        return cls(n, bits)

    @classmethod
    def from_values(cls, n: int, values) -> "BooleanFunction":
        vals = np.asarray(values)
        if not np.all((vals == 1) | (vals == -1)):
            raise NotBooleanValued("values must all be +1 or -1")
        return cls(n, (vals == -1).astype(np.uint8))

    @property
    def bits(self) -> np.ndarray:
        return self._bits

    @property
    def values(self) -> np.ndarray:
        return 1 - 2 * self._bits.astype(np.int64)

    def __call__(self, x) -> int:
        return 1 - 2 * int(self._bits[point_index(self.n, x)])

    def to_int(self) -> int:
        packed = np.packbits(self._bits, bitorder="little")
        return int.from_bytes(packed.tobytes(), "little")

    def to_hex(self) -> str:
        width = max(1, (1 << self.n) // 4)
        return format(self.to_int(), f"0{width}x")

    def negate(self) -> "BooleanFunction":
        return BooleanFunction(self.n, 1 - self._bits)

    def is_constant(self) -> bool:
        return bool(self._bits.min() == self._bits.max())

    def __eq__(self, other):
        if not isinstance(other, BooleanFunction):
            return NotImplemented
        return self.n == other.n and np.array_equal(self._bits, other._bits)

    def __hash__(self):
        return hash((self.n, self._bits.tobytes()))

    def __repr__(self):
        if self.n <= 6:
            return f"BooleanFunction(n={self.n}, hex={self.to_hex()})"
        return f"BooleanFunction(n={self.n})"


def point_index(n: int, x) -> int:
    """Accept an input index or a sequence of +-1 coordinates."""
    if isinstance(x, (int, np.integer)):
        if not 0 <= x < 1 << n:
            raise BadParams(f"input index {x} out of range for n={n}")
        return int(x)
    coords = list(x)
    if len(coords) != n or any(c not in (1, -1) for c in coords):
        raise BadParams(f"point must have {n} coordinates in {{-1, +1}}")
    return sum(1 << j for j, c in enumerate(coords) if c == -1)


def point_coords(n: int, index: int) -> tuple[int, ...]:
    return tuple(-1 if (index >> j) & 1 else 1 for j in range(n))


@dataclass(frozen=True, eq=False)
class FourierSpectrum:
    """Integer-scaled spectrum: ``coeffs[S] == 2**n * fhat(S)``."""

    n: int
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.array(self.coeffs, dtype=np.int64).reshape(-1)
        if arr.size != 1 << self.n:
            raise BadParams(f"spectrum length {arr.size} != 2**{self.n}")
        arr.flags.writeable = False
        object.__setattr__(self, "coeffs", arr)

    def fhat(self, mask: int) -> Fraction:
        return Fraction(int(self.coeffs[mask]), 1 << self.n)

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.coeffs)

    @property
    def degree(self) -> int:
        supp = self.support
        if supp.size == 0:
            return 0
        return int(popcounts(self.n)[supp].max())

    @property
    def max_abs(self) -> int:
        return int(np.abs(self.coeffs).max())

    def parseval_ok(self) -> bool:
        return int(np.dot(self.coeffs, self.coeffs)) == 1 << (2 * self.n)

    def granularity_ok(self) -> bool:
        step = 1 << (self.n - self.degree)
        return bool(np.all(self.coeffs % step == 0))

    def to_json(self) -> dict:
        return {str(s): int(c) for s, c in enumerate(self.coeffs)}

    @classmethod
    def from_json(cls, data: dict) -> "FourierSpectrum":
        size = len(data)
        n = size.bit_length() - 1
        if size == 0 or 1 << n != size:
            raise BadParams("spectrum JSON must have 2**n entries")
        coeffs = [int(data[str(s)]) for s in range(size)]
        return cls(n, coeffs)

    def __eq__(self, other):
        if not isinstance(other, FourierSpectrum):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.coeffs, other.coeffs)


def butterfly(a: np.ndarray) -> np.ndarray:
    """Unnormalized Walsh-Hadamard transform along the last axis.

    Works for any numeric dtype and any leading batch shape. Entry ``S`` of
    the result is ``sum_x a[x] * (-1)**popcount(x & S)``.
    """
    a = np.array(a, copy=True)
    lead = a.shape[:-1]
    size = a.shape[-1]
    h = 1
    while h < size:
        a = a.reshape(*lead, -1, 2, h)
        x = a[..., 0, :]
        y = a[..., 1, :]
        a = np.stack((x + y, x - y), axis=-2)
        h *= 2
    return a.reshape(*lead, size)


def wht(f: BooleanFunction) -> FourierSpectrum:
    return FourierSpectrum(f.n, butterfly(f.values))


def inverse_wht(s: FourierSpectrum) -> BooleanFunction:
    # H * H = 2^n I, so the same butterfly inverts up to a 2^n factor.
    scaled = butterfly(s.coeffs)
    size = 1 << s.n
    bad = np.flatnonzero(np.abs(scaled) != size)
    if bad.size:
        x = int(bad[0])
        raise NotBooleanValued(
            f"reconstructed value at input {x} is {Fraction(int(scaled[x]), size)}, not +-1"
        )
    return BooleanFunction(s.n, (scaled < 0).astype(np.uint8))


@dataclass(frozen=True)
class MeasureProfile:
    shannon_entropy: float
    min_entropy: float
    renyi: dict
    total_influence: float
    per_coordinate_influence: tuple
    variance: float
    degree: int
    max_coeff_abs: float
    spectral_norm: float


def _log_inv_weights(s: FourierSpectrum) -> tuple[np.ndarray, np.ndarray]:
    """Nonzero weights fhat^2 and the matching log2(1/fhat^2), from integers."""
    c = np.abs(s.coeffs[s.coeffs != 0]).astype(np.float64)
    logs = 2.0 * s.n - 2.0 * np.log2(c)
    return c * c / float(1 << (2 * s.n)), logs


def shannon_entropy(s: FourierSpectrum) -> float:
    w, logs = _log_inv_weights(s)
    return float(np.dot(w, logs))


def min_entropy(s: FourierSpectrum) -> float:
    return 2.0 * s.n - 2.0 * math.log2(s.max_abs)


def renyi_entropy(s: FourierSpectrum, alpha: float) -> float:
    """Order-``alpha`` Renyi entropy of the Fourier distribution, in bits."""
    if alpha < 0:
        raise BadParams("Renyi order must be >= 0")
    if alpha == 1:
        return shannon_entropy(s)
    if math.isinf(alpha):
        return min_entropy(s)
    c = np.abs(s.coeffs[s.coeffs != 0]).astype(np.float64)
    if alpha == 0:
        return math.log2(c.size)
    # Factor out the largest coefficient so the power sum stays in range.
    top = c.max()
    total = np.sum((c / top) ** (2.0 * alpha))
    log_sum = math.log2(total) + 2.0 * alpha * math.log2(top) - 2.0 * alpha * s.n
    return log_sum / (1.0 - alpha)


def influences_exact(s: FourierSpectrum) -> list[Fraction]:
    """``Inf_i(f) = sum_{S containing i} fhat(S)^2`` for every coordinate."""
    c2 = s.coeffs * s.coeffs
    denom = 1 << (2 * s.n)
    out = []
    for i in range(s.n):
        part = c2.reshape(-1, 2, 1 << i)[:, 1, :]
        out.append(Fraction(int(part.sum()), denom))
    return out


def total_influence_exact(s: FourierSpectrum) -> Fraction:
    c2 = s.coeffs * s.coeffs
    return Fraction(int(np.dot(popcounts(s.n), c2)), 1 << (2 * s.n))


def variance_exact(s: FourierSpectrum) -> Fraction:
    c0 = int(s.coeffs[0])
    return 1 - Fraction(c0 * c0, 1 << (2 * s.n))


def measures(s: FourierSpectrum, renyi_orders: Sequence[float] = DEFAULT_RENYI_ORDERS) -> MeasureProfile:
    per_coord = influences_exact(s)
    return MeasureProfile(
        shannon_entropy=shannon_entropy(s),
        min_entropy=min_entropy(s),
        renyi={float(a): renyi_entropy(s, a) for a in renyi_orders},
        total_influence=float(total_influence_exact(s)),
        per_coordinate_influence=tuple(float(v) for v in per_coord),
        variance=float(variance_exact(s)),
        degree=s.degree,
        max_coeff_abs=s.max_abs / float(1 << s.n),
        spectral_norm=float(np.abs(s.coeffs).sum()) / float(1 << s.n),
    )


def tensor(f: BooleanFunction, g: BooleanFunction) -> BooleanFunction:
    """``h(x, y) = f(x) * g(y)``; ``f`` takes the low variables."""
    if f.n + g.n > N_MAX:
        raise SizeLimit(f"tensor product would have {f.n + g.n} > {N_MAX} variables")
    table = g.bits[:, None] ^ f.bits[None, :]
    return BooleanFunction(f.n + g.n, table.reshape(-1))


def tensor_power(f: BooleanFunction, m: int) -> BooleanFunction:
    if m < 1:
        raise BadParams("tensor power needs m >= 1")
    out = f
    for _ in range(m - 1):
        out = tensor(out, f)
    return out


def construct(kind: str, **params) -> BooleanFunction:
    """Build one of the standard functions.

    Kinds and their parameters: ``constant(n, value=+1)``, ``dictator(n, i)``,
    ``and(n)``, ``or(n)``, ``parity(n)``, ``majority(n)`` (odd n),
    ``tribes(w, s)``, ``inner_product(n)`` (even n), ``or_ip(n)`` (even n),
    ``address(a)`` with ``n = a + 2**a``. Coordinates are 0-based.
    """
    builder = _CONSTRUCTORS.get(kind)
    if builder is None:
        raise BadParams(f"unknown function kind {kind!r}; choose from {sorted(_CONSTRUCTORS)}")
    try:
        return builder(**params)
    except TypeError as exc:
        raise BadParams(f"bad parameters for {kind}: {exc}") from None


def _indices(n: int) -> np.ndarray:
    _check_n(n)
    return np.arange(1 << n, dtype=np.int64)


def _bit(idx: np.ndarray, j: int) -> np.ndarray:
    return (idx >> j) & 1


def _constant(n, value=1):
    if value not in (1, -1):
        raise BadParams("constant value must be +1 or -1")
    return BooleanFunction(n, np.full(1 << n, 1 if value == -1 else 0, dtype=np.uint8))


def _dictator(n, i=0):
    if not 0 <= i < n:
        raise BadParams(f"dictator coordinate {i} out of range for n={n}")
    return BooleanFunction(n, _bit(_indices(n), i))


def _and(n):
    return BooleanFunction(n, (_indices(n) == (1 << n) - 1).astype(np.uint8))


def _or(n):
    return BooleanFunction(n, (_indices(n) != 0).astype(np.uint8))


def _parity(n):
    return BooleanFunction(n, popcounts(n) & 1)


def _majority(n):
    if n % 2 == 0:
        raise BadParams("majority needs an odd number of variables")
    return BooleanFunction(n, (2 * popcounts(n) > n).astype(np.uint8))


def _tribes(w, s):
    if w < 1 or s < 1:
        raise BadParams("tribes needs width >= 1 and at least one tribe")
    n = w * s
    idx = _indices(n)
    group = (1 << w) - 1
    out = np.zeros(idx.size, dtype=bool)
    for t in range(s):
        out |= ((idx >> (t * w)) & group) == group
    return BooleanFunction(n, out.astype(np.uint8))


def _ip_bits(n):
    if n % 2 or n == 0:
        raise BadParams("inner product needs a positive even number of variables")
    idx = _indices(n)
    m = n // 2
    acc = np.zeros(idx.size, dtype=np.int64)
    for j in range(m):
        acc ^= _bit(idx, j) & _bit(idx, j + m)
    return idx, acc


def _inner_product(n):
    _, acc = _ip_bits(n)
    return BooleanFunction(n, acc)


def _or_ip(n):
    idx, acc = _ip_bits(n)
    return BooleanFunction(n, acc | _bit(idx, 0))


def _address(a):
    if a < 1:
        raise BadParams("address function needs at least one address bit")
    n = a + (1 << a)
    idx = _indices(n)
    addr = idx & ((1 << a) - 1)
    return BooleanFunction(n, (idx >> (a + addr)) & 1)


_CONSTRUCTORS = {
    "constant": _constant,
    "dictator": _dictator,
    "and": _and,
    "or": _or,
    "parity": _parity,
    "majority": _majority,
    "tribes": _tribes,
    "inner_product": _inner_product,
    "or_ip": _or_ip,
    "address": _address,
}


class KKLRatio(NamedTuple):
    max_influence: float
    var_log_term: float
    ratio: float


def kkl_ratio(f: BooleanFunction) -> KKLRatio:
    """Inf(f) / (Var(f) * log(1/max_i Inf_i)); the constant c is never fixed.

    When some coordinate has influence 1 the log term is 0 and the ratio is
    reported as ``inf``.
    """
    if f.is_constant():
        raise ConstantFunction("KKL ratio is undefined for a constant function")
    s = wht(f)
    max_inf = max(influences_exact(s))
    var = variance_exact(s)
    total = total_influence_exact(s)
    if max_inf >= 1:
        return KKLRatio(float(max_inf), 0.0, math.inf)
    log_term = float(var) * math.log2(1 / max_inf)
    return KKLRatio(float(max_inf), log_term, float(total) / log_term)
