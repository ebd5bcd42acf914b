"""Flat polynomials and block-multilinear forms."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .core import BooleanFunction, popcounts, shannon_entropy, wht
from .errors import BadParams, InvariantViolation, NotFlat, NotOneEighthApprox, SizeLimit
from .poly import SparsePolynomial, _coeff_from_json, _coeff_to_json

FLAT_TOL = 1e-12
ROUND_TOL = 1e-12
ONE_EIGHTH = Fraction(1, 8)
VERTEX_BUDGET = 1 << 20
RECONSTRUCT_N_MAX = 16


# flat polynomials


@dataclass
class FlatPolynomialReport:
    is_flat: bool
    magnitude: float | None
    alpha: float | None
    sparsity: int
    degree: int
    approximates: bool
    linf_distance: float | None
    nearest: BooleanFunction | None
    eps: float
    entropy: float | None = None
    entropy_bound: float | None = None
    bound_holds: bool | None = None

    def to_json(self) -> dict:
        return {
            "is_flat": self.is_flat,
            "magnitude": self.magnitude,
            "alpha": self.alpha,
            "sparsity": self.sparsity,
            "degree": self.degree,
            "approximates_boolean": self.approximates,
            "linf_distance": self.linf_distance,
            "eps": self.eps,
            "entropy": self.entropy,
            "entropy_bound": self.entropy_bound,
            "bound_holds": self.bound_holds,
        }


def flat_entropy_bound(T: int, eps: float) -> float:
    """``(1 - 4 eps^2) log2(T / (4 (1 + eps)^2))``."""
    return (1 - 4 * eps * eps) * math.log2(T / (4 * (1 + eps) ** 2))


def flat_report(p: SparsePolynomial, eps, require_flat: bool = False) -> FlatPolynomialReport:
    """Flatness, pointwise rounding to a Boolean function and the entropy bound.

    ``p = (alpha / sqrt(T)) sum_S +-chi_S`` when flat. If every value of p is
    within eps of +-1, the rounded function f is reported with its Fourier
    entropy and the check ``H(fhat^2) >= (1 - 4 eps^2) log2(T / (4 (1 + eps)^2))``.
    """
    eps = float(eps)
    if eps < 0:
        raise BadParams("eps must be >= 0")
    if p.n > 24:
        raise SizeLimit("pointwise checks need n <= 24")
    mags = [abs(float(c)) for c in p.terms.values()]
    T = len(mags)
    flat = T > 0 and max(mags) - min(mags) <= FLAT_TOL
    if require_flat and not flat:
        raise NotFlat(f"coefficient magnitudes range over [{min(mags, default=0)}, {max(mags, default=0)}]")
    mag = mags[0] if flat else None
    vals = p.values()
    signs = np.where(vals < 0, -1, 1)
    linf = float(np.abs(vals - signs).max())
    approx = bool(np.all(vals != 0)) and linf <= eps + ROUND_TOL
    nearest = BooleanFunction(p.n, (signs < 0).astype(np.uint8)) if approx else None
    rep = FlatPolynomialReport(
        is_flat=flat, magnitude=mag, alpha=mag * math.sqrt(T) if flat else None, sparsity=T,
        degree=p.degree, approximates=approx, linf_distance=linf, nearest=nearest, eps=eps,
    )
    if approx:
        rep.entropy = shannon_entropy(wht(nearest))
        if flat:
            rep.entropy_bound = flat_entropy_bound(T, eps)
            rep.bound_holds = rep.entropy >= rep.entropy_bound - 1e-9
    return rep


def polynomial_of(f: BooleanFunction) -> SparsePolynomial:
    """Exact Fourier expansion of a Boolean function."""
    c = wht(f).coeffs
    size = 1 << f.n
    return SparsePolynomial(f.n, {int(s): Fraction(int(c[s]), size) for s in np.flatnonzero(c)})


# block-multilinear forms


class BlockMultilinearForm:
    """Polynomial over ``d`` equal blocks of ``n`` variables each.

    Every monomial uses at most one variable from each block. Variables are
    numbered ``0 .. n*d - 1``; monomials are bit masks over them.
    """

    def __init__(self, n: int, d: int, blocks, terms):
        self.n = int(n)
        self.d = int(d)
        self.blocks = [tuple(int(v) for v in b) for b in blocks]
        if self.d < 0 or self.n < 0:
            raise BadParams("block size and block count must be non-negative")
        if len(self.blocks) != self.d:
            raise BadParams(f"expected {d} blocks, got {len(self.blocks)}")
        if any(len(b) != self.n for b in self.blocks):
            raise BadParams("all blocks must have the same size")
        flat = sorted(v for b in self.blocks for v in b)
        if flat != list(range(self.n * self.d)):
            raise BadParams("blocks must partition the variables 0..n*d-1")
        self.block_masks = [sum(1 << v for v in b) for b in self.blocks]
        self.terms: dict[int, object] = {}
        for mask, c in dict(terms).items():
            mask = int(mask)
            if mask >> (self.n * self.d):
                raise BadParams(f"monomial {mask} uses unknown variables")
            for bm in self.block_masks:
                if bin(mask & bm).count("1") > 1:
                    raise BadParams(f"monomial {_vars(mask)} uses two variables of one block")
            if c != 0:
                self.terms[mask] = self.terms.get(mask, 0) + c

    @property
    def nvars(self) -> int:
        return self.n * self.d

    @property
    def degree(self) -> int:
        return max((bin(m).count("1") for m in self.terms), default=0)

    def is_homogeneous(self) -> bool:
        return all(bin(m).count("1") == self.d for m in self.terms)

    def polynomial(self) -> SparsePolynomial:
        return SparsePolynomial(self.nvars, self.terms)

    def values(self) -> np.ndarray:
        if self.nvars > 24:
            raise SizeLimit("dense evaluation needs n*d <= 24")
        return self.polynomial().values()

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "d": self.d,
            "blocks": [list(b) for b in self.blocks],
            "terms": [{"vars": _vars(m), "coeff": _coeff_to_json(c)} for m, c in sorted(self.terms.items())],
        }

    @classmethod
    def from_json(cls, data) -> "BlockMultilinearForm":
        try:
            terms = {}
            for t in data["terms"]:
                vs = [int(v) for v in t["vars"]]
                if len(set(vs)) != len(vs):
                    raise BadParams(f"monomial {vs} repeats a variable")
                m = sum(1 << v for v in vs)
                terms[m] = terms.get(m, 0) + _coeff_from_json(t["coeff"])
            return cls(int(data["n"]), int(data["d"]), data["blocks"], terms)
        except (KeyError, TypeError, ValueError) as exc:
            raise BadParams(f"malformed form JSON: {exc}") from None

    def __repr__(self):
        return f"BlockMultilinearForm(n={self.n}, d={self.d}, terms={len(self.terms)})"


def _vars(mask):
    return [i for i in range(mask.bit_length()) if (mask >> i) & 1]


@dataclass
class QDecomposition:
    block: int
    q0: SparsePolynomial
    q: list  # q_i for the variables of the block, in block order
    variables: tuple


def q_decompose(p: BlockMultilinearForm, block: int | None = None, samples: int = 100, rng=0) -> QDecomposition:
    """Write ``p = q0(z) + sum_i x_i q_i(z)`` for the variables x_i of one block.

    The identity is checked at ``samples`` random points plus the all-ones and
    all-minus-ones points, exactly when the coefficients are rational.
    Defaults to the last block.
    """
    block = p.d - 1 if block is None else int(block)
    if not 0 <= block < p.d:
        raise BadParams(f"block index {block} out of range")
    N = p.nvars
    bm = p.block_masks[block]
    q0 = {}
    qs = [dict() for _ in p.blocks[block]]
    pos = {v: i for i, v in enumerate(p.blocks[block])}
    for m, c in p.terms.items():
        hit = m & bm
        if hit == 0:
            q0[m] = c
        else:
            v = hit.bit_length() - 1
            qs[pos[v]][m ^ hit] = c
    dec = QDecomposition(block, SparsePolynomial(N, q0), [SparsePolynomial(N, q) for q in qs], p.blocks[block])
    rng = np.random.default_rng(rng)
    points = [0, (1 << N) - 1] + [int(v) for v in rng.integers(0, 1 << N, size=samples)] if N else [0]
    poly = p.polynomial()
    for x in points:
        lhs = poly.evaluate(x)
        rhs = dec.q0.evaluate(x)
        for v, q in zip(dec.variables, dec.q):
            rhs += (-1 if (x >> v) & 1 else 1) * q.evaluate(x)
        if not _close(lhs, rhs):
            raise InvariantViolation(f"q-decomposition identity fails at input {x}")
        # cross-check q0 and q_i through restrictions of p
        z = x & ~bm
        ones = poly.evaluate(z)
        if not _close(dec.q0.evaluate(z) * 2, ones + poly.evaluate(z | bm)):
            raise InvariantViolation("q0 disagrees with the averaged restriction")
        for v, q in zip(dec.variables, dec.q):
            if not _close(q.evaluate(z) * 2, ones - poly.evaluate(z | (1 << v))):
                raise InvariantViolation("q_i disagrees with the differenced restriction")
    return dec


def _close(a, b):
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a == b
    return abs(float(a) - float(b)) <= 1e-9


def check_one_eighth(p: BlockMultilinearForm) -> BooleanFunction:
    """The Boolean function p rounds to, if p is within 1/8 of it everywhere."""
    if p.nvars > 24:
        raise SizeLimit("pointwise checks need n*d <= 24")
    vals = p.values()
    signs = np.where(vals < 0, -1, 1)
    resid = np.abs(vals - signs)
    bad = np.flatnonzero((resid > 0.125 + ROUND_TOL) | (vals == 0))
    if bad.size:
        x = int(bad[0])
        raise NotOneEighthApprox(f"|p - sign(p)| = {resid[x]:.6g} > 1/8 at input {x}", point=x)
    return BooleanFunction(p.nvars, (signs < 0).astype(np.uint8))


def _in_intervals(v: float) -> bool:
    a = abs(v)
    return a <= 0.125 + ROUND_TOL or 0.875 - ROUND_TOL <= a <= 1.125 + ROUND_TOL


def verify_q_structure(p: BlockMultilinearForm, block: int | None = None) -> dict:
    """For every z, each q_i(z) is near 0 or +-1 and exactly one is large.

    Returns the map ``z -> j`` (z as the input index with the block zeroed,
    j the position inside the block).
    """
    check_one_eighth(p)
    dec = q_decompose(p, block)
    bm = p.block_masks[dec.block]
    N = p.nvars
    if not dec.q:
        raise NotOneEighthApprox("the block is empty, so no q value can be large")
    table = np.stack([q.values() for q in dec.q])
    out = {}
    for z in range(1 << N):
        if z & bm:
            continue
        qv = table[:, z]
        for v in qv:
            if not _in_intervals(v):
                raise NotOneEighthApprox(f"q value {v:.6g} at z={z} is in no allowed interval", point=z)
        large = np.flatnonzero(np.abs(qv) >= 0.875 - ROUND_TOL)
        if large.size != 1:
            raise NotOneEighthApprox(f"{large.size} large q values at z={z}", point=z)
        j = int(large[0])
        rest = float(np.abs(qv).sum() - abs(qv[j]))
        if rest > 0.125 + ROUND_TOL:
            raise NotOneEighthApprox(f"small q values sum to {rest:.6g} > 1/8 at z={z}", point=z)
        out[z] = j
    return out


def reconstruct_boolean(p: BlockMultilinearForm):
    """Exact degree-<=d representation of the Boolean function p approximates.

    Restricting the last block to all-ones, and to all-ones with one
    coordinate flipped, gives k+1 forms on d-1 blocks that still approximate
    Boolean functions. Their exact reconstructions determine
    ``q~_i = (g~_0 - g~_i) / 2`` and ``q~_0 = g~_0 - sum q~_i``. A degree-1 form
    rounds to ``sign(a_j) x_j`` for its unique large coefficient; degree 0 to
    ``sign(c)``. Returns ``(p~, f)``; p~ is checked to equal f everywhere.
    """
    if p.nvars > RECONSTRUCT_N_MAX:
        raise SizeLimit(f"reconstruction is capped at n*d <= {RECONSTRUCT_N_MAX}")
    if not p.is_homogeneous():
        raise BadParams("reconstruction needs a homogeneous form (one variable per block in every monomial)")
    f = check_one_eighth(p)
    blocks = [list(b) for b in p.blocks]
    terms = {m: Fraction(c) if not isinstance(c, float) else Fraction(repr(c)) for m, c in p.terms.items()}
    exact = _reconstruct(terms, blocks)
    N = p.nvars
    size = 1 << N
    c = wht(f).coeffs
    want = {int(s): Fraction(int(c[s]), size) for s in np.flatnonzero(c)}
    if exact != want:
        raise InvariantViolation("reconstructed polynomial differs from the rounded function")
    pt = SparsePolynomial(N, exact)
    if pt.degree > p.d:
        raise InvariantViolation("reconstruction exceeded degree d")
    return pt, f


def _restrict(terms: dict, assign_mask: int, minus_bits: int) -> dict:
    """Substitute the variables in ``assign_mask``; ``minus_bits`` marks -1s."""
    out = {}
    for m, c in terms.items():
        hit = m & assign_mask
        if bin(hit & minus_bits).count("1") & 1:
            c = -c
        key = m ^ hit
        out[key] = out.get(key, 0) + c
    return {k: v for k, v in out.items() if v != 0}


def _round(v: Fraction) -> int:
    if abs(v - 1) <= ONE_EIGHTH:
        return 1
    if abs(v + 1) <= ONE_EIGHTH:
        return -1
    raise NotOneEighthApprox(f"value {float(v):.6g} is not within 1/8 of +-1")


def _reconstruct(terms: dict, blocks: list) -> dict:
    if not blocks:
        return {0: Fraction(_round(terms.get(0, Fraction(0))))}
    if len(blocks) == 1:
        mags = {m: c for m, c in terms.items() if m}
        large = [m for m, c in mags.items() if abs(c) >= Fraction(7, 8)]
        if len(large) != 1 or terms.get(0, 0) != 0:
            raise NotOneEighthApprox("degree-1 form has no unique dominant variable")
        m = large[0]
        return {m: Fraction(1 if mags[m] > 0 else -1)}
    last, rest = blocks[-1], blocks[:-1]
    bm = sum(1 << v for v in last)
    g0 = _reconstruct(_restrict(terms, bm, 0), rest)
    out = dict(g0)
    for v in last:
        gi = _reconstruct(_restrict(terms, bm, 1 << v), rest)
        # q~_i = (g0 - gi) / 2, multiplied by x_v
        for m in set(g0) | set(gi):
            qi = (g0.get(m, 0) - gi.get(m, 0)) / 2
            if qi:
                out[m] = out.get(m, 0) - qi
                out[m | (1 << v)] = out.get(m | (1 << v), 0) + qi
    return {m: c for m, c in out.items() if c != 0}


def selector_form(blocks, a: int, b: int, g: dict, h: dict) -> dict:
    """Terms of ``x_a (g + h) / 2 + x_b (g - h) / 2``."""
    out = {}
    for m in set(g) | set(h):
        s = (g.get(m, 0) + h.get(m, 0)) / 2
        t = (g.get(m, 0) - h.get(m, 0)) / 2
        if s:
            out[m | (1 << a)] = out.get(m | (1 << a), 0) + s
        if t:
            out[m | (1 << b)] = out.get(m | (1 << b), 0) + t
    return out


def random_boolean_form(n: int, d: int, rng) -> BlockMultilinearForm:
    """A random homogeneous block-multilinear form that is Boolean-valued.

    Built block by block: from Boolean forms g, h on the earlier blocks,
    take ``+-x_a g`` or the selector ``x_a (g + h)/2 + x_b (g - h)/2``.
    Block j holds variables ``j*n .. j*n + n - 1``.
    """
    rng = np.random.default_rng(rng)
    blocks = [list(range(j * n, (j + 1) * n)) for j in range(d)]

    def build(j):
        if j == 0:
            return {0: Fraction(1 if rng.integers(2) else -1)}
        if n >= 2 and rng.integers(3):
            a, b = (int(v) for v in rng.choice(blocks[j - 1], size=2, replace=False))
            return selector_form(blocks, a, b, build(j - 1), build(j - 1))
        a = int(rng.choice(blocks[j - 1]))
        sgn = 1 if rng.integers(2) else -1
        return {m | (1 << a): sgn * c for m, c in build(j - 1).items()}

    return BlockMultilinearForm(n, d, blocks, build(d))


def perturb_form(p: BlockMultilinearForm, total: Fraction, rng) -> BlockMultilinearForm:
    """Add rational noise of total absolute size ``total`` on allowed monomials.

    Noise goes on homogeneous monomials (one variable per block), so the
    sup-norm change is at most ``total``.
    """
    rng = np.random.default_rng(rng)
    count = int(rng.integers(1, 9))
    weights = rng.integers(1, 100, size=count)
    shares = [Fraction(int(w), int(weights.sum())) * total for w in weights]
    terms = dict(p.terms)
    for share in shares:
        m = 0
        for b in p.blocks:
            m |= 1 << int(rng.choice(b))
        sgn = 1 if rng.integers(2) else -1
        terms[m] = terms.get(m, 0) + sgn * share
    return BlockMultilinearForm(p.n, p.d, p.blocks, terms)


# Bohnenblust-Hille quantities


def bh_constant(d: int) -> float:
    """Classical constant ``d^((d+1)/(2d)) 2^((d-1)/2)``."""
    if d < 1:
        raise BadParams("the constant needs d >= 1")
    return d ** ((d + 1) / (2 * d)) * 2 ** ((d - 1) / 2)


@dataclass
class BhReport:
    lhs: float
    norm: float
    constant: float
    ratio: float
    exact: bool
    argmax: int | None = None
    notes: list = field(default_factory=list)

    @property
    def holds(self) -> bool | None:
        return self.ratio <= self.constant + 1e-9 if self.exact else None

    def to_json(self) -> dict:
        return {
            "lhs": self.lhs,
            "norm": self.norm,
            "constant": self.constant,
            "ratio": self.ratio,
            "norm_exact": self.exact,
            "heuristic": not self.exact,
            "holds": self.holds,
        }


def bh_quantities(p: BlockMultilinearForm, restarts: int = 32, rng=0) -> BhReport:
    """``(sum |c|^(2d/(d+1)))^((d+1)/(2d))`` against the sup norm of p.

    p is multilinear, so its maximum modulus over the solid cube is attained
    at a vertex. Vertices are enumerated when ``n**d * 2**(n d) <= 2**20``;
    otherwise a seeded coordinate ascent gives a lower bound on the norm and
    the report is flagged heuristic.
    """
    d = p.d
    if d < 1:
        raise BadParams("Bohnenblust-Hille quantities need d >= 1")
    q = 2 * d / (d + 1)
    lhs = sum(abs(float(c)) ** q for c in p.terms.values()) ** (1 / q)
    C = bh_constant(d)
    exact = p.n ** d * 2 ** p.nvars <= VERTEX_BUDGET
    if exact:
        vals = np.abs(p.values())
        x = int(np.argmax(vals))
        norm = float(vals[x])
    else:
        norm, x = _ascent(p, restarts, rng)
    ratio = lhs / norm if norm > 0 else math.inf
    return BhReport(lhs, norm, C, ratio, exact, x)


def _ascent(p, restarts, rng):
    rng = np.random.default_rng(rng)
    N = p.nvars
    masks = list(p.terms)
    coeffs = np.array([float(p.terms[m]) for m in masks])
    incid = np.array([[(m >> v) & 1 for v in range(N)] for m in masks], dtype=np.int64).reshape(len(masks), N)
    best, arg = 0.0, 0
    for r in range(restarts):
        x = rng.integers(0, 2, size=N)
        for target in (1.0, -1.0):
            improved = True
            while improved:
                improved = False
                for v in range(N):
                    par = (incid @ x) & 1
                    cur = target * float(coeffs @ (1 - 2 * par))
                    x[v] ^= 1
                    par2 = (incid @ x) & 1
                    new = target * float(coeffs @ (1 - 2 * par2))
                    if new > cur + 1e-15:
                        improved = True
                    else:
                        x[v] ^= 1
            par = (incid @ x) & 1
            val = abs(float(coeffs @ (1 - 2 * par)))
            if val > best:
                best, arg = val, int(sum(int(b) << i for i, b in enumerate(x)))
    return best, arg


def level_mass(f: BooleanFunction, d: int):
    """``sum_{|S|=d} |fhat(S)|`` exactly, and whether it is >= sqrt(C(n,d))/3."""
    if not 0 <= d <= f.n:
        raise BadParams(f"level must lie in 0..{f.n}")
    c = wht(f).coeffs
    pick = popcounts(f.n) == d
    mass = Fraction(int(np.abs(c[pick]).sum()), 1 << f.n)
    return mass, 9 * mass * mass >= math.comb(f.n, d)
