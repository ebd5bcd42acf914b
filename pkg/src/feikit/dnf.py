"""DNF formulas: parsing, compilation, read-k checks and sparse approximation.

Grammar (whitespace ignored)::

    formula := term ('|' term)*
    term    := '(' conj ')' | conj
    conj    := literal ('&' literal)*
    literal := '!'* 'x' <int>            # variables are 1-based

A satisfied term makes the output TRUE, i.e. -1. A positive literal ``xj``
is satisfied when coordinate ``j - 1`` is -1 (stored bit 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .certificates import certificate_aggregates, fmei_holds, min_parity_certificate
from .core import (BooleanFunction, N_MAX, influences_exact, min_entropy, shannon_entropy,
                   total_influence_exact, variance_exact, wht)
from .errors import BadParams, ConstantFunction, DuplicateLiteral, InvariantViolation, ParseError, SizeLimit
from .partitions import to_fraction
from .poly import SparsePolynomial

MANSOUR_N_MAX = 16


@dataclass(frozen=True)
class DnfFormula:
    n: int
    terms: tuple  # each term: tuple of (coordinate, positive) sorted by coordinate

    def __post_init__(self):
        if not self.terms:
            raise BadParams("a DNF needs at least one term")
        for term in self.terms:
            coords = [c for c, _ in term]
            if len(set(coords)) != len(coords):
                raise DuplicateLiteral(f"term {term} uses a variable twice")
            if any(not 0 <= c < self.n for c in coords):
                raise BadParams(f"term {term} has a variable outside 1..{self.n}")

    @property
    def t(self) -> int:
        return len(self.terms)

    def occurrences(self) -> list[int]:
        occ = [0] * self.n
        for term in self.terms:
            for c, _ in term:
                occ[c] += 1
        return occ

    @property
    def read_k(self) -> int:
        return max(1, max(self.occurrences(), default=0))

    @property
    def min_term_size(self) -> int:
        return min(len(t) for t in self.terms)

    def __str__(self):
        return format_dnf(self)


def _lit(c, pos):
    return f"{'' if pos else '!'}x{c + 1}"


def format_dnf(d: DnfFormula) -> str:
    return " | ".join("(" + " & ".join(_lit(c, p) for c, p in term) + ")" for term in d.terms)


class _Lexer:
    def __init__(self, text):
        self.text = text
        self.pos = 0

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self, ch):
        if self.peek() != ch:
            found = self.peek() or "end of input"
            raise ParseError(f"expected {ch!r}, found {found!r}", self.pos)
        self.pos += 1


def parse_dnf(text: str, n: int | None = None) -> DnfFormula:
    """Parse a DNF; ``n`` defaults to the largest variable index used."""
    lx = _Lexer(text)
    terms = []
    while True:
        paren = lx.peek() == "("
        if paren:
            lx.take("(")
        term, seen = [], {}
        while True:
            start = lx.pos
            neg = False
            while lx.peek() == "!":
                lx.take("!")
                neg = not neg
            lx.skip()
            if lx.peek() != "x":
                raise ParseError(f"expected a variable, found {lx.peek() or 'end of input'!r}", lx.pos)
            lx.pos += 1
            digits_at = lx.pos
            while lx.pos < len(text) and text[lx.pos].isdigit():
                lx.pos += 1
            if lx.pos == digits_at:
                raise ParseError("variable name needs an index", digits_at)
            idx = int(text[digits_at:lx.pos])
            if idx < 1:
                raise ParseError("variables are numbered from 1", digits_at)
            if idx in seen:
                raise DuplicateLiteral(f"x{idx} appears twice in one term", start)
            seen[idx] = True
            term.append((idx - 1, not neg))
            if lx.peek() == "&":
                lx.take("&")
                continue
            break
        if paren:
            lx.take(")")
        terms.append(tuple(sorted(term)))
        if lx.peek() == "|":
            lx.take("|")
            continue
        if lx.peek():
            raise ParseError(f"unexpected {lx.peek()!r}", lx.pos)
        break
    used = max(c for term in terms for c, _ in term) + 1
    if n is None:
        n = used
    elif n < used:
        raise BadParams(f"formula uses x{used} but n={n}")
    return DnfFormula(int(n), tuple(terms))


def read_dnf_file(text: str) -> DnfFormula:
    """DNF file: optional ``n=<k>`` line, then the formula (may span lines)."""
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    n = None
    if lines and lines[0].replace(" ", "").startswith("n="):
        try:
            n = int(lines[0].replace(" ", "")[2:])
        except ValueError:
            raise BadParams(f"bad header {lines[0]!r}") from None
        lines = lines[1:]
    return parse_dnf(" ".join(lines), n)


def compile_dnf(d: DnfFormula) -> BooleanFunction:
    if d.n > N_MAX:
        raise SizeLimit(f"n={d.n} exceeds the cap of {N_MAX} variables")
    idx = np.arange(1 << d.n, dtype=np.int64)
    out = np.zeros(idx.size, dtype=bool)
    for term in d.terms:
        mask = sum(1 << c for c, _ in term)
        want = sum(1 << c for c, pos in term if pos)
        out |= (idx & mask) == want
    return BooleanFunction(d.n, out.astype(np.uint8))


def random_dnf(n: int, t: int, rng, min_width: int = 1, max_width: int | None = None) -> DnfFormula:
    """Terms of uniform random width over distinct random variables."""
    rng = np.random.default_rng(rng)
    max_width = n if max_width is None else min(max_width, n)
    terms = []
    for _ in range(t):
        w = int(rng.integers(min_width, max_width + 1))
        coords = sorted(int(c) for c in rng.choice(n, size=w, replace=False))
        terms.append(tuple((c, bool(rng.integers(2))) for c in coords))
    return DnfFormula(n, tuple(terms))


def random_readk_dnf(n: int, k: int, t: int, rng, max_width: int | None = None) -> DnfFormula:
    """A random DNF in which every variable occurs in at most k terms."""
    rng = np.random.default_rng(rng)
    max_width = n if max_width is None else min(max_width, n)
    left = np.full(n, k)
    terms = []
    for _ in range(t):
        avail = np.flatnonzero(left > 0)
        if avail.size == 0:
            break
        w = int(rng.integers(1, min(max_width, avail.size) + 1))
        coords = sorted(int(c) for c in rng.choice(avail, size=w, replace=False))
        left[coords] -= 1
        terms.append(tuple((c, bool(rng.integers(2))) for c in coords))
    return DnfFormula(n, tuple(terms))


@dataclass
class ReadKReport:
    influences: list
    total_influence: Fraction
    C_min: int
    k: int
    bound: Fraction
    holds: bool
    variance: Fraction
    variance_term: float
    variance_ratio: float

    def to_json(self) -> dict:
        return {
            "influences": [str(v) for v in self.influences],
            "total_influence": str(self.total_influence),
            "C_min": self.C_min,
            "k": self.k,
            "bound": str(self.bound),
            "holds": self.holds,
            "variance_term": self.variance_term,
            "ratio": self.variance_ratio,
        }


def verify_readk_influence_bound(d: DnfFormula) -> ReadKReport:
    """Check ``Inf_i(f) <= k 2**-(C_min - 1)`` exactly for every coordinate.

    Every term is a certificate for the inputs satisfying it, so each term
    has at least C_min literals; coordinate i is pivotal only if one of its
    at most k terms has all its other literals satisfied.
    Also reports ``Inf / (Var (C_min - 1 - log2 k))``, which only a
    universal constant bounds.
    """
    f = compile_dnf(d)
    s = wht(f)
    infl = influences_exact(s)
    cmin = certificate_aggregates(f, parity_certs=False).C_min
    k = d.read_k
    bound = k * Fraction(2) ** (1 - cmin)
    var = variance_exact(s)
    total = total_influence_exact(s)
    rhs = float(var) * (cmin - 1 - math.log2(k))
    ratio = float(total) / rhs if rhs > 0 else math.inf
    return ReadKReport(infl, total, cmin, k, bound, all(v <= bound for v in infl), var, rhs, ratio)


@dataclass
class ReadKEntropyReport:
    min_entropy: float
    total_influence: float
    ratio: float
    k: int
    C_min_parity: int
    C_min: int
    chain_holds: bool

    def to_json(self) -> dict:
        return dict(self.__dict__)


def verify_fmei_readk(d: DnfFormula) -> ReadKEntropyReport:
    """Report ``H_inf / Inf`` and check ``H_inf <= 2 C_min_parity <= 2 C_min``."""
    f = compile_dnf(d)
    if f.is_constant():
        raise ConstantFunction("formula compiles to a constant function")
    s = wht(f)
    kp = min_parity_certificate(f, s)
    cmin = certificate_aggregates(f, parity_certs=False).C_min
    h = min_entropy(s)
    inf = float(total_influence_exact(s))
    chain = fmei_holds(s.max_abs, f.n, kp) and kp <= cmin
    return ReadKEntropyReport(h, inf, h / inf, d.read_k, kp, cmin, chain)


@dataclass
class MansourResult:
    g: BooleanFunction
    kept_terms: int
    length_cutoff: int
    threshold: float
    entropy_g: float
    approximant: SparsePolynomial
    sparsity: int
    error: Fraction
    error_g: Fraction
    tail_weight: Fraction
    budget: float
    delta1: Fraction
    delta2: Fraction

    def to_json(self) -> dict:
        return {
            "sparsity": self.sparsity,
            "error": float(self.error),
            "error_exact": str(self.error),
            "threshold": self.threshold,
            "entropy_g": self.entropy_g,
            "error_g": str(self.error_g),
            "length_cutoff": self.length_cutoff,
            "kept_terms": self.kept_terms,
            "budget": self.budget,
        }


def mansour_approximate(d: DnfFormula, eps, delta1=None, delta2=None) -> MansourResult:
    """Sparse approximation of a DNF.

    Terms longer than ``ceil(log2(4t / delta1))`` are dropped to get g, then
    g is truncated to the coefficients with ``|ghat(S)| >= 2**(-H / (2 delta2))``
    where H is the Fourier entropy of g. The defaults
    ``delta1 = delta2 = eps / 4`` make the error budget exactly eps.
    """
    e = to_fraction(eps)
    if not 0 < e < 1:
        raise BadParams(f"eps must lie in (0, 1), got {eps}")
    d1 = to_fraction(delta1) if delta1 is not None else e / 4
    d2 = to_fraction(delta2) if delta2 is not None else e / 4
    if d1 <= 0 or d2 <= 0:
        raise BadParams("delta1 and delta2 must be positive")
    if d.n > MANSOUR_N_MAX:
        raise SizeLimit(f"Mansour approximation is capped at n <= {MANSOUR_N_MAX}")
    n = d.n
    cutoff = math.ceil(math.log2(4 * d.t / d1))
    kept = tuple(term for term in d.terms if len(term) <= cutoff)
    f = compile_dnf(d)
    if kept:
        g = compile_dnf(DnfFormula(n, kept))
    else:
        g = BooleanFunction(n, np.zeros(1 << n, dtype=np.uint8))
    cf = wht(f).coeffs
    sg = wht(g)
    cg = sg.coeffs
    h = shannon_entropy(sg)
    size = 1 << n
    if np.count_nonzero(cg) == 1:
        theta = 1.0
        keep = cg != 0
    else:
        theta = 2.0 ** (-h / (2 * float(d2)))
        keep = np.abs(cg) / size >= theta
    cp = np.where(keep, cg, 0)
    approx = SparsePolynomial(n, {int(s): Fraction(int(cg[s]), size) for s in np.flatnonzero(keep)})
    diff = cf - cp
    error = Fraction(int(np.dot(diff, diff)), size * size)
    dg = cf - cg
    error_g = Fraction(int(np.dot(dg, dg)), size * size)
    tail = cg[~keep]
    tail_weight = Fraction(int(np.dot(tail, tail)), size * size)
    sparsity = int(keep.sum())
    budget = (math.sqrt(d1) + math.sqrt(d2)) ** 2
    res = MansourResult(g, len(kept), cutoff, theta, h, approx, sparsity, error, error_g,
                        tail_weight, budget, d1, d2)
    _check_mansour(res, e, d1, d2)
    return res


def _check_mansour(res, e, d1, d2):
    if res.error_g > d1:
        raise InvariantViolation(f"dropping long terms cost {res.error_g} > delta1")
    if res.entropy_g > 0 and res.tail_weight > d2:
        raise InvariantViolation(f"tail weight {res.tail_weight} > delta2")
    if res.entropy_g > 0 and math.log2(res.sparsity) > res.entropy_g / float(d2) + 1e-9:
        raise InvariantViolation("sparsity exceeds 2**(H / delta2)")
    if float(res.error) > res.budget + 1e-12:
        raise InvariantViolation(f"approximation error {res.error} exceeds the budget")
    if d1 == d2 == e / 4 and res.error > e:
        raise InvariantViolation(f"approximation error {res.error} > eps")
