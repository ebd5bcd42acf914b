"""Brute-force reference implementations used as test oracles.

Everything here works straight from the definitions with Python integers
and Fractions, sharing no code with the library beyond the truth table.
"""

from fractions import Fraction
from itertools import combinations, product
from math import log2


def table(f):
    """Values f(x) in {+1,-1} as a Python list indexed by input."""
    return [1 - 2 * int(b) for b in f.bits]


def coords(n, x):
    return tuple(-1 if (x >> j) & 1 else 1 for j in range(n))


def chi(S, x):
    return -1 if bin(S & x).count("1") % 2 else 1


def fourier(f):
    """2**n * fhat(S) for every S by direct summation."""
    n, vals = f.n, table(f)
    return [sum(vals[x] * chi(S, x) for x in range(1 << n)) for S in range(1 << n)]


def weights(f):
    c = fourier(f)
    N = 1 << f.n
    return [Fraction(v * v, N * N) for v in c]


def entropy(f):
    return sum(float(w) * log2(1 / float(w)) for w in weights(f) if w)


def min_entropy(f):
    return -log2(float(max(weights(f))))


def influence(f, i):
    vals = table(f)
    flips = sum(1 for x in range(1 << f.n) if vals[x] != vals[x ^ (1 << i)])
    return Fraction(flips, 1 << f.n)


def total_influence(f):
    return sum((influence(f, i) for i in range(f.n)), Fraction(0))


def sensitivity_at(f, x):
    vals = table(f)
    return sum(1 for i in range(f.n) if vals[x] != vals[x ^ (1 << i)])


def subcube(n, fixed):
    """Inputs agreeing with ``fixed`` ({coord: +-1})."""
    return [x for x in range(1 << n) if all(coords(n, x)[i] == v for i, v in fixed.items())]


def certificate_at(f, x):
    vals = table(f)
    pt = coords(f.n, x)
    for k in range(f.n + 1):
        for S in combinations(range(f.n), k):
            cube = subcube(f.n, {i: pt[i] for i in S})
            if len({vals[y] for y in cube}) == 1:
                return k
    raise AssertionError("unreachable")


def min_certificate(f):
    """C_min: least codimension of a monochromatic subcube, by increasing size."""
    n, vals = f.n, table(f)
    for k in range(n + 1):
        for S in combinations(range(n), k):
            free = [j for j in range(n) if j not in S]
            for pattern in range(1 << k):
                base = sum(1 << j for b, j in enumerate(S) if (pattern >> b) & 1)
                seen = {vals[base | sum(1 << j for b, j in enumerate(free) if (y >> b) & 1)]
                        for y in range(1 << len(free))}
                if len(seen) == 1:
                    return k
    raise AssertionError("unreachable")


def linear_subspaces(n):
    """All linear subspaces of F_2^n as frozensets of vectors."""
    seen = {frozenset([0])}
    frontier = [frozenset([0])]
    while frontier:
        nxt = []
        for V in frontier:
            for v in range(1 << n):
                if v in V:
                    continue
                W = frozenset(V | {a ^ v for a in V})
                if W not in seen:
                    seen.add(W)
                    nxt.append(W)
        frontier = nxt
    return seen


_SUBSPACES = {}


def parity_certificate_at(f, x):
    """Least codimension of an affine subspace through x on which f is constant."""
    n = f.n
    if n not in _SUBSPACES:
        _SUBSPACES[n] = sorted(linear_subspaces(n), key=len, reverse=True)
    vals = table(f)
    for V in _SUBSPACES[n]:
        if len({vals[x ^ v] for v in V}) == 1:
            return n - (len(V).bit_length() - 1)
    raise AssertionError("unreachable")


def min_auc(f):
    """Least average codimension over all monochromatic subcube partitions.

    Cover the lowest uncovered input by every monochromatic subcube that
    avoids covered inputs, and recurse.
    """
    n, vals = f.n, table(f)
    cubes = []
    for fixed_coords in product((None, 1, -1), repeat=n):
        fixed = {i: v for i, v in enumerate(fixed_coords) if v is not None}
        pts = subcube(n, fixed)
        if len({vals[y] for y in pts}) == 1:
            cubes.append((frozenset(pts), Fraction(len(fixed) * len(pts), 1 << n)))
    best = {}

    def go(covered):
        if len(covered) == 1 << n:
            return Fraction(0)
        if covered in best:
            return best[covered]
        x = min(set(range(1 << n)) - covered)
        out = None
        for pts, cost in cubes:
            if x in pts and not (pts & covered):
                v = cost + go(covered | pts)
                if out is None or v < out:
                    out = v
        best[covered] = out
        return out

    return go(frozenset())


def is_affine_partition_of(f, cells):
    """cells: list of point sets; check disjoint cover and monochromatic."""
    vals = table(f)
    seen = set()
    for pts in cells:
        if seen & pts or len({vals[y] for y in pts}) != 1:
            return False
        seen |= pts
    return len(seen) == 1 << f.n


def typical_claims(f, fixed_cells, M, delta):
    """(|B|, residual weight, atypical mass) by direct enumeration.

    fixed_cells: list of {coord: +-1}. A tuple of cells is typical when its
    mean codimension is within delta of the average codimension.
    """
    n = f.n
    auc = sum((Fraction(len(c), 1 << len(c)) for c in fixed_cells), Fraction(0))
    B = set()
    atypical = Fraction(0)
    for rho in product(range(len(fixed_cells)), repeat=M):
        ks = [len(fixed_cells[i]) for i in rho]
        if abs(Fraction(sum(ks), M) - auc) <= delta:
            parts = []
            for i in rho:
                fixed = list(fixed_cells[i])
                parts.append([sum(1 << j for j in sub) for r in range(len(fixed) + 1)
                              for sub in combinations(fixed, r)])
            for choice in product(*parts):
                B.add(sum(m << (b * n) for b, m in enumerate(choice)))
        else:
            atypical += Fraction(1, 1 << sum(ks))
    vals = table(f)
    N = 1 << (M * n)
    mask = (1 << n) - 1
    big = []
    for x in range(N):
        v = 1
        for b in range(M):
            v *= vals[(x >> (b * n)) & mask]
        big.append(v)
    residual = Fraction(0)
    for S in range(N):
        if S not in B:
            c = sum(big[x] * chi(S, x) for x in range(N))
            residual += Fraction(c * c, N * N)
    return len(B), residual, atypical, auc
