"""Approximate spectral norm as a linear program, with dual certificates.

Primal, over coefficients c_S for |S| <= d split as c = u - v (u, v >= 0)::

    min  sum u + sum v
    s.t. f(x) - eps <= sum_S c_S chi_S(x) <= f(x) + eps   for every x

Dual: maximize ``sum phi f - eps sum |phi|`` subject to
``|sum_x phi(x) chi_S(x)| <= 1`` for |S| <= d, which is the condition
``|phihat(S)| <= 2**-n`` on the normalized transform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.optimize import linprog

from .core import BooleanFunction, min_entropy, popcounts, wht
from .errors import BadParams, Infeasible, InvariantViolation, SizeLimit
from .partitions import to_fraction
from .poly import SparsePolynomial

LP_N_MAX = 10
EXACT_N_MAX = 6
GAP_TOL = 1e-6
PHASE_ONE_TOL = 1e-9
FEAS_TOL = 1e-9
# presolve costs more than it saves on these small dense models
_HIGHS_OPTIONS = {"presolve": False}


@dataclass
class DualWitness:
    n: int
    values: list
    objective: object
    eps: object = 0

    def correlations(self, d: int | None = None) -> np.ndarray:
        """``sum_x phi(x) chi_S(x)`` for every S (``2**n * phihat(S)``)."""
        from .core import butterfly

        if all(isinstance(v, Fraction) for v in self.values):
            den = math.lcm(*(v.denominator for v in self.values))
            ints = np.array([int(v * den) for v in self.values], dtype=object)
            return np.array([Fraction(int(c), den) for c in butterfly(ints)], dtype=object)
        return butterfly(np.asarray(self.values, dtype=float))

    def is_feasible(self, d: int, tol: float = FEAS_TOL) -> bool:
        corr = self.correlations()
        low = popcounts(self.n) <= d
        worst = max((abs(c) for c in corr[low]), default=0)
        if isinstance(worst, Fraction):
            return worst <= 1
        return worst <= 1 + tol

    def to_json(self) -> dict:
        return {"values": [float(v) for v in self.values], "objective": float(self.objective)}


@dataclass
class LpResult:
    optimum: object
    polynomial: SparsePolynomial
    dual: DualWitness | None
    gap: float
    degree: int
    eps: object

    def to_json(self) -> dict:
        out = {
            "optimum": float(self.optimum),
            "terms": {str(s): float(c) for s, c in sorted(self.polynomial.terms.items())},
            "dual_objective": float(self.dual.objective) if self.dual else None,
            "gap": float(self.gap),
        }
        if isinstance(self.optimum, Fraction):
            out["optimum_exact"] = str(self.optimum)
        return out


def _check(f, eps, d, cap):
    if not 0 <= eps < 1:
        raise BadParams(f"eps must satisfy 0 <= eps < 1, got {eps}")
    if not 0 <= d <= f.n:
        raise BadParams(f"degree must satisfy 0 <= d <= n, got {d}")
    if f.n > cap:
        raise SizeLimit(f"LP is capped at n <= {cap}")


def low_degree_masks(n: int, d: int) -> np.ndarray:
    pc = popcounts(n)
    return np.flatnonzero(pc <= d)


def character_matrix(n: int, masks) -> np.ndarray:
    """``A[x, j] = chi_{masks[j]}(x)``."""
    idx = np.arange(1 << n)
    return 1 - 2 * (popcounts(n)[idx[:, None] & np.asarray(masks)[None, :]] & 1)


def best_uniform_error(f: BooleanFunction, d: int) -> float:
    """Least ``max_x |f(x) - p(x)|`` over polynomials of degree <= d."""
    masks = low_degree_masks(f.n, d)
    A = character_matrix(f.n, masks).astype(float)
    fv = f.values.astype(float)
    m = masks.size
    ones = -np.ones((A.shape[0], 1))
    A_ub = np.block([[A, ones], [-A, ones]])
    b_ub = np.concatenate((fv, -fv))
    cost = np.zeros(m + 1)
    cost[-1] = 1.0
    bounds = [(None, None)] * m + [(0, None)]
    res = linprog(cost, A_ub=A_ub, b_ub=b_ub, bounds=bounds, method="highs", options=_HIGHS_OPTIONS)
    if res.status != 0:
        raise InvariantViolation(f"phase-one LP failed: {res.message}")
    return float(res.fun)


def is_feasible(f: BooleanFunction, eps, d: int) -> bool:
    """Phase one: some degree-d polynomial is within eps of f everywhere."""
    _check(f, eps, d, LP_N_MAX)
    return best_uniform_error(f, d) - float(eps) <= PHASE_ONE_TOL


def approx_spectral_norm(f: BooleanFunction, eps, d: int, dual: bool = True, exact: bool = False) -> LpResult:
    """``||fhat||_{1,eps,d}`` with the optimal polynomial and a dual witness."""
    if exact:
        return _approx_spectral_norm_exact(f, to_fraction(eps), d)
    eps = float(eps)
    _check(f, eps, d, LP_N_MAX)
    masks = low_degree_masks(f.n, d)
    A = character_matrix(f.n, masks).astype(float)
    fv = f.values.astype(float)
    m = masks.size
    if eps == 0:
        # exact fit: equality rows, half the size of the two-sided form
        res = linprog(np.ones(2 * m), A_eq=np.hstack((A, -A)), b_eq=fv, bounds=(0, None),
                      method="highs", options=_HIGHS_OPTIONS)
    else:
        A_ub = np.block([[A, -A], [-A, A]])
        b_ub = np.concatenate((fv + eps, -(fv - eps)))
        res = linprog(np.ones(2 * m), A_ub=A_ub, b_ub=b_ub, bounds=(0, None), method="highs",
                      options=_HIGHS_OPTIONS)
    if res.status == 2:
        err = best_uniform_error(f, d)
        if err - eps > PHASE_ONE_TOL:
            raise Infeasible(f"no polynomial of degree <= {d} is within {eps} of f (best error {err:.6g})")
        raise InvariantViolation("solver reported infeasible but phase one found a feasible point")
    if res.status != 0:
        raise InvariantViolation(f"LP solve failed: {res.message}")
    coeffs = res.x[:m] - res.x[m:]
    poly = SparsePolynomial(f.n, {int(s): float(c) for s, c in zip(masks, coeffs) if abs(c) > 1e-12})
    optimum = float(np.abs(coeffs).sum())
    witness = None
    gap = 0.0
    if dual:
        if eps == 0:
            phi = np.asarray(res.eqlin.marginals, dtype=float)
        else:
            y = -res.ineqlin.marginals
            phi = y[2 ** f.n:] - y[:2 ** f.n]
        # rescale so the constraints hold exactly despite solver tolerance
        worst = np.abs(A.T @ phi).max() if m else 0.0
        if worst > 1:
            phi = phi / worst
        obj = float(phi @ fv - eps * np.abs(phi).sum())
        witness = DualWitness(f.n, phi.tolist(), obj, eps)
        gap = optimum - obj
        if gap > GAP_TOL * (1 + abs(optimum)) or gap < -GAP_TOL * (1 + abs(optimum)):
            raise InvariantViolation(f"duality gap {gap:.3g} exceeds tolerance")
    return LpResult(optimum, poly, witness, gap, d, eps)


def approx_degree(f: BooleanFunction, eps) -> int:
    """Least d for which some degree-d polynomial is within eps of f.

    At eps = 0 only exact representations qualify, so this is deg(f).
    """
    if not 0 <= eps < 1:
        raise BadParams(f"eps must satisfy 0 <= eps < 1, got {eps}")
    if eps == 0:
        return wht(f).degree
    if f.n > LP_N_MAX:
        raise SizeLimit(f"LP is capped at n <= {LP_N_MAX}")
    for d in range(f.n + 1):
        if best_uniform_error(f, d) - float(eps) <= PHASE_ONE_TOL:
            return d
    return f.n


def canonical_dual_witness(f: BooleanFunction, eps, d: int | None = None) -> DualWitness:
    """``phi(x) = f(x) / (2**n max|fhat|)``, feasible at every degree.

    Its objective is exactly ``(1 - eps) / max|fhat|``.
    """
    e = to_fraction(eps)
    s = wht(f)
    top = s.max_abs
    phi = [Fraction(int(v), top) for v in f.values]
    obj = sum(p * int(v) for p, v in zip(phi, f.values)) - e * sum(abs(p) for p in phi)
    if obj != (1 - e) * Fraction(1 << f.n, top):
        raise InvariantViolation("canonical witness objective mismatch")
    w = DualWitness(f.n, phi, obj, e)
    if not w.is_feasible(f.n if d is None else d):
        raise InvariantViolation("canonical witness is infeasible")
    return w


def verify_minentropy_vs_norm(f: BooleanFunction, eps, exact: bool = False, tol: float = GAP_TOL):
    """``(H_inf, 2 log2(||fhat||_{1,eps} / (1 - eps)), holds)`` at d = deg_eps(f)."""
    if f.n > (EXACT_N_MAX if exact else LP_N_MAX):
        raise SizeLimit("LP size cap exceeded")
    d = approx_degree(f, eps)
    res = approx_spectral_norm(f, eps, d, dual=True, exact=exact)
    e = to_fraction(eps) if exact else float(eps)
    ratio = res.optimum / (1 - e)
    rhs = 2 * math.log2(ratio)
    h = min_entropy(wht(f))
    return h, rhs, h <= rhs + tol


# exact rational simplex


def _approx_spectral_norm_exact(f: BooleanFunction, eps: Fraction, d: int) -> LpResult:
    _check(f, eps, d, EXACT_N_MAX)
    masks = low_degree_masks(f.n, d)
    A = character_matrix(f.n, masks)
    size = 1 << f.n
    m = masks.size
    rows, rhs = [], []
    for x in range(size):
        a = [int(v) for v in A[x]]
        rows.append(a + [-v for v in a])
        rhs.append(int(f.values[x]) + eps)
    for x in range(size):
        a = [int(v) for v in A[x]]
        rows.append([-v for v in a] + a)
        rhs.append(-(int(f.values[x]) - eps))
    status, x_opt, y, opt = simplex_min([Fraction(1)] * (2 * m), rows, rhs)
    if status == "infeasible":
        raise Infeasible(f"no polynomial of degree <= {d} is within {eps} of f")
    if status != "optimal":
        raise InvariantViolation(f"exact simplex ended with status {status}")
    coeffs = [x_opt[j] - x_opt[m + j] for j in range(m)]
    poly = SparsePolynomial(f.n, {int(s): c for s, c in zip(masks, coeffs) if c != 0})
    optimum = sum(abs(c) for c in coeffs)
    # y are the (nonpositive) row multipliers of the <= system
    phi = [y[x] - y[size + x] for x in range(size)]
    fv = [int(v) for v in f.values]
    obj = sum(p * v for p, v in zip(phi, fv)) - eps * sum(abs(p) for p in phi)
    witness = DualWitness(f.n, phi, obj, eps)
    if not witness.is_feasible(d):
        raise InvariantViolation("exact dual witness is infeasible")
    gap = optimum - obj
    if gap != 0:
        raise InvariantViolation(f"exact duality gap {gap} is nonzero")
    return LpResult(optimum, poly, witness, Fraction(0), d, eps)


def simplex_min(c, A_ub, b_ub):
    """Minimize ``c.x`` s.t. ``A_ub x <= b_ub, x >= 0`` over Fractions.

    Two-phase tableau simplex with Bland's rule. Returns
    ``(status, x, y, value)`` where ``y`` are the multipliers of the rows
    (``y <= 0``, ``c - A^T y >= 0`` at optimality).
    """
    m = len(A_ub)
    nv = len(c)
    sign = [1 if b >= 0 else -1 for b in b_ub]
    # columns: structural | slack | artificial (only for flipped rows)
    art_rows = [i for i in range(m) if sign[i] < 0]
    ncol = nv + m + len(art_rows)
    T = []
    basis = []
    for i in range(m):
        row = [Fraction(sign[i] * v) for v in A_ub[i]] + [Fraction(0)] * (m + len(art_rows))
        row[nv + i] = Fraction(sign[i])
        T.append(row + [Fraction(sign[i]) * Fraction(b_ub[i])])
    for k, i in enumerate(art_rows):
        T[i][nv + m + k] = Fraction(1)
    basis = []
    art_of = {i: nv + m + k for k, i in enumerate(art_rows)}
    for i in range(m):
        basis.append(art_of.get(i, nv + i))
    # unit column per row, used to read off B^-1
    unit = [art_of.get(i, nv + i) for i in range(m)]

    def pivot(r, col):
        pr = T[r]
        pv = pr[col]
        if pv != 1:
            T[r] = pr = [v / pv for v in pr]
        for i in range(m):
            if i != r:
                fac = T[i][col]
                if fac != 0:
                    Ti = T[i]
                    T[i] = [a - fac * b for a, b in zip(Ti, pr)]
        basis[r] = col

    def run(cost, allowed):
        while True:
            # reduced costs r_j = cost_j - c_B B^-1 A_j
            cb = [cost[b] for b in basis]
            enter = None
            for j in allowed:
                if j in basis:
                    continue
                rj = cost[j] - sum(cb[i] * T[i][j] for i in range(m) if cb[i] != 0 and T[i][j] != 0)
                if rj < 0:
                    enter = j
                    break
            if enter is None:
                return "optimal"
            best = None
            for i in range(m):
                a = T[i][enter]
                if a > 0:
                    ratio = T[i][-1] / a
                    if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                        best = (ratio, i)
            if best is None:
                return "unbounded"
            pivot(best[1], enter)

    all_cols = list(range(ncol))
    if art_rows:
        cost1 = [Fraction(0)] * ncol
        for i in art_rows:
            cost1[art_of[i]] = Fraction(1)
        run(cost1, all_cols)
        if sum(T[i][-1] for i in range(m) if basis[i] >= nv + m) != 0:
            return "infeasible", None, None, None
        # drive remaining zero-level artificials out of the basis
        for i in range(m):
            if basis[i] >= nv + m:
                for j in range(nv + m):
                    if T[i][j] != 0:
                        pivot(i, j)
                        break
    cost2 = [Fraction(v) for v in c] + [Fraction(0)] * (ncol - nv)
    status = run(cost2, list(range(nv + m)))
    if status != "optimal":
        return status, None, None, None
    x = [Fraction(0)] * nv
    for i, b in enumerate(basis):
        if b < nv:
            x[b] = T[i][-1]
    cb = [cost2[b] for b in basis]
    # y_B^T = c_B^T B^-1; column unit[k] of the tableau is B^-1 e_k (scaled rows)
    y = []
    for k in range(m):
        val = sum(cb[i] * T[i][unit[k]] for i in range(m))
        y.append(val * sign[k])
    value = sum(ci * xi for ci, xi in zip(c, x))
    return "optimal", x, y, value
