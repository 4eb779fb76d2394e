"""Multiplier expressions for constraint tuples.

For constraints c = (c_1, ..., c_m) over x in R^n, stack

    C(x) = [ grad c_1 ... grad c_m ]      ((n+m) x m)
           [ diag(c_1, ..., c_m)    ]

A matrix L(x) of size m x (n+m) with L(x) C(x) = I_m exactly gives, for
any objective f, multiplier expressions p = L_1(x) grad f(x) where L_1 is
the first n columns of L: at every critical pair (x, lam) of the problem
min f s.t. c_E = 0, c_I >= 0, the Lagrange multipliers satisfy
lam_i = p_i(x). Such an L exists iff the tuple is nonsingular (C(u) has
full column rank m at every complex point u of every active variety).

This module synthesizes L exactly over the rationals: closed forms for
standard sets (simplex, box, [-1,1]^n cube, unit ball/sphere, triangular
tuples), a product/sum construction for arbitrary nonsingular polyhedra,
and a general coefficient-matching solver with degree escalation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from .poly import Polynomial, PolyMatrix, monomials_upto, variables

__all__ = [
    "ConstraintTuple",
    "Problem",
    "LmeError",
    "Infeasible",
    "LmeUnavailable",
    "LmeResult",
    "ProbeReport",
    "build_C",
    "verify_lme",
    "multipliers_from_L",
    "solve_L_by_matching",
    "lme_simplex",
    "lme_hypercube_pm1",
    "lme_ball_sphere",
    "lme_unit_box",
    "lme_triangular",
    "polyhedral_lme",
    "detect_catalog",
    "synthesize",
    "nonsingular_probe",
]


class LmeError(Exception):
    pass


class Infeasible(LmeError):
    """The coefficient-matching system has no solution at this degree."""


class LmeUnavailable(LmeError):
    """No synthesis path produced a valid L for the tuple."""


@dataclass(frozen=True)
class ConstraintTuple:
    """Constraints with an equality/inequality split (0-based indices)."""

    n: int
    polys: tuple
    eq: tuple
    ineq: tuple

    def __post_init__(self):
        object.__setattr__(self, "polys", tuple(self.polys))
        object.__setattr__(self, "eq", tuple(sorted(self.eq)))
        object.__setattr__(self, "ineq", tuple(sorted(self.ineq)))
        m = len(self.polys)
        if sorted(self.eq + self.ineq) != list(range(m)):
            raise ValueError("eq and ineq must partition the constraint indices")
        for p in self.polys:
            if p.n != self.n:
                raise ValueError("constraint variable count mismatch")
            if p.is_zero():
                raise ValueError("zero polynomial is not a valid constraint")

    @property
    def m(self) -> int:
        return len(self.polys)

    def max_degree(self) -> int:
        return max(p.degree for p in self.polys)

    def exact(self) -> "ConstraintTuple":
        return ConstraintTuple(self.n, tuple(p.to_fraction() for p in self.polys), self.eq, self.ineq)


@dataclass(frozen=True)
class Problem:
    f: Polynomial
    constraints: ConstraintTuple

    def __post_init__(self):
        if self.f.n != self.constraints.n:
            raise ValueError("objective and constraints disagree on variable count")


@dataclass(frozen=True)
class LmeResult:
    L: PolyMatrix
    method: str
    degree: int


@dataclass(frozen=True)
class ProbeReport:
    singular: bool
    witness: Optional[np.ndarray]
    subset: Optional[tuple]
    sigma_ratio: float


def build_C(c: ConstraintTuple) -> PolyMatrix:
    """The (n+m) x m stack of constraint gradients over diag(c)."""
    n, m = c.n, c.m
    zero = Polynomial.zero(n)
    rows = [[c.polys[j].partial(i) for j in range(m)] for i in range(n)]
    for i in range(m):
        rows.append([c.polys[j] if j == i else zero for j in range(m)])
    return PolyMatrix(n, rows)


def verify_lme(L: PolyMatrix, C: PolyMatrix) -> bool:
    """Exact coefficient-level check that L(x) C(x) = I_m."""
    if L.cols != C.rows:
        return False
    return (L @ C).is_identity()


def multipliers_from_L(L: PolyMatrix, f: Polynomial) -> tuple:
    """p = L_1(x) grad f(x), the multiplier expressions for objective f."""
    n = f.n
    grad = f.gradient()
    out = []
    for i in range(L.rows):
        acc = Polynomial.zero(n)
        for j in range(n):
            acc = acc + L[i, j] * grad[j]
        out.append(acc)
    return tuple(out)


# ---------------------------------------------------------------------------
# exact rational linear algebra

def _rref(aug: list, ncols: int):
    """In-place RREF of [A | B] where A occupies the first ncols columns.

    Returns the list of pivot columns of A.
    """
    pivots = []
    r = 0
    nrows = len(aug)
    for col in range(ncols):
        pivot_row = None
        for i in range(r, nrows):
            if aug[i][col] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        aug[r], aug[pivot_row] = aug[pivot_row], aug[r]
        inv = Fraction(1, 1) / aug[r][col]
        aug[r] = [v * inv for v in aug[r]]
        prow = aug[r]
        for i in range(nrows):
            if i != r and aug[i][col] != 0:
                factor = aug[i][col]
                aug[i] = [v - factor * w for v, w in zip(aug[i], prow)]
        pivots.append(col)
        r += 1
        if r == nrows:
            break
    return pivots


def solve_exact(A: list, rhs_cols: list):
    """Solve A x = b over the rationals for several right-hand sides.

    A is a list of rows of Fractions; rhs_cols a list of columns. Returns
    (solutions, nullspace) where solutions[i] is a particular solution for
    rhs_cols[i] or None if that system is inconsistent, and nullspace is a
    basis of ker A as a list of vectors.
    """
    nrows = len(A)
    ncols = len(A[0]) if nrows else 0
    nrhs = len(rhs_cols)
    aug = [list(A[i]) + [rhs_cols[j][i] for j in range(nrhs)] for i in range(nrows)]
    pivots = _rref(aug, ncols)
    pivot_set = set(pivots)
    free = [j for j in range(ncols) if j not in pivot_set]

    solutions = []
    for j in range(nrhs):
        ok = True
        for i in range(len(pivots), nrows):
            if aug[i][ncols + j] != 0:
                ok = False
                break
        if not ok:
            solutions.append(None)
            continue
        x = [Fraction(0)] * ncols
        for r, col in enumerate(pivots):
            x[col] = aug[r][ncols + j]
        solutions.append(x)

    nullspace = []
    for fcol in free:
        v = [Fraction(0)] * ncols
        v[fcol] = Fraction(1)
        for r, col in enumerate(pivots):
            v[col] = -aug[r][fcol]
        nullspace.append(v)
    return solutions, nullspace


def _min_norm(solutions: list, nullspace: list):
    """Shift each particular solution to the minimum-norm one on x0 + ker A."""
    if not nullspace:
        return solutions
    k = len(nullspace)
    gram = [[sum(a * b for a, b in zip(nullspace[i], nullspace[j])) for j in range(k)] for i in range(k)]
    rhs_cols = []
    live = [i for i, s in enumerate(solutions) if s is not None]
    for i in live:
        x0 = solutions[i]
        rhs_cols.append([-sum(a * b for a, b in zip(nullspace[r], x0)) for r in range(k)])
    if not rhs_cols:
        return solutions
    ts, _ = solve_exact(gram, rhs_cols)
    out = list(solutions)
    for pos, i in enumerate(live):
        t = ts[pos]
        x = list(solutions[i])
        for r in range(k):
            if t[r] == 0:
                continue
            x = [xv + t[r] * nv for xv, nv in zip(x, nullspace[r])]
        out[i] = x
    return out


def _exact_matrix(rows: Iterable[Iterable]) -> list:
    return [[Fraction(v) for v in row] for row in rows]


def _exact_rank(A: list) -> int:
    work = [list(r) for r in A]
    if not work:
        return 0
    return len(_rref(work, len(work[0])))


def _exact_inverse(A: list):
    """Inverse of a square rational matrix, or None if singular."""
    s = len(A)
    aug = [list(A[i]) + [Fraction(1 if j == i else 0) for j in range(s)] for i in range(s)]
    pivots = _rref(aug, s)
    if len(pivots) < s:
        return None
    return [row[s:] for row in aug]


def _exact_nullspace(A: list) -> list:
    ncols = len(A[0]) if A else 0
    _, null = solve_exact(A, [[Fraction(0)] * len(A)])
    return null


# ---------------------------------------------------------------------------
# coefficient matching

def solve_L_by_matching(
    c: ConstraintTuple,
    degree: Optional[int] = None,
    degree_cap: Optional[int] = None,
) -> LmeResult:
    """Find L with L C = I by matching coefficients at a fixed degree.

    With ``degree=None`` the degree escalates from max(1, max deg c_i - 1)
    until the linear system becomes consistent, capped at
    ``2 * max deg c_i + 2`` unless ``degree_cap`` overrides it. The system
    is solved exactly over the rationals; when underdetermined the
    minimum-norm coefficient vector is taken, which makes the result
    deterministic. Raises :class:`Infeasible` when a fixed degree fails and
    :class:`LmeUnavailable` when escalation exhausts the cap.
    """
    cx = c.exact()
    max_deg = cx.max_degree()
    if degree is not None:
        return _match_at_degree(cx, degree)
    cap = degree_cap if degree_cap is not None else 2 * max_deg + 2
    start = max(1, max_deg - 1)
    for d in range(start, cap + 1):
        try:
            return _match_at_degree(cx, d)
        except Infeasible:
            continue
    raise LmeUnavailable(f"no L found by matching up to degree {cap}")


def _match_at_degree(c: ConstraintTuple, d_L: int) -> LmeResult:
    n, m = c.n, c.m
    C = build_C(c)
    mons = monomials_upto(n, d_L)
    col_index = {}
    for k in range(n + m):
        for mu in mons:
            col_index[(k, mu)] = len(col_index)
    ncols = len(col_index)

    # Row i of L satisfies sum_k L[i,k] C[k,j] = delta_ij for each j; the
    # coefficient matrix is shared across i, only the right-hand side moves.
    row_index: dict = {}
    entries: dict = {}
    zero_mon = (0,) * n
    for j in range(m):
        row_index[(j, zero_mon)] = len(row_index)
    for j in range(m):
        for k in range(n + m):
            q = C[k, j]
            if q.is_zero():
                continue
            for mu in mons:
                col = col_index[(k, mu)]
                for beta, cc in q.terms.items():
                    gamma = tuple(a + b for a, b in zip(mu, beta))
                    key = (j, gamma)
                    if key not in row_index:
                        row_index[key] = len(row_index)
                    r = row_index[key]
                    entries[(r, col)] = entries.get((r, col), Fraction(0)) + cc

    nrows = len(row_index)
    A = [[Fraction(0)] * ncols for _ in range(nrows)]
    for (r, col), v in entries.items():
        A[r][col] = v
    rhs_cols = []
    for i in range(m):
        b = [Fraction(0)] * nrows
        b[row_index[(i, zero_mon)]] = Fraction(1)
        rhs_cols.append(b)

    solutions, nullspace = solve_exact(A, rhs_cols)
    if any(s is None for s in solutions):
        raise Infeasible(f"no L of degree {d_L} exists for this tuple")
    solutions = _min_norm(solutions, nullspace)

    rows = []
    for i in range(m):
        w = solutions[i]
        row = []
        for k in range(n + m):
            terms = {}
            for mu in mons:
                v = w[col_index[(k, mu)]]
                if v != 0:
                    terms[mu] = v
            row.append(Polynomial(n, terms))
        rows.append(row)
    L = PolyMatrix(n, rows)
    if not verify_lme(L, C):
        raise LmeError("matching produced an invalid L; this is a bug")
    return LmeResult(L, "matching", max(L.degree, 0))


# ---------------------------------------------------------------------------
# catalog closed forms

def lme_simplex(n: int):
    """Standard simplex {e'x = 1, x >= 0}: returns (tuple, LmeResult).

    Constraint order: c_0 = x_1 + ... + x_n - 1 (equality), then c_j = x_j.
    The multiplier expressions are p_0 = x' grad f and
    p_j = f_xj - x' grad f.
    """
    x = variables(n)
    c0 = sum(x[1:], x[0]) - 1
    polys = (c0,) + x
    tup = ConstraintTuple(n, polys, eq=(0,), ineq=tuple(range(1, n + 1)))
    zero = Polynomial.zero(n)
    one = Polynomial.one(n)
    rows = [[x[j] for j in range(n)] + [-one] * (n + 1)]
    for i in range(n):
        row = [(one if j == i else zero) - x[j] for j in range(n)] + [one] * (n + 1)
        rows.append(row)
    L = PolyMatrix(n, rows)
    res = LmeResult(L, "simplex", 1)
    _require_valid(res, tup)
    return tup, res


def lme_hypercube_pm1(n: int):
    """Cube [-1,1]^n as c_j = 1 - x_j^2: L = [-(1/2) diag(x) | I_n]."""
    x = variables(n)
    polys = tuple(1 - x[j] * x[j] for j in range(n))
    tup = ConstraintTuple(n, polys, eq=(), ineq=tuple(range(n)))
    zero = Polynomial.zero(n)
    one = Polynomial.one(n)
    half = Fraction(1, 2)
    rows = []
    for i in range(n):
        row = [x[i] * -half if j == i else zero for j in range(n)]
        row += [one if j == i else zero for j in range(n)]
        rows.append(row)
    L = PolyMatrix(n, rows)
    res = LmeResult(L, "hypercube", 1)
    _require_valid(res, tup)
    return tup, res


def lme_ball_sphere(n: int, equality: bool = False):
    """Unit ball (or sphere) c_1 = 1 - x'x: L = [-(1/2) x' | 1]."""
    x = variables(n)
    c1 = 1 - sum((xi * xi for xi in x[1:]), x[0] * x[0])
    tup = ConstraintTuple(n, (c1,), eq=(0,) if equality else (), ineq=() if equality else (0,))
    half = Fraction(1, 2)
    row = [xi * -half for xi in x] + [Polynomial.one(n)]
    L = PolyMatrix(n, [row])
    res = LmeResult(L, "ball", 1)
    _require_valid(res, tup)
    return tup, res


def lme_unit_box(n: int):
    """Box [0,1]^n as (x_1..x_n, 1-x_1..1-x_n): degree-one closed form."""
    x = variables(n)
    polys = x + tuple(1 - xi for xi in x)
    tup = ConstraintTuple(n, polys, eq=(), ineq=tuple(range(2 * n)))
    zero = Polynomial.zero(n)
    one = Polynomial.one(n)
    rows = []
    for i in range(n):
        row = [(one - x[i]) if j == i else zero for j in range(n)]
        right = [zero] * (2 * n)
        right[i] = one
        right[n + i] = one
        rows.append(row + right)
    for i in range(n):
        row = [-x[i] if j == i else zero for j in range(n)]
        right = [zero] * (2 * n)
        right[i] = one
        right[n + i] = one
        rows.append(row + right)
    L = PolyMatrix(n, rows)
    res = LmeResult(L, "box", 1)
    _require_valid(res, tup)
    return tup, res


def _triangular_shape(c: ConstraintTuple):
    """Constant tau_i and gradient matrix if c has triangular shape, else None.

    Shape: c_i = tau_i x_i + q_i(x_{i+1}, ..., x_n) with tau_i a nonzero
    constant, taking constraints in the given order.
    """
    n, m = c.n, c.m
    if m > n:
        return None
    taus = []
    for i, p in enumerate(c.polys):
        ei = tuple(1 if k == i else 0 for k in range(n))
        tau = p.coeff(ei)
        if tau == 0:
            return None
        for a in p.terms:
            if a == ei:
                continue
            if any(a[k] for k in range(i + 1)):
                return None
        taus.append(tau)
    return taus


def lme_triangular(c: ConstraintTuple) -> LmeResult:
    """Exact forward-substitution inverse for triangular tuples.

    T(x) = first m rows of [grad c_1 ... grad c_m] is lower triangular with
    constant diagonal; L = [T(x)^{-1} | 0]. Raises LmeError if the tuple is
    not triangular.
    """
    cx = c.exact()
    taus = _triangular_shape(cx)
    if taus is None:
        raise LmeError("tuple is not triangular in the given variable order")
    n, m = cx.n, cx.m
    T = [[cx.polys[i].partial(k) for i in range(m)] for k in range(m)]
    zero = Polynomial.zero(n)
    X = [[zero] * m for _ in range(m)]
    for i in range(m):
        X[i][i] = Polynomial.constant(n, Fraction(1, 1) / Fraction(taus[i]))
        for k in range(i + 1, m):
            acc = zero
            for j in range(i, k):
                if not T[k][j].is_zero() and not X[j][i].is_zero():
                    acc = acc + T[k][j] * X[j][i]
            X[k][i] = acc * (Fraction(-1) / Fraction(taus[k]))
    rows = [X[i] + [zero] * (n - m) + [zero] * m for i in range(m)]
    L = PolyMatrix(n, rows)
    res = LmeResult(L, "triangular", max(L.degree, 0))
    _require_valid(res, cx)
    return res


# ---------------------------------------------------------------------------
# polyhedra

def polyhedral_lme(A, b) -> LmeResult:
    """L for the affine tuple c_i = a_i' x - b_i (rows a_i of A).

    Works for any nonsingular polyhedron: rank-deficient A is reduced by an
    exact linear change of coordinates, and the full-rank core uses the
    basis-subset construction: for every index set I with the complementary
    rows invertible, a block matrix L_I with L_I C = c_I I_m, combined with
    rational weights nu_I found from sum nu_I c_I = 1 by one linear solve.
    The result satisfies L C = I exactly and deg L <= m - rank A.
    """
    Aq = _exact_matrix(A)
    bq = [Fraction(v) for v in b]
    m = len(Aq)
    n = len(Aq[0]) if m else 0
    x = variables(n)
    polys = []
    for i in range(m):
        p = Polynomial.constant(n, -bq[i])
        for j in range(n):
            if Aq[i][j]:
                p = p + Aq[i][j] * x[j]
        polys.append(p)
    tup = ConstraintTuple(n, tuple(polys), eq=(), ineq=tuple(range(m)))

    r = _exact_rank(Aq)
    if r == n:
        L = _polyhedral_full_rank(Aq, bq)
    else:
        L = _polyhedral_reduced(Aq, bq, r)
    res = LmeResult(L, "polyhedral", max(L.degree, 0))
    _require_valid(res, tup)
    return res


def _polyhedral_full_rank(Aq: list, bq: list) -> PolyMatrix:
    m = len(Aq)
    n = len(Aq[0])
    x = variables(n)
    cs = []
    for i in range(m):
        p = Polynomial.constant(n, -bq[i])
        for j in range(n):
            if Aq[i][j]:
                p = p + Aq[i][j] * x[j]
        cs.append(p)

    subsets = []
    inverses = {}
    for I in itertools.combinations(range(m), m - n):
        comp = [i for i in range(m) if i not in I]
        Acomp = [Aq[i] for i in comp]
        inv = _exact_inverse(Acomp)
        if inv is not None:
            subsets.append(I)
            inverses[I] = inv
    if not subsets:
        raise LmeUnavailable("no invertible row subsets; polyhedron is degenerate")

    # weights nu_I with sum nu_I prod_{i in I} c_i = 1
    prod_cache = {}
    for I in subsets:
        p = Polynomial.one(n)
        for i in I:
            p = p * cs[i]
        prod_cache[I] = p
    mons = monomials_upto(n, max(0, m - n))
    mon_pos = {a: k for k, a in enumerate(mons)}
    rows = [[Fraction(0)] * len(subsets) for _ in mons]
    for col, I in enumerate(subsets):
        for a, cc in prod_cache[I].terms.items():
            rows[mon_pos[a]][col] = Fraction(cc)
    rhs = [Fraction(0)] * len(mons)
    rhs[mon_pos[(0,) * n]] = Fraction(1)
    sols, null = solve_exact(rows, [rhs])
    if sols[0] is None:
        raise LmeUnavailable("partition-of-unity weights do not exist; tuple is singular")
    nu = _min_norm(sols, null)[0]

    zero = Polynomial.zero(n)
    total = PolyMatrix.zeros(n, m, n + m)
    for w, I in zip(nu, subsets):
        if w == 0:
            continue
        comp = [i for i in range(m) if i not in I]
        inv = inverses[I]  # inverse of A_comp
        # (A_comp)^{-T} row s, column t = inv[t][s]
        cI = prod_cache[I]
        diag = {}
        for i in I:
            e = Polynomial.one(n)
            for i2 in I:
                if i2 != i:
                    e = e * cs[i2]
            diag[i] = e
        ent = [[zero] * (n + m) for _ in range(m)]
        for i in I:
            ent[i][n + i] = diag[i] * w
        for s, row_i in enumerate(comp):
            for j in range(n):
                ent[row_i][j] = cI * (inv[j][s] * w)
            for i in I:
                coeff = sum(inv[kk][s] * Aq[i][kk] for kk in range(n))
                if coeff:
                    ent[row_i][n + i] = diag[i] * (-coeff * w)
        total = total + PolyMatrix(n, ent)
    return total


def _polyhedral_reduced(Aq: list, bq: list, r: int) -> PolyMatrix:
    """Handle rank-deficient A by an exact change of coordinates x = M z."""
    m = len(Aq)
    n = len(Aq[0])
    null = _exact_nullspace(Aq)  # n - r vectors
    # extend ker A greedily with unit vectors to an invertible square M
    cols = [list(v) for v in null]
    unit_idx = []
    for j in range(n):
        if len(unit_idx) == r:
            break
        cand = cols + [[Fraction(1) if k == j else Fraction(0) for k in range(n)]]
        mat = [[cand[cc][rr] for cc in range(len(cand))] for rr in range(n)]
        if _exact_rank(mat) == len(cand):
            cols = cand
            unit_idx.append(j)
    M_cols = [[Fraction(1) if k == j else Fraction(0) for k in range(n)] for j in unit_idx] + [
        [Fraction(v) for v in vec] for vec in null
    ]
    M = [[M_cols[j][i] for j in range(n)] for i in range(n)]  # n x n, columns = M_cols
    Minv = _exact_inverse(M)
    if Minv is None:
        raise LmeError("coordinate change construction failed; this is a bug")

    # reduced data: first r columns of A M
    A1 = [[sum(Aq[i][k] * M[k][j] for k in range(n)) for j in range(r)] for i in range(m)]
    Lr = _polyhedral_full_rank(A1, bq)  # m x (r+m) over z_1..z_r

    # z_t = (Minv x)_t as polynomials in the original variables
    x = variables(n)
    zsub = []
    for t in range(r):
        p = Polynomial.zero(n)
        for j in range(n):
            if Minv[t][j]:
                p = p + Minv[t][j] * x[j]
        zsub.append(p)

    def lift(p: Polynomial) -> Polynomial:
        return p.subs(zsub)

    zero = Polynomial.zero(n)
    rows = []
    for i in range(m):
        left = [lift(Lr[i, t]) for t in range(r)]
        # first n columns: row_left (1 x r) times (first r rows of M^T) = M[:, :r]^T
        full_left = []
        for j in range(n):
            acc = zero
            for t in range(r):
                if M[j][t]:
                    acc = acc + left[t] * M[j][t]
            full_left.append(acc)
        right = [lift(Lr[i, r + k]) for k in range(m)]
        rows.append(full_left + right)
    return PolyMatrix(n, rows)


# ---------------------------------------------------------------------------
# detection and the synthesis front end

def _require_valid(res: LmeResult, tup: ConstraintTuple):
    if not verify_lme(res.L, build_C(tup)):
        raise LmeError(f"{res.method} construction failed verification; this is a bug")


def _is_affine(p: Polynomial) -> bool:
    return p.degree <= 1


def detect_catalog(c: ConstraintTuple) -> Optional[LmeResult]:
    """Closed-form L when the tuple matches a known pattern.

    Recognized up to constraint order, variable permutation and sign flips:
    the [-1,1]^n cube, the unit ball/sphere, the [0,1]^n box and the
    standard simplex. Returns None when nothing matches.
    """
    cx = c.exact()
    n, m = cx.n, cx.m
    x = variables(n)
    zero = Polynomial.zero(n)
    one = Polynomial.one(n)
    half = Fraction(1, 2)

    if m == n:
        assign = {}
        for j, p in enumerate(cx.polys):
            hit = None
            for i in range(n):
                base = 1 - x[i] * x[i]
                if p == base:
                    hit = (i, 1)
                elif p == -base:
                    hit = (i, -1)
                if hit:
                    break
            if hit is None or hit[0] in {v[0] for v in assign.values()}:
                assign = {}
                break
            assign[j] = hit
        if len(assign) == m:
            rows = []
            for j in range(m):
                i, s = assign[j]
                row = [x[i] * (-half * s) if k == i else zero for k in range(n)]
                right = [zero] * m
                right[j] = Polynomial.constant(n, s)
                rows.append(row + right)
            res = LmeResult(PolyMatrix(n, rows), "hypercube", 1)
            _require_valid(res, cx)
            return res

    if m == 1:
        ball = 1 - sum((xi * xi for xi in x[1:]), x[0] * x[0])
        p = cx.polys[0]
        s = 1 if p == ball else (-1 if p == -ball else 0)
        if s:
            row = [xi * (-half * s) for xi in x] + [Polynomial.constant(n, s)]
            res = LmeResult(PolyMatrix(n, [row]), "ball", 1)
            _require_valid(res, cx)
            return res

    if m == 2 * n:
        lo = {}
        hi = {}
        for j, p in enumerate(cx.polys):
            placed = False
            for i in range(n):
                if p == x[i] and i not in lo:
                    lo[i] = j
                    placed = True
                    break
                if p == 1 - x[i] and i not in hi:
                    hi[i] = j
                    placed = True
                    break
            if not placed:
                lo = {}
                break
        if len(lo) == n and len(hi) == n:
            rows = [None] * m
            for i in range(n):
                row = [(one - x[i]) if k == i else zero for k in range(n)]
                right = [zero] * m
                right[lo[i]] = one
                right[hi[i]] = one
                rows[lo[i]] = row + right
                row = [-x[i] if k == i else zero for k in range(n)]
                right = [zero] * m
                right[lo[i]] = one
                right[hi[i]] = one
                rows[hi[i]] = row + right
            res = LmeResult(PolyMatrix(n, rows), "box", 1)
            _require_valid(res, cx)
            return res

    if m == n + 1:
        esum = sum(x[1:], x[0])
        j0 = None
        s0 = 0
        var_of = {}
        ok = True
        for j, p in enumerate(cx.polys):
            if p == esum - 1 and j0 is None:
                j0, s0 = j, 1
                continue
            if p == 1 - esum and j0 is None:
                j0, s0 = j, -1
                continue
            hit = None
            for i in range(n):
                if p == x[i] and i not in var_of:
                    hit = i
                    break
            if hit is None:
                ok = False
                break
            var_of[hit] = j
        if ok and j0 is not None and len(var_of) == n:
            rows = [None] * m
            row0 = [x[k] * s0 for k in range(n)] + [Polynomial.constant(n, -s0)] * m
            rows[j0] = row0
            for i, j in var_of.items():
                row = [(one if k == i else zero) - x[k] for k in range(n)] + [one] * m
                rows[j] = row
            res = LmeResult(PolyMatrix(n, rows), "simplex", 1)
            _require_valid(res, cx)
            return res

    return None


def synthesize(
    c: ConstraintTuple,
    hint: str = "auto",
    degree: Optional[int] = None,
    degree_cap: Optional[int] = None,
) -> LmeResult:
    """Produce a verified L for the tuple, trying the cheapest route first.

    ``hint`` forces a path: one of auto, simplex, hypercube, box, ball,
    sphere, triangular, polyhedral, match. The auto chain is catalog
    detection, triangular shape, affine (polyhedral) construction, then
    coefficient matching with degree escalation.
    """
    cx = c.exact()
    if hint in ("simplex", "hypercube", "box", "ball", "sphere"):
        res = detect_catalog(cx)
        if res is None:
            raise LmeUnavailable(f"tuple does not match the {hint} pattern")
        return res
    if hint == "triangular":
        return lme_triangular(cx)
    if hint == "polyhedral":
        A, b = _affine_data(cx)
        if A is None:
            raise LmeUnavailable("polyhedral hint needs affine constraints")
        return polyhedral_lme(A, b)
    if hint == "match":
        return solve_L_by_matching(cx, degree=degree, degree_cap=degree_cap)
    if hint != "auto":
        raise ValueError(f"unknown lme hint: {hint}")

    res = detect_catalog(cx)
    if res is not None:
        return res
    if _triangular_shape(cx) is not None:
        return lme_triangular(cx)
    A, b = _affine_data(cx)
    if A is not None:
        try:
            return polyhedral_lme(A, b)
        except LmeError:
            pass
    return solve_L_by_matching(cx, degree=degree, degree_cap=degree_cap)


def _affine_data(c: ConstraintTuple):
    if not all(_is_affine(p) for p in c.polys):
        return None, None
    n = c.n
    A = []
    b = []
    for p in c.polys:
        row = [Fraction(p.coeff(tuple(1 if k == j else 0 for k in range(n)))) for j in range(n)]
        A.append(row)
        b.append(-Fraction(p.coeff((0,) * n)))
    return A, b


# ---------------------------------------------------------------------------
# singularity probe

def nonsingular_probe(c: ConstraintTuple, seed: int = 0, starts: int = 8, tol: float = 1e-8) -> ProbeReport:
    """Heuristic search for points where C(u) loses full column rank.

    For every active subset S with |S| <= n, run Gauss-Newton from random
    real and complex starts toward the variety {c_i = 0, i in S}; at each
    found point, test the smallest singular value of C(u). Finding a
    witness proves the tuple singular; finding none proves nothing.
    """
    rng = np.random.default_rng(seed)
    n, m = c.n, c.m
    polys = [p.to_float() for p in c.polys]
    grads = [[p.partial(i) for i in range(n)] for p in polys]
    Cf = build_C(ConstraintTuple(c.n, tuple(polys), c.eq, c.ineq))

    def eval_C(u):
        out = np.empty((n + m, m), dtype=complex)
        for i in range(n + m):
            for j in range(m):
                out[i, j] = Cf[i, j].eval(u)
        return out

    best_ratio = np.inf
    for size in range(1, min(m, n) + 1):
        for S in itertools.combinations(range(m), size):
            for trial in range(starts):
                if trial % 2 == 0:
                    u = rng.standard_normal(n).astype(complex)
                else:
                    u = rng.standard_normal(n) + 1j * rng.standard_normal(n)
                # double roots make Gauss-Newton linear, so run it deep
                for _ in range(220):
                    F = np.array([polys[i].eval(u) for i in S], dtype=complex)
                    if np.max(np.abs(F)) < 1e-30:
                        break
                    J = np.array([[grads[i][k].eval(u) for k in range(n)] for i in S], dtype=complex)
                    step, *_ = np.linalg.lstsq(J, -F, rcond=None)
                    if not np.all(np.isfinite(step)) or np.max(np.abs(step)) < 1e-30:
                        break
                    u = u + step
                F = np.array([polys[i].eval(u) for i in S], dtype=complex)
                if np.max(np.abs(F)) > 1e-9 * (1 + np.max(np.abs(u)) ** max(p.degree for p in polys)):
                    continue
                Cu = eval_C(u)
                sv = np.linalg.svd(Cu, compute_uv=False)
                ratio = sv[-1] / max(sv[0], 1e-300)
                best_ratio = min(best_ratio, ratio)
                if ratio < tol:
                    return ProbeReport(True, u, S, float(ratio))
    return ProbeReport(False, None, None, float(best_ratio))
