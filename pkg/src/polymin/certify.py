"""Tightness detection and minimizer extraction.

A relaxation is tight once the numerical rank of the moment matrix
stabilizes between two nested truncations; the optimal moment vector is
then the moment sequence of a finite atomic measure and the atoms are
recovered by simultaneous diagonalization of multiplication operators on
the quotient basis read off a Gram factor. Extracted points are polished
with a few Gauss-Newton steps on the active constraint system and checked
against the original feasibility and criticality conditions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import scipy.linalg as sla

from .lme import Problem
from .moments import ConicProgram, build_kkt_tuples
from .poly import Polynomial, Tms, grlex_rank, monomials_upto, n_monomials
from .sdp import SdpSolution, SolverConfig, numerical_rank, solve

__all__ = [
    "Certificate",
    "PointReport",
    "ExtractionFailed",
    "flat_truncation",
    "extract_minimizers",
    "polish_point",
    "verify_point",
    "reselect_moments",
    "build_certificate",
]


class ExtractionFailed(RuntimeError):
    """Raised when the atom recovery does not pass its consistency checks.

    Carries a residual dict so callers can report what went wrong instead
    of silently dropping the certificate.
    """

    def __init__(self, message: str, residuals: Optional[dict] = None):
        super().__init__(message)
        self.residuals = residuals or {}


@dataclass(frozen=True)
class PointReport:
    """Residuals of one candidate point against the critical-point system."""

    objective: float
    eq_violation: float
    ineq_violation: float
    stationarity: float
    multiplier_violation: float
    ok: bool

    @property
    def feasibility(self) -> float:
        return max(self.eq_violation, self.ineq_violation)


@dataclass(frozen=True)
class Certificate:
    flat_at: Optional[int]
    ranks: tuple
    minimizers: tuple = ()
    residuals: tuple = ()
    certified: bool = False
    failure: Optional[str] = None


def flat_truncation(y_star: Tms, k: int, d: int, rank_tol: float = 1e-6) -> Optional[int]:
    """Smallest t in [d, k] with rank M_t = rank M_{t-d}, or None."""
    if d < 1 or k < d:
        raise ValueError("need 1 <= d <= k")
    if 2 * k > y_star.order:
        raise ValueError("moment sequence too short for order k")
    for t in range(d, k + 1):
        lo = numerical_rank(y_star.moment_matrix(t - d), rank_tol)
        hi = numerical_rank(y_star.moment_matrix(t), rank_tol)
        if lo == hi:
            return t
    return None


def rank_profile(y_star: Tms, k: int, d: int, rank_tol: float = 1e-6) -> tuple:
    """(t, rank M_t, rank M_{t-d}) for every t in [d, k]."""
    out = []
    for t in range(d, k + 1):
        out.append(
            (
                t,
                numerical_rank(y_star.moment_matrix(t), rank_tol),
                numerical_rank(y_star.moment_matrix(t - d), rank_tol),
            )
        )
    return tuple(out)


def reselect_moments(
    prog: ConicProgram,
    config: Optional[SolverConfig] = None,
    eps: float = 1e-4,
) -> SdpSolution:
    """Re-solve with a small trace penalty to pick a low-rank optimum.

    The interior-point path ends near the analytic center of the optimal
    face, which has maximal rank; moment entries the objective never
    touches drift there and spoil the rank test. Adding eps times the
    trace of the top moment matrix selects an extreme point of the face
    instead, at the cost of shifting the optimal value by O(eps), so the
    bound must still be taken from the unpenalized solve.
    """
    k = prog.order
    obj = np.array(prog.objective, dtype=float)
    weight = eps * max(float(np.abs(obj).max()), 1.0)
    for alpha in monomials_upto(prog.n, k):
        obj[grlex_rank(tuple(2 * a for a in alpha))] += weight
    penalized = ConicProgram(
        prog.n, prog.order, prog.num_y, obj,
        prog.eq_rows, prog.eq_rhs, prog.blocks, prog.meta,
    )
    return solve(penalized, config)


def _rref(B: np.ndarray, tol: float):
    """Row-reduce B in place; returns the reduced matrix and pivot columns.

    Scanning columns left to right keeps the pivot monomials graded-lex
    minimal, which is what bounds the basis degree under flatness.
    """
    B = B.copy()
    rows, cols = B.shape
    pivots = []
    r = 0
    for col in range(cols):
        if r >= rows:
            break
        lead = r + int(np.argmax(np.abs(B[r:, col])))
        if abs(B[lead, col]) <= tol:
            continue
        if lead != r:
            B[[r, lead]] = B[[lead, r]]
        B[r] /= B[r, col]
        others = np.arange(rows) != r
        B[others] -= np.outer(B[others, col], B[r])
        pivots.append(col)
        r += 1
    return B, pivots


def extract_minimizers(
    y_star: Tms,
    t: int,
    rank_tol: float = 1e-6,
    seed: int = 2024,
) -> list:
    """Atoms of the flat truncation at order t, one real n-vector each.

    Gram factor of M_t -> pivot monomial basis -> multiplication matrices
    N_i -> simultaneous Schur diagonalization of a random convex
    combination. The combination is redrawn up to five times when the real
    Schur form keeps 2x2 blocks; commutation failures abort extraction.
    """
    n = y_star.n
    M = y_star.moment_matrix(t)
    w, Q = np.linalg.eigh(M)
    cut = rank_tol * max(w[-1], 1.0)
    keep = w > cut
    r = int(keep.sum())
    if r == 0:
        raise ExtractionFailed("moment matrix is numerically zero")
    V = Q[:, keep] * np.sqrt(w[keep])

    mons = monomials_upto(n, t)
    U, pivots = _rref(V.T, rank_tol * max(float(np.abs(V).max()), 1.0))
    if len(pivots) != r:
        raise ExtractionFailed(
            "Gram factor rank deficit during reduction",
            {"rank": r, "pivots": len(pivots)},
        )
    basis = [mons[j] for j in pivots]
    if max(sum(b) for b in basis) >= t:
        raise ExtractionFailed(
            "pivot basis reaches the truncation degree; flatness margin lost",
            {"basis_degree": max(sum(b) for b in basis), "t": t},
        )

    rank_of = {m: j for j, m in enumerate(mons)}
    mult = []
    for i in range(n):
        Ni = np.empty((r, r))
        for l, b in enumerate(basis):
            shifted = tuple(b[j] + (1 if j == i else 0) for j in range(n))
            Ni[:, l] = U[:, rank_of[shifted]]
        mult.append(Ni)

    scale = max(max(np.abs(Ni).max() for Ni in mult), 1.0)
    comm = max(
        float(np.abs(mult[i] @ mult[j] - mult[j] @ mult[i]).max())
        for i in range(n)
        for j in range(i + 1, n)
    ) if n > 1 else 0.0
    if comm > 1e-6 * scale**2:
        raise ExtractionFailed(
            "multiplication matrices do not commute",
            {"commutation": comm, "scale": scale},
        )

    rng = np.random.default_rng(seed)
    last = None
    for _ in range(5):
        xi = rng.random(n)
        xi /= xi.sum()
        N = sum(x * Ni for x, Ni in zip(xi, mult))
        T, Z = sla.schur(N, output="real")
        sub = float(np.abs(np.diag(T, -1)).max()) if r > 1 else 0.0
        last = sub
        if sub <= 1e-8 * max(float(np.abs(T).max()), 1.0):
            points = []
            for j in range(r):
                q = Z[:, j]
                points.append(np.array([float(q @ Ni @ q) for Ni in mult]))
            return points
    raise ExtractionFailed(
        "Schur form kept complex blocks after redraws",
        {"subdiagonal": last, "commutation": comm},
    )


def _active_system(u: np.ndarray, problem: Problem, phi: Sequence[Polynomial]):
    c = problem.constraints
    polys = [c.polys[j] for j in c.eq]
    polys += [c.polys[j] for j in c.ineq if abs(c.polys[j].eval(u)) <= 1e-3]
    polys += list(phi)
    return polys


def polish_point(
    u: Sequence,
    problem: Problem,
    p: Sequence,
    steps: int = 3,
) -> np.ndarray:
    """A few Gauss-Newton steps on the active constraint system at u.

    The system stacks equalities, inequalities active at u and the
    stationarity conditions; the step is the least-squares solution, so an
    overdetermined but consistent system still converges quadratically.
    """
    x = np.asarray(u, dtype=float).copy()
    kkt = build_kkt_tuples(problem.f, problem.constraints, p)
    polys = _active_system(x, problem, kkt.phi)
    if not polys:
        return x
    grads = [q.gradient() for q in polys]
    for _ in range(steps):
        F = np.array([q.eval(x) for q in polys])
        J = np.array([[g.eval(x) for g in gr] for gr in grads])
        step, *_ = np.linalg.lstsq(J, F, rcond=None)
        x = x - step
    return x


def verify_point(
    u: Sequence,
    problem: Problem,
    p: Sequence,
    tol: float = 1e-6,
) -> PointReport:
    """Evaluate the critical-point system at u and report group violations."""
    u = np.asarray(u, dtype=float)
    c = problem.constraints
    kkt = build_kkt_tuples(problem.f, c, p)
    eq = max((abs(c.polys[j].eval(u)) for j in c.eq), default=0.0)
    ineq = max((max(0.0, -c.polys[j].eval(u)) for j in c.ineq), default=0.0)
    stat = max((abs(q.eval(u)) for q in kkt.phi), default=0.0)
    mult = max((max(0.0, -q.eval(u)) for q in kkt.psi), default=0.0)
    worst = max(eq, ineq, stat, mult)
    return PointReport(
        objective=float(problem.f.eval(u)),
        eq_violation=float(eq),
        ineq_violation=float(ineq),
        stationarity=float(stat),
        multiplier_violation=float(mult),
        ok=bool(worst <= tol),
    )


def build_certificate(
    y,
    problem: Problem,
    p: Sequence,
    k: int,
    d: int,
    bound: float,
    rank_tol: float = 1e-6,
    extract_tol: float = 1e-6,
    value_tol: float = 1e-5,
    seed: int = 2024,
) -> Certificate:
    """Flat truncation, extraction, polish and verification in one pass.

    certified requires: flatness detected, every polished atom passing
    verify_point at extract_tol, and every atom's objective matching the
    relaxation bound to value_tol relative accuracy.
    """
    n = problem.f.n
    if isinstance(y, Tms):
        y_star = y
    else:
        y_star = Tms(n, 2 * k, np.asarray(y, dtype=float)[: n_monomials(n, 2 * k)])
    ranks = rank_profile(y_star, k, d, rank_tol)
    t = flat_truncation(y_star, k, d, rank_tol)
    if t is None:
        return Certificate(None, ranks, failure="no flat truncation in [d, k]")
    try:
        atoms = extract_minimizers(y_star, t, rank_tol, seed)
    except ExtractionFailed as exc:
        return Certificate(t, ranks, failure=f"extraction failed: {exc} {exc.residuals}")
    polished = tuple(polish_point(u, problem, p) for u in atoms)
    reports = tuple(verify_point(u, problem, p, extract_tol) for u in polished)
    values_ok = all(
        abs(r.objective - bound) <= value_tol * (1.0 + abs(bound)) for r in reports
    )
    certified = bool(values_ok and all(r.ok for r in reports))
    failure = None
    if not certified:
        worst = max(
            max(r.eq_violation, r.ineq_violation, r.stationarity, r.multiplier_violation)
            for r in reports
        )
        failure = f"verification residual {worst:.3e} or value mismatch"
    return Certificate(t, ranks, polished, reports, certified, failure)
