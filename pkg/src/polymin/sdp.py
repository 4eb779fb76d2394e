"""Dense primal-dual interior-point solver for small block SDPs.

Solves min c.y s.t. A y = b, S_l(y) PSD for each block, where every block
is a symmetric matrix depending linearly on y. Slack matrices X_l = S_l(y)
and dual multipliers (u, Z_l) are driven along the central path of a
homogeneous self-dual embedding, so infeasibility comes out as a
certificate instead of a crash: a dual improving ray (u, Z) with
A'u + sum_l S_l*(Z_l) = 0 and b.u > 0 proves the constraints infeasible,
and a primal ray y with A y = 0, S(y) PSD, c.y < 0 proves the objective
unbounded below.

Directions use Nesterov-Todd scaling with a Mehrotra predictor-corrector;
the reduced KKT system is factored densely once per iteration. Everything
is deterministic: no randomness, no iteration-order ambiguity.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np
import scipy.linalg as sla
from scipy.linalg import blas as sblas

from .moments import ConicProgram
from .poly import grlex_rank, monomials_upto

_TRACE = bool(os.environ.get("POLYMIN_SDP_TRACE"))

__all__ = [
    "SdpStatus",
    "SolverConfig",
    "SdpSolution",
    "numerical_rank",
    "solve",
]


class SdpStatus(Enum):
    """Terminal states; UNBOUNDED is the caller-side reading of a primal
    improving ray once primal feasibility is known separately."""

    OPTIMAL = "optimal"
    PRIMAL_INFEASIBLE = "primal_infeasible"
    DUAL_INFEASIBLE = "dual_infeasible"
    UNBOUNDED = "unbounded"
    MAX_ITERATIONS = "max_iterations"
    NUMERICAL_FAILURE = "numerical_failure"


@dataclass(frozen=True)
class SolverConfig:
    gap_tol: float = 1e-8
    feas_tol: float = 1e-8
    max_iter: int = 200
    rank_tol: float = 1e-6
    step_fraction: float = 0.98


@dataclass
class SdpSolution:
    status: SdpStatus
    y: Optional[np.ndarray]
    primal_obj: Optional[float]
    dual_obj: Optional[float]
    gap: float
    iterations: int
    certificate: Optional[dict] = None
    info: dict = field(default_factory=dict)


def numerical_rank(M: np.ndarray, tol: float = 1e-6) -> int:
    """Count singular values above tol times max(largest, 1)."""
    if M.size == 0:
        return 0
    sv = np.linalg.svd(M, compute_uv=False)
    return int(np.sum(sv > tol * max(sv[0], 1.0)))


# ---------------------------------------------------------------------------
# svec helpers (upper triangle, off-diagonals scaled by sqrt(2))

def _svec_meta(s: int):
    iu = np.triu_indices(s)
    w = np.where(iu[0] == iu[1], 1.0, math.sqrt(2.0))
    return iu, w


def _svec(M: np.ndarray, iu, w) -> np.ndarray:
    return M[iu] * w


def _unsvec(v: np.ndarray, s: int, iu, w) -> np.ndarray:
    M = np.zeros((s, s))
    M[iu] = v / w
    M = M + M.T
    M[np.diag_indices(s)] *= 0.5
    return M


class _Block:
    def __init__(self, spec, num_y: int, col_w=None):
        self.label = spec.label
        self.s = spec.size
        self.iu, self.w = _svec_meta(self.s)
        self.sbar = len(self.w)
        pos = {}
        for k, (i, j) in enumerate(zip(*self.iu)):
            pos[(int(i), int(j))] = k
        G = np.zeros((self.sbar, num_y))
        for (i, j), cell in spec.entries.items():
            r = pos[(i, j)]
            scale = 1.0 if i == j else math.sqrt(2.0)
            for yi, cc in cell.items():
                G[r, yi] += scale * cc
        if col_w is not None:
            G *= col_w[None, :]
        # normalize coefficients; a positive rescale of the localizing
        # polynomial leaves the PSD constraint unchanged
        gmax = np.abs(G).max() if G.size else 0.0
        self.G = G / gmax if gmax > 0 else G

    def svec(self, M):
        return _svec(M, self.iu, self.w)

    def unsvec(self, v):
        return _unsvec(v, self.s, self.iu, self.w)

    def apply(self, y):
        """S(y) as a dense symmetric matrix."""
        return self.unsvec(self.G @ y)


def _sym(M):
    return 0.5 * (M + M.T)


def _sqrt_pair(M):
    """(M^{1/2}, M^{-1/2}) for symmetric positive definite M."""
    vals, vecs = np.linalg.eigh(M)
    vals = np.maximum(vals, 1e-300)
    rt = np.sqrt(vals)
    return (vecs * rt) @ vecs.T, (vecs / rt) @ vecs.T


def _step_to_boundary(M, dM):
    """sup alpha with M + alpha dM PSD, for M positive definite."""
    try:
        Lx = np.linalg.cholesky(M)
    except np.linalg.LinAlgError:
        return 0.0
    Y = sla.solve_triangular(Lx, dM, lower=True)
    Y = sla.solve_triangular(Lx, Y.T, lower=True)
    lam = np.linalg.eigvalsh(_sym(Y)).min()
    if lam >= 0:
        return np.inf
    return -1.0 / lam


class _NTScaling:
    """Per-block NT point: W Z W = X, lambda = W^{-1/2} X W^{-1/2}."""

    def __init__(self, X, Z):
        S, Si = _sqrt_pair(Z)
        T = _sym(S @ X @ S)
        Th, _ = _sqrt_pair(T)
        self.W = _sym(Si @ Th @ Si)
        self.Wh, self.Whi = _sqrt_pair(self.W)
        lam_x = self.Whi @ X @ self.Whi
        lam_z = self.Wh @ Z @ self.Wh
        self.lam = _sym(0.5 * (lam_x + lam_z))
        self.lam_vals, self.lam_vecs = np.linalg.eigh(self.lam)

    def comp_rhs(self, sigmamu: float, dX=None, dZ=None):
        """svec target for dX + W dZ W, with optional second-order term."""
        B = -self.lam @ self.lam
        if sigmamu:
            B = B + sigmamu * np.eye(self.lam.shape[0])
        if dX is not None:
            a = self.Whi @ dX @ self.Whi
            bz = self.Wh @ dZ @ self.Wh
            B = B - 0.5 * (a @ bz + bz @ a)
        Q = self.lam_vecs
        Bq = Q.T @ _sym(B) @ Q
        denom = 0.5 * (self.lam_vals[:, None] + self.lam_vals[None, :])
        Mq = Bq / denom
        M = Q @ Mq @ Q.T
        return _sym(self.Wh @ M @ self.Wh)


def _build_problem_data(prog: ConicProgram, w=None):
    """Dense data; w is an optional per-y column scaling y = w * y'."""
    N = prog.num_y
    blocks = [_Block(spec, N, w) for spec in prog.blocks]
    p = len(prog.eq_rows)
    A = np.zeros((p, N))
    for r, row in enumerate(prog.eq_rows):
        for yi, cc in row.items():
            A[r, yi] += cc
    if w is not None:
        A *= w[None, :]
    b = np.asarray(prog.eq_rhs, dtype=float)
    # row compression: orthogonalize [A | b]; keeps the affine span intact
    if p:
        rowmax = np.maximum(np.abs(A).max(axis=1), np.abs(b))
        # a row left over from an identity that cancelled exactly is pure
        # rounding debris; normalizing it would manufacture a garbage
        # constraint, so it is dropped instead
        live = rowmax > 1e-14 * max(float(rowmax.max(initial=0.0)), 1.0)
        A = A[live]
        b = b[live]
        p = A.shape[0]
    if p:
        scale = np.maximum(np.abs(A).max(axis=1), np.abs(b))
        scale[scale == 0] = 1.0
        A = A / scale[:, None]
        b = b / scale
        Mfull = np.hstack([A, b[:, None]])
        U, sv, Vt = np.linalg.svd(Mfull, full_matrices=False)
        # directions this far below the dominant ones are rounding debris from
        # exact-coefficient conversion; keeping them tilts the affine space off
        # the cone, while dropping them only weakens the relaxation
        keep = sv > 1e-9 * (sv[0] if len(sv) else 1.0)
        R = Vt[keep] * sv[keep][:, None]
        A = R[:, :N]
        b = R[:, N]
    c = np.asarray(prog.objective, dtype=float)
    if w is not None:
        c = c * w
    return c, A, b, blocks


def solve(prog: ConicProgram, config: Optional[SolverConfig] = None) -> SdpSolution:
    """Solve the conic program; see the module docstring for semantics.

    A stalled run is retried once under the diagonal moment scaling
    y_a = R^{|a|} y'_a with R read off the stalled iterate; the scaling is a
    positive diagonal congruence of every block, so the program is unchanged
    up to the change of variables.
    """
    cfg = config or SolverConfig()
    sol = _ipm(prog, cfg, None)
    rays = (SdpStatus.PRIMAL_INFEASIBLE, SdpStatus.DUAL_INFEASIBLE)
    if sol.status in rays or sol.y is None:
        return sol
    sol = _finalize(prog, sol, cfg)
    if sol.status is SdpStatus.OPTIMAL:
        return sol
    degs = np.array([sum(a) for a in monomials_upto(prog.n, 2 * prog.order)][: prog.num_y])
    radius = 1.0
    for i in range(prog.n):
        e2 = tuple(2 if j == i else 0 for j in range(prog.n))
        idx = grlex_rank(e2)
        if idx < prog.num_y and sol.y[idx] > 0:
            radius = max(radius, math.sqrt(sol.y[idx]))
    if radius < 1.25:
        return sol
    # a runaway iterate would suggest an absurd scale; clamp it
    radius = min(radius, 16.0)
    w = radius ** degs
    sol2 = _ipm(prog, cfg, w)
    if sol2.status in rays:
        return SdpSolution(
            sol2.status, None, None, None, sol2.gap, sol2.iterations,
            sol2.certificate, dict(sol2.info, rescaled=radius),
        )
    sol2 = SdpSolution(
        sol2.status,
        sol2.y * w if sol2.y is not None else None,
        sol2.primal_obj,
        sol2.dual_obj,
        sol2.gap,
        sol2.iterations,
        sol2.certificate,
        dict(sol2.info, rescaled=radius),
    )
    if sol2.y is not None:
        sol2 = _finalize(prog, sol2, cfg)
    if sol2.status is SdpStatus.OPTIMAL:
        return sol2
    s1 = sol.info.get("score", np.inf)
    s2 = sol2.info.get("score", np.inf)
    return sol2 if s2 < s1 else sol


def _solution_metrics(prog: ConicProgram, y: np.ndarray, pobj: float, dobj: float):
    """(equality residual, worst block eigenvalue deficit, relative gap) on
    the program as posed, not on the scaled internal model."""
    gap = abs(pobj - dobj) / (1.0 + abs(pobj))
    eqres = 0.0
    for row, rhs in zip(prog.eq_rows, prog.eq_rhs):
        acc = 0.0
        for yi, cc in row.items():
            acc += cc * y[yi]
        eqres = max(eqres, abs(acc - rhs))
    deficit = 0.0
    for spec in prog.blocks:
        S = np.zeros((spec.size, spec.size))
        for (i, j), cell in spec.entries.items():
            v = 0.0
            for yi, cc in cell.items():
                v += cc * y[yi]
            S[i, j] = v
            S[j, i] = v
        deficit = max(deficit, -float(np.linalg.eigvalsh(S)[0]))
    return eqres, deficit, gap


def _solution_ok(prog: ConicProgram, y: np.ndarray, pobj: float, dobj: float,
                 cfg: SolverConfig) -> bool:
    eqres, deficit, gap = _solution_metrics(prog, y, pobj, dobj)
    return eqres <= cfg.feas_tol and deficit <= cfg.feas_tol and gap <= cfg.gap_tol


def _finalize(prog: ConicProgram, sol: SdpSolution, cfg: SolverConfig) -> SdpSolution:
    """Project the returned iterate onto the exact equality rows and rejudge.

    The interior-point loop tests residuals of a compressed row system; the
    projection sharpens the iterate against the rows as posed, which often
    settles near misses one way or the other.
    """
    if sol.y is None:
        return sol
    y = sol.y
    c0 = np.asarray(prog.objective, dtype=float)
    p = len(prog.eq_rows)
    if p and p * len(y) <= 20_000_000:
        A0 = np.zeros((p, len(y)))
        for r, row in enumerate(prog.eq_rows):
            for yi, cc in row.items():
                A0[r, yi] += cc
        b0 = np.asarray(prog.eq_rhs, dtype=float)
        resid = A0 @ y - b0
        delta, *_ = np.linalg.lstsq(A0, resid, rcond=None)
        y2 = y - delta
        m_old = _solution_metrics(prog, y, sol.primal_obj, sol.dual_obj)
        p2 = float(c0 @ y2)
        m_new = _solution_metrics(prog, y2, p2, sol.dual_obj)
        if sorted(m_new, reverse=True) <= sorted(m_old, reverse=True):
            y = y2
            sol = SdpSolution(
                sol.status, y, p2, sol.dual_obj,
                abs(p2 - sol.dual_obj) / (1.0 + abs(p2) + abs(sol.dual_obj)),
                sol.iterations, sol.certificate, sol.info,
            )
    if sol.status is not SdpStatus.OPTIMAL and _solution_ok(
        prog, y, sol.primal_obj, sol.dual_obj, cfg
    ):
        sol = SdpSolution(
            SdpStatus.OPTIMAL, y, sol.primal_obj, sol.dual_obj, sol.gap,
            sol.iterations, sol.certificate, sol.info,
        )
    return sol


def _ipm(prog: ConicProgram, cfg: SolverConfig, col_w) -> SdpSolution:
    c0, A, b, blocks = _build_problem_data(prog, col_w)
    N = prog.num_y
    p = A.shape[0]

    obj_scale = max(1.0, np.abs(c0).max()) if c0.size else 1.0
    c = c0 / obj_scale

    X = [np.eye(bl.s) for bl in blocks]
    Z = [np.eye(bl.s) for bl in blocks]
    y = np.zeros(N)
    u = np.zeros(p)
    tau, kappa = 1.0, 1.0
    nu = sum(bl.s for bl in blocks) + 1.0
    # least-squares map for the free multiplier: u is unconstrained, so the
    # dual residual is tested at the best u for the current Z iterate
    pinvAt = np.linalg.pinv(A.T) if p else None
    # min-norm corrector pinning G^T dz to its Newton equation; the sandwich
    # recovery of dz loses digits once cond(W)^2 reaches 1/mu^2
    Gstack = np.vstack([bl.G for bl in blocks])
    split = np.cumsum([bl.sbar for bl in blocks])[:-1]
    pinvGt = np.linalg.pinv(Gstack.T)

    normb = 1.0 + np.abs(b).max(initial=0.0)
    normc = 1.0 + np.abs(c).max(initial=0.0)

    def gather(vs):
        return np.concatenate(vs) if vs else np.zeros(0)

    status = SdpStatus.MAX_ITERATIONS
    info: dict = {}
    it = 0
    best = None
    best_score = np.inf
    mu_floor = np.inf
    stall = 0
    # the scaled metrics are a cheap gate; OPTIMAL additionally requires the
    # original-unit contract, so a near-miss tightens the gate and iterates on
    gate_feas, gate_gap = cfg.feas_tol, cfg.gap_tol

    def orig_y(yv, tv):
        out = yv / tv
        return out * col_w if col_w is not None else out

    for it in range(1, cfg.max_iter + 1):
        xbars = [bl.svec(Xl) for bl, Xl in zip(blocks, X)]
        zbars = [bl.svec(Zl) for bl, Zl in zip(blocks, Z)]
        Gy = [bl.G @ y for bl in blocks]
        GtZ = np.zeros(N)
        for bl, zb in zip(blocks, zbars):
            GtZ += bl.G.T @ zb

        if p:
            u = pinvAt @ (c * tau - GtZ)
        rp = A @ y - b * tau
        rg = [gy - xb for gy, xb in zip(Gy, xbars)]
        rd = c * tau - (A.T @ u if p else 0.0) - GtZ
        cty = float(c @ y)
        btu = float(b @ u) if p else 0.0
        rk = btu - cty - kappa

        mu = (sum(float(xb @ zb) for xb, zb in zip(xbars, zbars)) + tau * kappa) / nu

        # convergence and certificate tests
        relp = max(
            np.abs(rp).max(initial=0.0),
            max((np.abs(r).max(initial=0.0) for r in rg), default=0.0),
        ) / (tau * normb)
        reld = np.abs(rd).max(initial=0.0) / (tau * normc)
        pobj = cty / tau
        dobj = btu / tau
        relgap = abs(pobj - dobj) / (1.0 + abs(pobj) + abs(dobj))
        if _TRACE:
            print(
                f"    it={it:3d} mu={mu:9.2e} relp={relp:9.2e} reld={reld:9.2e} "
                f"gap={relgap:9.2e} tau={tau:9.2e} kappa={kappa:9.2e}"
            )
        score = max(relp, reld, relgap)
        # a run heading into the ray regime shows progress in mu, not in the
        # tau-normalized metrics, so both must freeze before giving up
        if score < 0.99 * best_score or mu < 0.9 * mu_floor:
            stall = 0
        else:
            stall += 1
            if stall > 15:
                status = SdpStatus.NUMERICAL_FAILURE
                break
        mu_floor = min(mu_floor, mu)
        if score < best_score:
            best_score = score
            best = (y.copy(), u.copy(), tau, relp, reld, relgap)
        if relp <= gate_feas and reld <= gate_feas and relgap <= gate_gap:
            if _solution_ok(prog, orig_y(y, tau), pobj * obj_scale, dobj * obj_scale, cfg):
                status = SdpStatus.OPTIMAL
                break
            gate_feas = max(0.25 * gate_feas, 1e-13)
            gate_gap = max(0.25 * gate_gap, 1e-13)

        # infeasibility emerges in the embedding as kappa dominating tau;
        # testing rays before that point picks up ill-scaled iterates
        ray_regime = kappa > 10.0 * tau
        if ray_regime and btu > 0:
            ray_res = np.abs((A.T @ u if p else 0.0) + GtZ).max(initial=0.0) / btu
            ray_norm = max(np.abs(u).max(initial=0.0), max(np.abs(zb).max(initial=0.0) for zb in zbars)) / btu
            if ray_res <= cfg.feas_tol * (1.0 + ray_norm):
                status = SdpStatus.PRIMAL_INFEASIBLE
                cert = {
                    "kind": "dual_improving_ray",
                    "u": u / btu,
                    "Z": [Zl / btu for Zl in Z],
                    "b_dot_u": 1.0,
                }
                return SdpSolution(status, None, None, None, np.inf, it, cert, {"mu": mu})
        if ray_regime and cty < 0:
            s = -cty
            ray_feas = np.abs(A @ y).max(initial=0.0) / s if p else 0.0
            slack_ok = True
            for bl, gy in zip(blocks, Gy):
                Svals = np.linalg.eigvalsh(bl.unsvec(gy / s))
                if Svals.min(initial=0.0) < -cfg.feas_tol * 10:
                    slack_ok = False
                    break
            ynorm = np.abs(y).max(initial=0.0) / s
            if slack_ok and ray_feas <= cfg.feas_tol * (1.0 + ynorm):
                status = SdpStatus.DUAL_INFEASIBLE
                cert = {"kind": "primal_improving_ray", "y": y / s, "c_dot_y": -1.0}
                return SdpSolution(status, None, None, None, np.inf, it, cert, {"mu": mu})

        # NT scalings and the reduced KKT matrix
        try:
            scalings = [_NTScaling(Xl, Zl) for Xl, Zl in zip(X, Z)]
        except np.linalg.LinAlgError:
            status = SdpStatus.NUMERICAL_FAILURE
            break

        H = np.zeros((N, N))
        Ghats = []
        # an iterate grazing the cone boundary can overflow W^{-1}; the
        # non-finite H is rejected below instead of warning midway
        with np.errstate(over="ignore", invalid="ignore"):
            for bl, sc in zip(blocks, scalings):
                Ghat = np.empty_like(bl.G)
                chunk = max(1, int(2**22 // max(bl.s * bl.s, 1)))
                for lo in range(0, N, chunk):
                    hi = min(N, lo + chunk)
                    V = bl.G[:, lo:hi].T
                    T = np.zeros((hi - lo, bl.s, bl.s))
                    T[:, bl.iu[0], bl.iu[1]] = V / bl.w
                    T = T + np.transpose(T, (0, 2, 1))
                    idx = np.arange(bl.s)
                    T[:, idx, idx] *= 0.5
                    T = sc.Whi @ T @ sc.Whi
                    Ghat[:, lo:hi] = (T[:, bl.iu[0], bl.iu[1]] * bl.w).T
                Ghats.append(Ghat)
                Ht = sblas.dsyrk(1.0, Ghat, trans=1)
                H += Ht + np.triu(Ht, 1).T
        if not np.all(np.isfinite(H)):
            status = SdpStatus.NUMERICAL_FAILURE
            break

        KKT = np.zeros((N + p, N + p))
        KKT[:N, :N] = H
        if p:
            KKT[:N, N:] = -A.T
            KKT[N:, :N] = A
        rhs_tau = np.concatenate([c, -b])

        lu = None
        for reg in (0.0, 1e-12, 1e-9, 1e-6):
            Kreg = KKT
            if reg:
                Kreg = KKT.copy()
                dscale = max(1.0, H.diagonal().max())
                Kreg[np.arange(N), np.arange(N)] += reg * dscale
                if p:
                    Kreg[np.arange(N, N + p), np.arange(N, N + p)] -= reg * dscale
            try:
                cand = sla.lu_factor(Kreg, check_finite=False)
            except (ValueError, sla.LinAlgError):
                continue
            probe = sla.lu_solve(cand, rhs_tau, check_finite=False)
            if np.all(np.isfinite(probe)):
                lu = cand
                break
        if lu is None:
            status = SdpStatus.NUMERICAL_FAILURE
            break

        def kkt_solve(rhs):
            # refine against the unregularized matrix; the factor may carry
            # a diagonal shift
            sol = sla.lu_solve(lu, rhs, check_finite=False)
            for _ in range(2):
                if not np.all(np.isfinite(sol)):
                    return sol
                resid = rhs - KKT @ sol
                corr = sla.lu_solve(lu, resid, check_finite=False)
                sol = sol + corr
            return sol

        g2 = kkt_solve(rhs_tau)
        if not np.all(np.isfinite(g2)):
            status = SdpStatus.NUMERICAL_FAILURE
            break

        def w_inv_apply(vbars):
            """Per block: svec(W^{-1} unsvec(v) W^{-1})."""
            out = []
            for bl, sc, vb in zip(blocks, scalings, vbars):
                Mv = bl.unsvec(vb)
                Winv = sc.Whi @ sc.Whi
                out.append(bl.svec(_sym(Winv @ Mv @ Winv)))
            return out

        def solve_dirs(rc_blocks, rc_tk):
            # eliminate dX, dZ, dkappa; two-solve for dtau
            vbars = [rcb - rgb for rcb, rgb in zip(rc_blocks, rg)]
            winv_v = w_inv_apply(vbars)
            h = -rd.copy()
            for bl, wv in zip(blocks, winv_v):
                h += bl.G.T @ wv
            rhs1 = np.concatenate([h, -rp])
            g1 = kkt_solve(rhs1)
            if not np.all(np.isfinite(g1)):
                return None
            rhat = -rk + rc_tk / tau
            phi1 = -float(c @ g1[:N]) + (float(b @ g1[N:]) if p else 0.0)
            phi2 = -float(c @ g2[:N]) + (float(b @ g2[N:]) if p else 0.0)
            denom = kappa / tau - phi2
            if denom == 0:
                return None
            dtau = (rhat - phi1) / denom
            v = g1 - g2 * dtau
            dy, du = v[:N], v[N:]
            dkappa = (rc_tk - kappa * dtau) / tau
            dzbs = []
            dxbs = []
            for bl, sc, rcb, rgb in zip(blocks, scalings, rc_blocks, rg):
                dzb = bl.svec(
                    _sym(
                        (sc.Whi @ sc.Whi)
                        @ bl.unsvec(rcb - rgb - bl.G @ dy)
                        @ (sc.Whi @ sc.Whi)
                    )
                )
                dzbs.append(dzb)
                dxbs.append(bl.G @ dy + rgb)
            w = c * dtau - (A.T @ du if p else 0.0) + rd
            werr = w - Gstack.T @ np.concatenate(dzbs)
            corr = np.split(pinvGt @ werr, split)
            dX = [bl.unsvec(xb) for bl, xb in zip(blocks, dxbs)]
            dZ = [bl.unsvec(zb + cb) for bl, zb, cb in zip(blocks, dzbs, corr)]
            return dy, du, dtau, dkappa, dX, dZ

        # predictor
        rc_aff = [bl.svec(sc.comp_rhs(0.0)) for bl, sc in zip(blocks, scalings)]
        dirs = solve_dirs(rc_aff, -tau * kappa)
        if dirs is None:
            status = SdpStatus.NUMERICAL_FAILURE
            break
        dy_a, du_a, dtau_a, dkappa_a, dX_a, dZ_a = dirs

        def max_step(dXs, dZs, dtau, dkappa):
            alpha = np.inf
            for Xl, dXl in zip(X, dXs):
                alpha = min(alpha, _step_to_boundary(Xl, dXl))
            for Zl, dZl in zip(Z, dZs):
                alpha = min(alpha, _step_to_boundary(Zl, dZl))
            if dtau < 0:
                alpha = min(alpha, -tau / dtau)
            if dkappa < 0:
                alpha = min(alpha, -kappa / dkappa)
            return alpha

        alpha_aff = min(1.0, cfg.step_fraction * max_step(dX_a, dZ_a, dtau_a, dkappa_a))
        mu_aff = (
            sum(
                float(np.tensordot(Xl + alpha_aff * dXl, Zl + alpha_aff * dZl))
                for Xl, dXl, Zl, dZl in zip(X, dX_a, Z, dZ_a)
            )
            + (tau + alpha_aff * dtau_a) * (kappa + alpha_aff * dkappa_a)
        ) / nu
        sigma = min(1.0, max(0.0, (mu_aff / mu))) ** 3

        # corrector
        rc_corr = [
            bl.svec(sc.comp_rhs(sigma * mu, dXl, dZl))
            for bl, sc, dXl, dZl in zip(blocks, scalings, dX_a, dZ_a)
        ]
        rc_tk = sigma * mu - tau * kappa - dtau_a * dkappa_a
        dirs = solve_dirs(rc_corr, rc_tk)
        if dirs is None:
            status = SdpStatus.NUMERICAL_FAILURE
            break
        dy, du, dtau, dkappa, dX, dZ = dirs

        alpha = min(1.0, cfg.step_fraction * max_step(dX, dZ, dtau, dkappa))
        if alpha < 0.05:
            # graze recovery: a centering step keeps mu but still contracts
            # the residuals by (1 - alpha)
            rc_cent = [bl.svec(sc.comp_rhs(mu)) for bl, sc in zip(blocks, scalings)]
            cent = solve_dirs(rc_cent, mu - tau * kappa)
            if cent is not None:
                a_c = min(1.0, cfg.step_fraction * max_step(cent[4], cent[5], cent[2], cent[3]))
                if a_c > alpha:
                    dy, du, dtau, dkappa, dX, dZ = cent
                    alpha = a_c
        if alpha < 1e-13:
            status = SdpStatus.NUMERICAL_FAILURE
            break
        y = y + alpha * dy
        u = u + alpha * du
        tau += alpha * dtau
        kappa += alpha * dkappa
        X = [_sym(Xl + alpha * dXl) for Xl, dXl in zip(X, dX)]
        Z = [_sym(Zl + alpha * dZl) for Zl, dZl in zip(Z, dZ)]

    if status is not SdpStatus.OPTIMAL and best is not None:
        # a wandering final step must not discard an already-converged iterate
        y, u, tau, b_relp, b_reld, b_relgap = best
        if (
            b_relp <= cfg.feas_tol
            and b_reld <= cfg.feas_tol
            and b_relgap <= cfg.gap_tol
            and _solution_ok(
                prog,
                orig_y(y, tau),
                float(c @ y) / tau * obj_scale,
                (float(b @ u) / tau if p else 0.0) * obj_scale,
                cfg,
            )
        ):
            status = SdpStatus.OPTIMAL
        info.update({"relp": b_relp, "reld": b_reld, "relgap": b_relgap})
    pobj = float(c @ y) / tau * obj_scale
    dobj = (float(b @ u) / tau if p else 0.0) * obj_scale
    gap = abs(pobj - dobj) / (1.0 + abs(pobj) + abs(dobj))
    yout = y / tau
    info.update({"tau": tau, "kappa": kappa, "score": best_score})
    return SdpSolution(status, yout, pobj, dobj, gap, it, None, info)
