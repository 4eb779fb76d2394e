"""Interior-point solver on small hand-checkable cones."""

import numpy as np
import pytest
from scipy.optimize import linprog

from polymin.moments import ConicProgram, PsdBlockSpec
from polymin.sdp import SdpStatus, SolverConfig, numerical_rank, solve


def _prog(num_y, objective, eq_rows, eq_rhs, blocks):
    return ConicProgram(
        n=1,
        order=1,
        num_y=num_y,
        objective=np.asarray(objective, dtype=float),
        eq_rows=eq_rows,
        eq_rhs=eq_rhs,
        blocks=blocks,
        meta={},
    )


def _toy_eigenvalue():
    # min y1 with [[y1, y0], [y0, y1]] psd and y0 = 1: optimum 1
    block = PsdBlockSpec("m", 2, {(0, 0): {1: 1.0}, (0, 1): {0: 1.0}, (1, 1): {1: 1.0}})
    return _prog(2, [0.0, 1.0], [{0: 1.0}], [1.0], [block]), 1.0


def _toy_lp():
    # min y1 + 2 y2 with y1 >= 3, y2 >= y1 - 1: optimum 7
    b1 = PsdBlockSpec("a", 1, {(0, 0): {1: 1.0, 0: -3.0}})
    b2 = PsdBlockSpec("b", 1, {(0, 0): {2: 1.0, 1: -1.0, 0: 1.0}})
    return _prog(3, [0.0, 1.0, 2.0], [{0: 1.0}], [1.0], [b1, b2]), 7.0


def _toy_schur():
    # min y2 with [[1, y1], [y1, y2]] psd and y1 = 1: optimum 1
    block = PsdBlockSpec("m", 2, {(0, 0): {0: 1.0}, (0, 1): {1: 1.0}, (1, 1): {2: 1.0}})
    return _prog(3, [0.0, 0.0, 1.0], [{0: 1.0}, {1: 1.0}], [1.0, 1.0], [block]), 1.0


def _toy_ball():
    # min y1 + y2 over the psd disk [[1 + y1, y2], [y2, 1 - y1]]: -sqrt(2)
    block = PsdBlockSpec(
        "m", 2, {(0, 0): {0: 1.0, 1: 1.0}, (0, 1): {2: 1.0}, (1, 1): {0: 1.0, 1: -1.0}}
    )
    return _prog(3, [0.0, 1.0, 1.0], [{0: 1.0}], [1.0], [block]), -np.sqrt(2.0)


@pytest.mark.parametrize("builder", [_toy_eigenvalue, _toy_lp, _toy_schur, _toy_ball])
def test_toy_optima(builder):
    prog, expected = builder()
    sol = solve(prog)
    assert sol.status is SdpStatus.OPTIMAL
    assert sol.primal_obj == pytest.approx(expected, abs=1e-6)
    assert sol.dual_obj == pytest.approx(expected, abs=1e-6)


@pytest.mark.parametrize("builder", [_toy_eigenvalue, _toy_lp, _toy_schur, _toy_ball])
def test_weak_duality(builder):
    prog, _ = builder()
    sol = solve(prog)
    assert sol.dual_obj <= sol.primal_obj + 1e-7


def test_primal_infeasible_detected():
    block = PsdBlockSpec("neg", 1, {(0, 0): {0: -1.0}})
    prog = _prog(1, [0.0], [{0: 1.0}], [1.0], [block])
    sol = solve(prog)
    assert sol.status is SdpStatus.PRIMAL_INFEASIBLE
    assert sol.y is None


def test_unbounded_detected():
    block = PsdBlockSpec("pos", 1, {(0, 0): {1: 1.0}})
    prog = _prog(2, [0.0, -1.0], [{0: 1.0}], [1.0], [block])
    sol = solve(prog)
    assert sol.status in (SdpStatus.DUAL_INFEASIBLE, SdpStatus.UNBOUNDED)


def test_objective_scaling_moves_value_not_argmin():
    prog, _ = _toy_schur()
    base = solve(prog)
    scaled = ConicProgram(
        prog.n, prog.order, prog.num_y, 1000.0 * np.asarray(prog.objective),
        prog.eq_rows, prog.eq_rhs, prog.blocks, prog.meta,
    )
    sol = solve(scaled)
    assert sol.status is SdpStatus.OPTIMAL
    assert sol.primal_obj == pytest.approx(1000.0 * base.primal_obj, rel=1e-6)
    assert np.allclose(sol.y, base.y, atol=1e-6)


def test_determinism_is_bitwise():
    prog, _ = _toy_ball()
    a = solve(prog)
    b = solve(prog)
    assert a.status is b.status
    assert a.iterations == b.iterations
    assert np.array_equal(a.y, b.y)
    assert a.primal_obj == b.primal_obj


def test_random_diagonal_cones_match_linprog():
    """Diagonal SDPs are LPs; cross-check optima against scipy."""
    rng = np.random.default_rng(11)
    for trial in range(10):
        m = int(rng.integers(3, 6))
        p = int(rng.integers(1, 3))
        A = rng.standard_normal((p, m))
        y_feas = rng.uniform(0.5, 2.0, size=m)
        b = A @ y_feas
        cost = rng.uniform(0.1, 2.0, size=m)
        ref = linprog(cost, A_eq=A, b_eq=b, bounds=[(0, None)] * m, method="highs")
        assert ref.status == 0
        rows = [{j: float(A[i, j]) for j in range(m)} for i in range(p)]
        blocks = [PsdBlockSpec(f"d{j}", 1, {(0, 0): {j: 1.0}}) for j in range(m)]
        prog = _prog(m, cost, rows, list(map(float, b)), blocks)
        sol = solve(prog)
        assert sol.status is SdpStatus.OPTIMAL, trial
        assert sol.primal_obj == pytest.approx(ref.fun, abs=1e-6 * (1 + abs(ref.fun)))


def test_solution_certifies_feasibility():
    prog, _ = _toy_ball()
    sol = solve(prog)
    y = sol.y
    v = float(sum(y[i] * c for i, c in prog.eq_rows[0].items()))
    assert v == pytest.approx(prog.eq_rhs[0], abs=1e-7)
    m = np.zeros((2, 2))
    for (i, j), row in prog.blocks[0].entries.items():
        m[i, j] = m[j, i] = sum(c * y[idx] for idx, c in row.items())
    assert np.linalg.eigvalsh(m)[0] >= -1e-7


def test_numerical_rank_thresholds():
    m = np.diag([2.0, 1e-3, 1e-9, 0.0])
    assert numerical_rank(m, 1e-6) == 2
    assert numerical_rank(m, 1e-12) == 3
    assert numerical_rank(np.zeros((3, 3)), 1e-6) == 0
