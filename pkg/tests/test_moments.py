"""Relaxation assembly: Riesz rows, localizer blocks, mode differences."""

import itertools
import math

import numpy as np
import pytest

from polymin.lme import (
    ConstraintTuple,
    lme_ball_sphere,
    lme_unit_box,
    multipliers_from_L,
    synthesize,
)
from polymin.moments import (
    RelaxationMode,
    assemble,
    build_kkt_tuples,
    localizing_structure,
    min_order,
)
from polymin.poly import Polynomial, monomials_upto, n_monomials, tms_of_point, variables


def _block_matrix(spec, y):
    m = np.zeros((spec.size, spec.size))
    for (i, j), row in spec.entries.items():
        v = sum(coef * y[idx] for idx, coef in row.items())
        m[i, j] = v
        m[j, i] = v
    return m


def _rows_hold(prog, y, tol=1e-10):
    worst = 0.0
    for row, rhs in zip(prog.eq_rows, prog.eq_rhs):
        v = sum(coef * y[idx] for idx, coef in row.items())
        worst = max(worst, abs(v - rhs))
    return worst <= tol


def test_standard_lift_of_feasible_point():
    cons, _ = lme_unit_box(2)
    x1, x2 = variables(2)
    f = x1**2 * x2 + 3 * x2 - 1
    k = 2
    prog = assemble(f, cons, None, k, RelaxationMode.STANDARD)
    u = np.array([0.25, 0.75])
    y = tms_of_point(u, 2 * k).values
    assert _rows_hold(prog, y)
    assert prog.objective @ y == pytest.approx(f.eval(u), abs=1e-12)
    for spec in prog.blocks:
        w = np.linalg.eigvalsh(_block_matrix(spec, y))
        assert w[0] >= -1e-10


def test_localizer_evaluates_riesz_functional():
    cons, _ = lme_unit_box(2)
    k = 2
    u = np.array([0.3, 0.9])
    y = tms_of_point(u, 2 * k).values
    q = cons.polys[2]
    spec = localizing_structure(q.to_float(), k)
    m = _block_matrix(spec, y)
    basis = monomials_upto(2, k - 1)
    assert spec.size == len(basis)
    for i, a in enumerate(basis):
        for j, b in enumerate(basis):
            expect = q.eval(u) * np.prod(u ** np.array(a)) * np.prod(u ** np.array(b))
            assert m[i, j] == pytest.approx(expect, abs=1e-12)


def test_tight_lift_at_a_critical_point():
    """The Dirac measure at the constrained minimizer satisfies every row."""
    cons, res = lme_ball_sphere(2, equality=True)
    x1, x2 = variables(2)
    f = x1
    p = multipliers_from_L(res.L, f)
    kkt = build_kkt_tuples(f, cons, p)
    k = 2
    prog = assemble(f, cons, kkt, k, RelaxationMode.TIGHT)
    y = tms_of_point(np.array([-1.0, 0.0]), 2 * k).values
    assert _rows_hold(prog, y)
    assert prog.objective @ y == pytest.approx(-1.0)
    for spec in prog.blocks:
        w = np.linalg.eigvalsh(_block_matrix(spec, y))
        assert w[0] >= -1e-10


def test_noncritical_feasible_point_violates_phi_rows():
    cons, res = lme_ball_sphere(2, equality=True)
    x1, x2 = variables(2)
    f = x1
    p = multipliers_from_L(res.L, f)
    kkt = build_kkt_tuples(f, cons, p)
    prog = assemble(f, cons, kkt, 2, RelaxationMode.TIGHT)
    s = 1.0 / math.sqrt(2.0)
    y = tms_of_point(np.array([s, s]), 4).values
    assert not _rows_hold(prog, y, tol=1e-6)


def test_duplicate_equalities_collapse():
    x1, x2 = variables(2)
    c = ConstraintTuple(2, (x1 + x2 - 1, x1 + x2 - 1), (0, 1), ())
    f = x1**2 + x2**2
    k = 2
    prog = assemble(f, c, None, k, RelaxationMode.STANDARD)
    # shifts span the vanishing localizing matrix: degree <= 2(k - 1) for
    # an affine constraint, one copy per distinct row plus normalization
    assert len(prog.eq_rows) == 1 + n_monomials(2, 2 * (k - 1))


def test_high_degree_conditions_are_omitted_then_included():
    x1, x2, x3 = variables(3)
    f = (
        x1**3 + x2**3 + x3**3 + 4 * x1 * x2 * x3
        - (x1 * (x2**2 + x3**2) + x2 * (x3**2 + x1**2) + x3 * (x1**2 + x2**2))
    )
    c = ConstraintTuple(3, (x1, x1 * x2 - 1, x2 * x3 - 1), (), (0, 1, 2))
    res = synthesize(c, hint="auto")
    p = multipliers_from_L(res.L, f)
    kkt = build_kkt_tuples(f, c, p)
    low = assemble(f, c, kkt, 2, RelaxationMode.TIGHT)
    high = assemble(f, c, kkt, 4, RelaxationMode.TIGHT)
    assert any(lbl.startswith("phi") for lbl in low.meta["omitted"])
    assert not any(lbl.startswith("phi") for lbl in high.meta["omitted"])


def test_min_order_matches_degree_arithmetic():
    x1, x2, x3 = variables(3)
    motzkin = x1**4 * x2**2 + x1**2 * x2**4 + x3**6 - 3 * x1**2 * x2**2 * x3**2
    f = motzkin + x1**4 + x2**4 + x3**4
    c = ConstraintTuple(3, (x1**2 + x2**2 + x3**2 - 1,), (), (0,))
    res = synthesize(c, hint="auto")
    p = multipliers_from_L(res.L, f)
    kkt = build_kkt_tuples(f, c, p)
    mo = min_order(f, c, kkt)
    degs = [q.degree for q in c.polys]
    degs += [q.degree for q in kkt.phi if not q.is_zero()]
    degs += [q.degree for q in kkt.psi if not q.is_zero()]
    assert mo.d == math.ceil(max(degs) / 2)
    assert mo.k == max(1, math.ceil(f.degree / 2), mo.d)


def test_psi_blocks_only_in_tight_mode():
    cons, res = lme_unit_box(2)
    x1, x2 = variables(2)
    f = x1 * x2
    p = multipliers_from_L(res.L, f)
    kkt = build_kkt_tuples(f, cons, p)
    std = assemble(f, cons, None, 2, RelaxationMode.STANDARD)
    tight = assemble(f, cons, kkt, 2, RelaxationMode.TIGHT)
    std_labels = {b.label for b in std.blocks}
    tight_labels = {b.label for b in tight.blocks}
    assert not any(lbl.startswith("psi") for lbl in std_labels)
    assert any(lbl.startswith("psi") for lbl in tight_labels)
    assert std_labels <= tight_labels


def test_preordering_enumerates_subset_products():
    cons, res = lme_unit_box(2)
    x1, x2 = variables(2)
    f = x1 * x2
    p = multipliers_from_L(res.L, f)
    kkt = build_kkt_tuples(f, cons, p)
    k = 2
    prog = assemble(f, cons, kkt, k, RelaxationMode.PREORDERING)
    gens = [cons.polys[j].to_float() for j in cons.ineq]
    gens += [q.to_float() for q in kkt.psi if not q.is_zero()]
    expected = 0
    for r in range(1, len(gens) + 1):
        for combo in itertools.combinations(gens, r):
            prod = Polynomial.one(2)
            for g in combo:
                prod = prod * g
            if prod.degree <= 2 * k:
                expected += 1
    # moment matrix plus one localizer per admissible product
    assert len(prog.blocks) == 1 + expected
    assert expected > len(gens)


def test_preordering_cap_is_enforced():
    cons, res = lme_unit_box(3)
    x1, x2, x3 = variables(3)
    f = x1 * x2 * x3
    p = multipliers_from_L(res.L, f)
    kkt = build_kkt_tuples(f, cons, p)
    with pytest.raises(ValueError):
        assemble(f, cons, kkt, 2, RelaxationMode.PREORDERING, preordering_cap=4)


def test_assemble_rejects_too_small_order():
    x1, x2 = variables(2)
    f = x1**4 + x2**4
    c = ConstraintTuple(2, (x1,), (), (0,))
    with pytest.raises(ValueError):
        assemble(f, c, None, 1, RelaxationMode.STANDARD)


def test_tight_mode_requires_kkt():
    x1, x2 = variables(2)
    f = x1
    c = ConstraintTuple(2, (x1,), (), (0,))
    with pytest.raises(ValueError):
        assemble(f, c, None, 2, RelaxationMode.TIGHT)
