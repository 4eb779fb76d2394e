"""Flat truncation, atom extraction and point verification."""

import numpy as np
import pytest

from polymin.certify import (
    ExtractionFailed,
    build_certificate,
    extract_minimizers,
    flat_truncation,
    polish_point,
    rank_profile,
    reselect_moments,
    verify_point,
)
from polymin.lme import Problem, lme_ball_sphere, multipliers_from_L
from polymin.moments import RelaxationMode, assemble, build_kkt_tuples, min_order
from polymin.poly import Tms, monomials_upto, tms_of_point, variables
from polymin.sdp import SdpStatus, solve


def _mixture(points, weights, order):
    n = len(points[0])
    acc = None
    for u, w in zip(points, weights):
        y = tms_of_point(np.asarray(u, dtype=float), order).values
        acc = w * y if acc is None else acc + w * y
    return Tms(n, order, acc)


def test_one_atom_round_trip():
    u = np.array([0.37, -1.21])
    y = tms_of_point(u, 4)
    assert flat_truncation(y, 2, 1) == 1
    atoms = extract_minimizers(y, 1)
    assert len(atoms) == 1
    assert np.allclose(atoms[0], u, atol=1e-10)


def test_two_atom_round_trip():
    pts = [np.array([0.5, 0.25]), np.array([-1.0, 0.75])]
    y = _mixture(pts, [0.4, 0.6], 4)
    t = flat_truncation(y, 2, 1)
    assert t is not None
    atoms = extract_minimizers(y, t)
    assert len(atoms) == 2
    got = sorted(tuple(a) for a in atoms)
    want = sorted(tuple(p) for p in pts)
    assert np.allclose(got, want, atol=1e-8)


def test_rank_profile_of_two_atoms():
    pts = [np.array([0.5, 0.25]), np.array([-1.0, 0.75])]
    y = _mixture(pts, [0.5, 0.5], 4)
    assert rank_profile(y, 2, 1) == ((1, 2, 1), (2, 2, 2))


def test_continuous_support_never_goes_flat():
    """Moments of the uniform measure on the circle keep gaining rank."""
    n = 2
    vals = []
    for a in monomials_upto(n, 4):
        i, j = a
        if i % 2 or j % 2:
            vals.append(0.0)
        else:
            # E[x^i y^j] over the unit circle via the beta function
            from math import gamma

            vals.append(gamma((i + 1) / 2) * gamma((j + 1) / 2) / (np.pi * gamma((i + j + 2) / 2)))
    y = Tms(n, 4, np.array(vals))
    assert flat_truncation(y, 2, 1) is None
    with pytest.raises(ExtractionFailed):
        extract_minimizers(y, 1)


def _ball_problem():
    cons, res = lme_ball_sphere(2)
    x1, x2 = variables(2)
    f = x1
    p = multipliers_from_L(res.L, f)
    return Problem(f, cons), p


def test_polish_converges_quadratically_near_the_root():
    problem, p = _ball_problem()
    u = polish_point(np.array([-0.993, 0.04]), problem, p)
    assert np.allclose(u, [-1.0, 0.0], atol=1e-10)


def test_verify_point_accepts_the_minimizer():
    problem, p = _ball_problem()
    r = verify_point(np.array([-1.0, 0.0]), problem, p)
    assert r.ok
    assert r.objective == pytest.approx(-1.0)
    assert r.feasibility <= 1e-12
    assert r.stationarity <= 1e-12
    assert r.multiplier_violation == 0.0


def test_verify_point_flags_negative_multiplier():
    """(1, 0) is critical for x1 on the disk but with lambda < 0."""
    problem, p = _ball_problem()
    r = verify_point(np.array([1.0, 0.0]), problem, p)
    assert not r.ok
    assert r.multiplier_violation == pytest.approx(0.5)
    assert r.feasibility <= 1e-12


def test_verify_point_flags_infeasibility():
    problem, p = _ball_problem()
    r = verify_point(np.array([-1.4, 0.0]), problem, p)
    assert not r.ok
    assert r.ineq_violation == pytest.approx(0.96)


def _ball_relaxation(k=2):
    problem, p = _ball_problem()
    kkt = build_kkt_tuples(problem.f, problem.constraints, p)
    mo = min_order(problem.f, problem.constraints, kkt)
    prog = assemble(problem.f, problem.constraints, kkt, k, RelaxationMode.TIGHT)
    return problem, p, kkt, mo, prog


def test_certificate_end_to_end_on_the_disk():
    problem, p, kkt, mo, prog = _ball_relaxation()
    sol = solve(prog)
    assert sol.status is SdpStatus.OPTIMAL
    assert sol.primal_obj == pytest.approx(-1.0, abs=1e-6)
    cert = build_certificate(np.asarray(sol.y), problem, p, 2, mo.d, sol.primal_obj)
    assert cert.certified
    assert cert.flat_at is not None
    assert len(cert.minimizers) == 1
    assert np.allclose(cert.minimizers[0], [-1.0, 0.0], atol=1e-6)
    assert all(r.ok for r in cert.residuals)


def test_reselect_keeps_the_bound_and_flattens():
    problem, p, kkt, mo, prog = _ball_relaxation()
    base = solve(prog)
    resel = reselect_moments(prog)
    assert resel.status is SdpStatus.OPTIMAL
    assert resel.primal_obj == pytest.approx(base.primal_obj, abs=1e-3)
    y = Tms(2, 4, np.asarray(resel.y)[:15])
    assert flat_truncation(y, 2, mo.d) is not None


def test_build_certificate_reports_rank_failure():
    problem, p = _ball_problem()
    rng = np.random.default_rng(3)
    junk = rng.uniform(0.5, 1.0, size=15)
    junk[0] = 1.0
    cert = build_certificate(junk, problem, p, 2, 2, -1.0)
    assert not cert.certified
    assert cert.failure is not None
