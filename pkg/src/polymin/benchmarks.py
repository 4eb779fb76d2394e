"""Benchmark problems with known optima for exercising the full pipeline.

Each entry bundles the problem, the orders worth running, and reference
data: the known minimum, the minimizer set when it is finite, the first
order at which the tightened relaxation reaches the minimum, and the
order at which flat truncation is expected to certify. Reference points
quoted to four decimals are kept at that precision.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .lme import ConstraintTuple, Problem
from .poly import Polynomial, monomials_upto, variables

__all__ = ["Benchmark", "REGISTRY", "get", "names"]


@dataclass(frozen=True)
class Benchmark:
    name: str
    problem: Problem
    orders: tuple
    fmin: Optional[float]
    value_tol: float
    exact_order: Optional[int]
    mode_order: int
    minimizers: tuple = ()
    certify_order: Optional[int] = None
    separation_order: Optional[int] = None
    preordering_cap: int = 12
    note: str = ""


def _ineqs(n: int, polys) -> ConstraintTuple:
    polys = tuple(polys)
    return ConstraintTuple(n, polys, (), tuple(range(len(polys))))


def ex61() -> Benchmark:
    """Bilinear objective on the standard simplex; minimizers form a curve."""
    x1, x2, x3 = variables(3)
    f = x1 * x2 * (10 - x3)
    c = _ineqs(3, (x1, x2, x3, 1 - x1 - x2 - x3))
    return Benchmark(
        name="ex61",
        problem=Problem(f, c),
        orders=(2, 3, 4),
        fmin=0.0,
        value_tol=1e-4,
        exact_order=3,
        mode_order=2,
        note="infinitely many minimizers (x1*x2 = 0 on the simplex)",
    )


def ex62() -> Benchmark:
    """Motzkin form plus a quartic, outside the unit ball."""
    x1, x2, x3 = variables(3)
    motzkin = x1**4 * x2**2 + x1**2 * x2**4 + x3**6 - 3 * x1**2 * x2**2 * x3**2
    f = motzkin + x1**4 + x2**4 + x3**4
    c = _ineqs(3, (x1**2 + x2**2 + x3**2 - 1,))
    s = 1.0 / math.sqrt(3.0)
    pts = tuple(itertools.product((s, -s), repeat=3))
    return Benchmark(
        name="ex62",
        problem=Problem(f, c),
        orders=(3, 4, 5),
        fmin=1.0 / 3.0,
        value_tol=1e-3,
        exact_order=4,
        mode_order=4,
        minimizers=pts,
        certify_order=7,
        separation_order=4,
    )


def ex63() -> Benchmark:
    """Cubic-quartic mix over a product of two triangles."""
    x1, x2, x3, x4 = variables(4)
    f = (
        x1 * x2 + x2 * x3 + x3 * x4 - 3 * x1 * x2 * x3 * x4
        + x1**3 + x2**3 + x3**3 + x4**3
    )
    c = _ineqs(4, (x1, x2, x3, x4, 1 - x1 - x2, 1 - x3 - x4))
    return Benchmark(
        name="ex63",
        problem=Problem(f, c),
        orders=(3, 4),
        fmin=0.0,
        value_tol=1e-4,
        exact_order=3,
        mode_order=3,
        minimizers=((0.0, 0.0, 0.0, 0.0),),
        note="unique minimizer at the origin",
    )


def ex64() -> Benchmark:
    """Weighted circle objective with three quadratic constraints."""
    x1, x2 = variables(2)
    f = x1**2 + 50 * x2**2
    c = _ineqs(
        2,
        (
            x1**2 - 0.5,
            x2**2 - 2 * x1 * x2 - 0.125,
            x2**2 + 2 * x1 * x2 - 0.125,
        ),
    )
    r = math.sqrt(0.5)
    q = math.sqrt(5.0 / 8.0) + math.sqrt(0.5)
    pts = tuple((s1 * r, s2 * q) for s1 in (1, -1) for s2 in (1, -1))
    return Benchmark(
        name="ex64",
        problem=Problem(f, c),
        orders=(3, 4, 5, 6, 7),
        fmin=56.75 + 25.0 * math.sqrt(5.0),
        value_tol=1e-2,
        exact_order=4,
        mode_order=4,
        minimizers=pts,
        certify_order=6,
        separation_order=4,
    )


def ex65() -> Benchmark:
    """Robinson-type form over a nonconvex set with bilinear constraints."""
    x1, x2, x3 = variables(3)
    f = (
        x1**3 + x2**3 + x3**3 + 4 * x1 * x2 * x3
        - (x1 * (x2**2 + x3**2) + x2 * (x3**2 + x1**2) + x3 * (x1**2 + x2**2))
    )
    c = _ineqs(3, (x1, x1 * x2 - 1, x2 * x3 - 1))
    return Benchmark(
        name="ex65",
        problem=Problem(f, c),
        orders=(2, 3, 4),
        fmin=0.9492,
        value_tol=1e-3,
        exact_order=3,
        mode_order=3,
        minimizers=((0.9071, 1.1024, 0.9071),),
        certify_order=4,
        separation_order=3,
    )


def ex66() -> Benchmark:
    """Symmetric quartic over the four sign hypercube complements."""
    xs = variables(4)
    x1, x2, x3, x4 = xs
    one = Polynomial.one(4)
    pts5 = (one, x1, x2, x3, x4)
    f = Polynomial.zero(4)
    for i in range(5):
        term = Polynomial.one(4)
        for j in range(5):
            if j != i:
                term = term * (pts5[i] - pts5[j])
        f = f + term
    f = f + x1**2 + x2**2 + x3**2 + x4**2
    c = _ineqs(4, tuple(xi**2 - 1 for xi in xs))
    mins = [(1.0, 1.0, 1.0, 1.0)]
    for signs in itertools.product((1.0, -1.0), repeat=4):
        neg = signs.count(-1.0)
        if neg in (2, 3):
            mins.append(signs)
    return Benchmark(
        name="ex66",
        problem=Problem(f, c),
        orders=(3, 4, 5),
        fmin=4.0,
        value_tol=1e-3,
        exact_order=4,
        mode_order=3,
        minimizers=tuple(mins),
        certify_order=6,
        separation_order=4,
    )


def ex67() -> Benchmark:
    """Rotated Motzkin-like sextic with a triangular constraint pair."""
    x1, x2, x3 = variables(3)
    f = (
        x1**4 * x2**2 + x2**4 * x3**2 + x3**4 * x1**2
        - 3 * x1**2 * x2**2 * x3**2 + x2**2
    )
    c = _ineqs(3, (x1 - x2 * x3, -x2 + x3**2))
    return Benchmark(
        name="ex67",
        problem=Problem(f, c),
        orders=(4, 5, 6),
        fmin=0.0,
        value_tol=1e-4,
        exact_order=5,
        mode_order=4,
        note="minimizers (x1, 0, x3) with x1 >= 0, x1*x3 = 0",
    )


def ex68() -> Benchmark:
    """Coercive quartic with two affine ordering constraints."""
    x1, x2, x3, x4 = variables(4)
    f = (
        x1**2 * (x1 - x4) ** 2
        + x2**2 * (x2 - x4) ** 2
        + x3**2 * (x3 - x4) ** 2
        + 2 * x1 * x2 * x3 * (x1 + x2 + x3 - x4)
        + (x1 - 1) ** 2
        + (x2 - 1) ** 2
        + (x3 - 1) ** 2
    )
    c = _ineqs(4, (x1 - x2, x2 - x3))
    return Benchmark(
        name="ex68",
        problem=Problem(f, c),
        orders=(2, 3, 4),
        fmin=0.9413,
        value_tol=1e-3,
        exact_order=3,
        mode_order=3,
        minimizers=((0.5632, 0.5632, 0.5632, 0.7510),),
        certify_order=3,
        separation_order=3,
    )


def ex69() -> Benchmark:
    """Dehomogenized Horn form over the unit box."""
    xs = variables(4)
    x1, x2, x3, x4 = xs
    f = (x1 + x2 + x3 + x4 + 1) ** 2 - 4 * (x1 * x2 + x2 * x3 + x3 * x4 + x4 + x1)
    c = _ineqs(4, tuple(xs) + tuple(1 - xi for xi in xs))
    return Benchmark(
        name="ex69",
        problem=Problem(f, c),
        orders=(2, 3),
        fmin=0.0,
        value_tol=1e-3,
        exact_order=2,
        mode_order=2,
        preordering_cap=16,
        note="minimizers (t, 0, 0, 1-t) for t in [0, 1]",
    )


def ex610(n: int = 3, seed: int = 0) -> Benchmark:
    """Random cubic objective over the unit box; reference-free instance."""
    rng = np.random.default_rng(seed)
    xs = variables(n)
    f = Polynomial.zero(n)
    for a in monomials_upto(n, 3):
        f = f + Polynomial(n, {a: float(rng.standard_normal())})
    c = _ineqs(n, tuple(xs) + tuple(1 - xi for xi in xs))
    return Benchmark(
        name="ex610",
        problem=Problem(f, c),
        orders=(2,),
        fmin=None,
        value_tol=1e-5,
        exact_order=None,
        mode_order=2,
        note="both relaxation modes are expected tight at order 2",
    )


REGISTRY: dict = {
    "ex61": ex61,
    "ex62": ex62,
    "ex63": ex63,
    "ex64": ex64,
    "ex65": ex65,
    "ex66": ex66,
    "ex67": ex67,
    "ex68": ex68,
    "ex69": ex69,
    "ex610": ex610,
}


def names() -> tuple:
    return tuple(REGISTRY)


def get(name: str) -> Benchmark:
    try:
        builder = REGISTRY[name]
    except KeyError:
        raise KeyError(f"unknown benchmark: {name}") from None
    return builder()
