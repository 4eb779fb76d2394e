"""Moment relaxations, plain and tightened.

The order-k relaxation of min f over c_E = 0, c_I >= 0 optimizes the Riesz
functional <f, y> over truncated moment sequences y of degree 2k subject
to <1, y> = 1, the moment matrix M_k(y) being PSD, localizing matrices of
equality constraints vanishing and localizing matrices of inequality
constraints being PSD.

Tight mode appends the critical-point conditions induced by multiplier
expressions p: phi = (grad f - sum_i p_i grad c_i, (p_j c_j)_{j in I})
as equalities and psi = (p_j)_{j in I} as inequalities. Preordering mode
further replaces the inequality side by all products of subsets of
(c_I, psi), pruned to degree <= 2k.

A localizing matrix for q has rows and columns indexed by monomials alpha
with 2|alpha| + deg q <= 2k and entries sum_gamma q_gamma y_{gamma+alpha+beta};
when 2k < deg q the matrix is empty and the constraint is recorded as
omitted rather than raising.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .lme import ConstraintTuple
from .poly import Polynomial, grlex_rank, monomials_upto, n_monomials

__all__ = [
    "RelaxationMode",
    "KktTuples",
    "PsdBlockSpec",
    "ConicProgram",
    "MinOrder",
    "build_kkt_tuples",
    "localizing_structure",
    "min_order",
    "assemble",
]


class RelaxationMode(Enum):
    STANDARD = "standard"
    TIGHT = "tight"
    PREORDERING = "preordering"


@dataclass(frozen=True)
class KktTuples:
    """Critical-point conditions: phi must vanish, psi must be nonnegative."""

    phi: tuple
    psi: tuple


@dataclass
class PsdBlockSpec:
    """One PSD block: entry (i, j), i <= j, maps moment index to coefficient."""

    label: str
    size: int
    entries: dict


@dataclass
class ConicProgram:
    """min objective . y  s.t.  eq rows hold and every block is PSD."""

    n: int
    order: int
    num_y: int
    objective: np.ndarray
    eq_rows: list
    eq_rhs: list
    blocks: list
    meta: dict = field(default_factory=dict)


@dataclass(frozen=True)
class MinOrder:
    k: int
    d: int


def build_kkt_tuples(f: Polynomial, c: ConstraintTuple, p: Sequence[Polynomial]) -> KktTuples:
    """phi and psi from multiplier expressions p (one per constraint)."""
    if len(p) != c.m:
        raise ValueError("need one multiplier expression per constraint")
    n = f.n
    grad = f.gradient()
    phi = []
    for i in range(n):
        acc = grad[i]
        for j in range(c.m):
            acc = acc - p[j] * c.polys[j].partial(i)
        phi.append(acc)
    for j in c.ineq:
        phi.append(p[j] * c.polys[j])
    psi = tuple(p[j] for j in c.ineq)
    return KktTuples(tuple(phi), psi)


def localizing_structure(q: Polynomial, k: int) -> Optional[PsdBlockSpec]:
    """Entry map of the order-k localizing matrix of q; None when empty."""
    if q.is_zero():
        return None
    n = q.n
    r = k - math.ceil(q.degree / 2)
    if r < 0:
        return None
    mons = monomials_upto(n, r)
    qf = [(a, float(cc)) for a, cc in q.terms.items()]
    entries = {}
    for i, a in enumerate(mons):
        for j in range(i, len(mons)):
            b = mons[j]
            ab = tuple(u + v for u, v in zip(a, b))
            cell = {}
            for g, cc in qf:
                cell[grlex_rank(tuple(u + v for u, v in zip(ab, g)))] = cc
            entries[(i, j)] = cell
    return PsdBlockSpec("", len(mons), entries)


def _flatten_rows(q: Polynomial, k: int):
    """Distinct linear functionals of a vanishing localizing matrix."""
    n = q.n
    r = k - math.ceil(q.degree / 2)
    if r < 0:
        return None
    qf = [(a, float(cc)) for a, cc in q.terms.items()]
    rows = []
    for gamma in monomials_upto(n, 2 * r):
        row = {}
        for g, cc in qf:
            row[grlex_rank(tuple(u + v for u, v in zip(gamma, g)))] = cc
        rows.append(row)
    return rows


def min_order(f: Polynomial, c: ConstraintTuple, kkt: Optional[KktTuples] = None) -> MinOrder:
    """Smallest usable relaxation order and the rank-shift degree d.

    d is half the largest constraint degree, rounded up, over the
    constraints plus (when given) phi and psi; flat truncation compares
    rank M_t with rank M_{t-d}.
    """
    degs = [p.degree for p in c.polys]
    if kkt is not None:
        degs += [p.degree for p in kkt.phi if not p.is_zero()]
        degs += [p.degree for p in kkt.psi if not p.is_zero()]
    d = max(1, math.ceil(max(degs, default=2) / 2))
    k = max(1, math.ceil(f.degree / 2), d)
    return MinOrder(k, d)


def assemble(
    f: Polynomial,
    c: ConstraintTuple,
    kkt: Optional[KktTuples],
    k: int,
    mode: RelaxationMode = RelaxationMode.TIGHT,
    preordering_cap: int = 12,
) -> ConicProgram:
    """Build the order-k relaxation as an explicit conic program.

    Moment variables are indexed by graded lex rank up to degree 2k. Block
    order: moment matrix first, then inequality localizers in tuple order,
    then psi localizers (or the subset products in preordering mode).
    Constraints whose localizing matrix is empty at this order are dropped
    and listed in meta["omitted"].
    """
    n = f.n
    if f.degree > 2 * k:
        raise ValueError(f"order {k} too small: objective has degree {f.degree}")
    if mode is not RelaxationMode.STANDARD and kkt is None:
        raise ValueError(f"{mode.value} mode needs kkt tuples")
    num_y = n_monomials(n, 2 * k)
    objective = np.zeros(num_y)
    for a, cc in f.terms.items():
        objective[grlex_rank(a)] += float(cc)

    omitted = []
    eq_rows: list = []
    eq_rhs: list = []
    seen = set()

    def add_eq(row: dict, rhs: float):
        sig = (tuple(sorted(row.items())), rhs)
        if sig in seen:
            return
        seen.add(sig)
        eq_rows.append(row)
        eq_rhs.append(rhs)

    add_eq({0: 1.0}, 1.0)

    def add_vanishing(q: Polynomial, label: str):
        if q.is_zero():
            return
        rows = _flatten_rows(q, k)
        if rows is None:
            omitted.append(label)
            return
        for row in rows:
            add_eq(row, 0.0)

    for pos, j in enumerate(c.eq):
        add_vanishing(c.polys[j].to_float(), f"c{j + 1}")
    if mode is not RelaxationMode.STANDARD:
        for i, q in enumerate(kkt.phi):
            add_vanishing(q.to_float(), f"phi{i + 1}")

    blocks = []
    moment = localizing_structure(Polynomial.one(n), k)
    moment.label = "moment"
    blocks.append(moment)

    def add_psd(q: Polynomial, label: str):
        if q.is_zero():
            return
        spec = localizing_structure(q.to_float(), k)
        if spec is None:
            omitted.append(label)
            return
        spec.label = label
        blocks.append(spec)

    if mode is RelaxationMode.PREORDERING:
        gens = [(f"c{j + 1}", c.polys[j].to_float()) for j in c.ineq]
        gens += [(f"psi{i + 1}", q.to_float()) for i, q in enumerate(kkt.psi) if not q.is_zero()]
        if len(gens) > preordering_cap:
            raise ValueError(
                f"preordering over {len(gens)} generators exceeds cap {preordering_cap}; "
                "raise preordering_cap to override"
            )
        stack = [(0, Polynomial.one(n), "")]
        products = []
        while stack:
            idx, prod, name = stack.pop()
            if idx == len(gens):
                if name:
                    products.append((name[1:], prod))
                continue
            stack.append((idx + 1, prod, name))
            label, g = gens[idx]
            nxt = prod * g
            if nxt.degree <= 2 * k:
                stack.append((idx + 1, nxt, name + "*" + label))
        products.sort(key=lambda t: t[0])
        for name, prod in products:
            add_psd(prod, name)
    else:
        for j in c.ineq:
            add_psd(c.polys[j], f"c{j + 1}")
        if mode is RelaxationMode.TIGHT:
            for i, q in enumerate(kkt.psi):
                add_psd(q, f"psi{i + 1}")

    meta = {"mode": mode.value, "k": k, "omitted": omitted}
    return ConicProgram(n, k, num_y, objective, eq_rows, eq_rhs, blocks, meta)
