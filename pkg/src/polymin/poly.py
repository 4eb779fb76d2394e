"""Sparse multivariate polynomials with exact or floating coefficients.

Monomials are exponent tuples of length n. Everything in this package
shares one monomial order: graded lexicographic with x1 most significant,
i.e. monomials are sorted by total degree first and within a degree block
by descending lexicographic comparison of the exponent tuple. For n = 2:

    (0,0) (1,0) (0,1) (2,0) (1,1) (0,2) (3,0) ...

Truncated moment sequences (:class:`Tms`) are flat arrays indexed by the
rank of a monomial in that order. Coefficients may be ``int``,
``fractions.Fraction`` or ``float``; arithmetic never changes the
coefficient domain, so exact inputs give exact results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np

Monomial = tuple

__all__ = [
    "Monomial",
    "Polynomial",
    "PolyMatrix",
    "Tms",
    "grlex_rank",
    "grlex_unrank",
    "monomials_exact",
    "monomials_upto",
    "moment_index_matrix",
    "n_monomials",
    "tms_of_point",
    "variables",
]


def n_monomials(n: int, d: int) -> int:
    """Number of monomials in n variables of total degree <= d."""
    if d < 0:
        return 0
    return math.comb(n + d, n)


def grlex_rank(alpha: Monomial) -> int:
    """Rank of a monomial in the graded lex order, starting at 0."""
    n = len(alpha)
    d = sum(alpha)
    rank = n_monomials(n, d - 1)
    rem = d
    for i in range(n - 1):
        nv = n - i - 1
        for a in range(rem, alpha[i], -1):
            rank += math.comb(rem - a + nv - 1, nv - 1)
        rem -= alpha[i]
    return rank


def grlex_unrank(index: int, n: int) -> Monomial:
    """Inverse of :func:`grlex_rank`."""
    if index < 0:
        raise ValueError("index must be nonnegative")
    if n < 1:
        raise ValueError("need at least one variable")
    d = 0
    while n_monomials(n, d) <= index:
        d += 1
    pos = index - n_monomials(n, d - 1)
    alpha = []
    rem = d
    for i in range(n - 1):
        nv = n - i - 1
        for a in range(rem, -1, -1):
            cnt = math.comb(rem - a + nv - 1, nv - 1)
            if pos < cnt:
                alpha.append(a)
                rem -= a
                break
            pos -= cnt
    alpha.append(rem)
    return tuple(alpha)


def monomials_exact(n: int, d: int) -> list:
    """Monomials of exact degree d, in descending lex order."""
    if n == 1:
        return [(d,)]
    out = []
    for a in range(d, -1, -1):
        for tail in monomials_exact(n - 1, d - a):
            out.append((a,) + tail)
    return out


@lru_cache(maxsize=None)
def monomials_upto(n: int, d: int) -> tuple:
    """All monomials of degree <= d in graded lex order (cached)."""
    out = []
    for e in range(d + 1):
        out.extend(monomials_exact(n, e))
    return tuple(out)


@lru_cache(maxsize=None)
def moment_index_matrix(n: int, t: int) -> np.ndarray:
    """Matrix R with R[i, j] = grlex_rank(m_i + m_j) over the degree-t basis."""
    mons = monomials_upto(n, t)
    s = len(mons)
    out = np.empty((s, s), dtype=np.int64)
    for i, a in enumerate(mons):
        for j in range(i, s):
            b = mons[j]
            r = grlex_rank(tuple(x + y for x, y in zip(a, b)))
            out[i, j] = r
            out[j, i] = r
    out.setflags(write=False)
    return out


def _strip(terms: dict) -> dict:
    return {a: c for a, c in terms.items() if c != 0}


class Polynomial:
    """Immutable sparse polynomial, terms keyed by exponent tuple."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: dict | None = None):
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "terms", _strip(dict(terms or {})))

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    @classmethod
    def zero(cls, n: int) -> "Polynomial":
        return cls(n)

    @classmethod
    def constant(cls, n: int, c) -> "Polynomial":
        return cls(n, {(0,) * n: c})

    @classmethod
    def one(cls, n: int) -> "Polynomial":
        return cls.constant(n, 1)

    @classmethod
    def variable(cls, n: int, i: int) -> "Polynomial":
        if not 0 <= i < n:
            raise ValueError(f"variable index {i} out of range for n={n}")
        e = [0] * n
        e[i] = 1
        return cls(n, {tuple(e): 1})

    @property
    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(sum(a) for a in self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def coeff(self, alpha: Monomial):
        return self.terms.get(tuple(alpha), 0)

    def _check(self, other: "Polynomial"):
        if self.n != other.n:
            raise ValueError("polynomials live in different variable counts")

    def __add__(self, other):
        if not isinstance(other, Polynomial):
            return self + Polynomial.constant(self.n, other)
        self._check(other)
        out = dict(self.terms)
        for a, c in other.terms.items():
            out[a] = out.get(a, 0) + c
        return Polynomial(self.n, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.n, {a: -c for a, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other if isinstance(other, Polynomial) else Polynomial.constant(self.n, -other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            if other == 0:
                return Polynomial.zero(self.n)
            return Polynomial(self.n, {a: c * other for a, c in self.terms.items()})
        self._check(other)
        out: dict = {}
        for a, ca in self.terms.items():
            for b, cb in other.terms.items():
                k = tuple(x + y for x, y in zip(a, b))
                out[k] = out.get(k, 0) + ca * cb
        return Polynomial(self.n, out)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        if isinstance(scalar, Polynomial):
            raise TypeError("polynomial division is not supported")
        return self * (Fraction(1, 1) / scalar if isinstance(scalar, (int, Fraction)) else 1.0 / scalar)

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        result = Polynomial.one(self.n)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base if k > 1 else base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.n == other.n and self.terms == other.terms
        return self.terms == _strip({(0,) * self.n: other})

    def __hash__(self):
        return hash((self.n, frozenset(self.terms.items())))

    def partial(self, i: int) -> "Polynomial":
        """Partial derivative with respect to x_{i+1} (0-based index i)."""
        out = {}
        for a, c in self.terms.items():
            if a[i] == 0:
                continue
            e = list(a)
            e[i] -= 1
            out[tuple(e)] = c * a[i]
        return Polynomial(self.n, out)

    def gradient(self) -> tuple:
        return tuple(self.partial(i) for i in range(self.n))

    def eval(self, u: Sequence):
        """Evaluate at a point; exact when coefficients and u are rational."""
        total = 0
        for a, c in self.terms.items():
            v = c
            for ui, ai in zip(u, a):
                if ai:
                    v = v * ui**ai
            total = total + v
        return total

    def subs(self, polys: Sequence["Polynomial"]) -> "Polynomial":
        """Substitute x_i -> polys[i]; the polys share some new variable count."""
        if len(polys) != self.n:
            raise ValueError("need one replacement per variable")
        m = polys[0].n
        pow_cache: list[dict] = [{0: Polynomial.one(m)} for _ in range(self.n)]
        out = Polynomial.zero(m)
        for a, c in self.terms.items():
            term = Polynomial.constant(m, c)
            for i, ai in enumerate(a):
                if not ai:
                    continue
                cache = pow_cache[i]
                if ai not in cache:
                    cache[ai] = polys[i] ** ai
                term = term * cache[ai]
            out = out + term
        return out

    def map_coeffs(self, fn: Callable) -> "Polynomial":
        return Polynomial(self.n, {a: fn(c) for a, c in self.terms.items()})

    def to_float(self) -> "Polynomial":
        return self.map_coeffs(float)

    def to_fraction(self) -> "Polynomial":
        return self.map_coeffs(Fraction)

    def coeff_array(self, max_degree: int) -> np.ndarray:
        """Dense float coefficient vector over the graded lex basis."""
        if self.degree > max_degree:
            raise ValueError("polynomial degree exceeds requested basis")
        out = np.zeros(n_monomials(self.n, max_degree))
        for a, c in self.terms.items():
            out[grlex_rank(a)] = float(c)
        return out

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for a in sorted(self.terms, key=grlex_rank):
            c = self.terms[a]
            mono = "*".join(
                f"x{i + 1}" + (f"^{e}" if e > 1 else "")
                for i, e in enumerate(a)
                if e
            )
            if not mono:
                parts.append(f"{c}")
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append(f"-{mono}")
            else:
                parts.append(f"{c}*{mono}")
        s = " + ".join(parts)
        return s.replace("+ -", "- ")


def variables(n: int) -> tuple:
    """The coordinate polynomials x1..xn."""
    return tuple(Polynomial.variable(n, i) for i in range(n))


class PolyMatrix:
    """Dense matrix of polynomials sharing one variable count."""

    __slots__ = ("n", "rows", "cols", "entries")

    def __init__(self, n: int, entries: Sequence[Sequence[Polynomial]]):
        rows = len(entries)
        cols = len(entries[0]) if rows else 0
        flat = []
        for r in entries:
            if len(r) != cols:
                raise ValueError("ragged rows")
            for p in r:
                if not isinstance(p, Polynomial) or p.n != n:
                    raise ValueError("entries must be polynomials in n variables")
            flat.append(tuple(r))
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "entries", tuple(flat))

    def __setattr__(self, name, value):
        raise AttributeError("PolyMatrix is immutable")

    @classmethod
    def zeros(cls, n: int, rows: int, cols: int) -> "PolyMatrix":
        z = Polynomial.zero(n)
        return cls(n, [[z] * cols for _ in range(rows)])

    @classmethod
    def identity(cls, n: int, size: int) -> "PolyMatrix":
        one = Polynomial.one(n)
        z = Polynomial.zero(n)
        return cls(n, [[one if i == j else z for j in range(size)] for i in range(size)])

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Polynomial]]) -> "PolyMatrix":
        return cls(rows[0][0].n, rows)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def row(self, i: int) -> tuple:
        return self.entries[i]

    def __matmul__(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.cols != other.rows or self.n != other.n:
            raise ValueError("shape or variable mismatch")
        out = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                acc = Polynomial.zero(self.n)
                for k in range(self.cols):
                    a = self.entries[i][k]
                    b = other.entries[k][j]
                    if a.terms and b.terms:
                        acc = acc + a * b
                row.append(acc)
            out.append(row)
        return PolyMatrix(self.n, out)

    def __add__(self, other: "PolyMatrix") -> "PolyMatrix":
        if (self.rows, self.cols, self.n) != (other.rows, other.cols, other.n):
            raise ValueError("shape or variable mismatch")
        return PolyMatrix(
            self.n,
            [
                [self.entries[i][j] + other.entries[i][j] for j in range(self.cols)]
                for i in range(self.rows)
            ],
        )

    def scale(self, c) -> "PolyMatrix":
        return self.map_entries(lambda p: p * c)

    def map_entries(self, fn: Callable) -> "PolyMatrix":
        return PolyMatrix(
            self.n,
            [[fn(self.entries[i][j]) for j in range(self.cols)] for i in range(self.rows)],
        )

    def transpose(self) -> "PolyMatrix":
        return PolyMatrix(
            self.n,
            [[self.entries[i][j] for i in range(self.rows)] for j in range(self.cols)],
        )

    @property
    def degree(self) -> int:
        return max((p.degree for row in self.entries for p in row), default=-1)

    def is_identity(self) -> bool:
        """Exact coefficient-level identity check."""
        if self.rows != self.cols:
            return False
        one = Polynomial.one(self.n)
        for i in range(self.rows):
            for j in range(self.cols):
                want = one if i == j else Polynomial.zero(self.n)
                if self.entries[i][j] != want:
                    return False
        return True

    def eval(self, u: Sequence) -> np.ndarray:
        return np.array(
            [[float(self.entries[i][j].eval(u)) for j in range(self.cols)] for i in range(self.rows)]
        )

    def __eq__(self, other):
        return (
            isinstance(other, PolyMatrix)
            and self.n == other.n
            and self.entries == other.entries
        )

    def __hash__(self):
        return hash((self.n, self.entries))

    def __repr__(self):
        body = "\n".join("  [" + ", ".join(map(str, row)) + "]" for row in self.entries)
        return f"PolyMatrix {self.rows}x{self.cols} in {self.n} vars\n{body}"


@dataclass(frozen=True)
class Tms:
    """Truncated moment sequence: values indexed by graded lex rank."""

    n: int
    order: int
    values: np.ndarray

    def __post_init__(self):
        want = n_monomials(self.n, self.order)
        if len(self.values) != want:
            raise ValueError(f"expected {want} moments for order {self.order}, got {len(self.values)}")

    def moment_matrix(self, t: int) -> np.ndarray:
        """Dense M_t(y); needs 2t <= order."""
        if 2 * t > self.order:
            raise ValueError("moment matrix order exceeds available moments")
        idx = moment_index_matrix(self.n, t)
        return np.asarray(self.values)[idx]

    def value(self, alpha: Monomial):
        return self.values[grlex_rank(alpha)]

    def expectation(self, p: Polynomial):
        """<p, y>: apply the Riesz functional to p."""
        return sum(float(c) * self.values[grlex_rank(a)] for a, c in p.terms.items())


def tms_of_point(u: Sequence, order: int) -> Tms:
    """Moment vector of the Dirac measure at u, up to the given degree."""
    u = np.asarray(u, dtype=float)
    n = len(u)
    vals = np.empty(n_monomials(n, order))
    for r, a in enumerate(monomials_upto(n, order)):
        v = 1.0
        for ui, ai in zip(u, a):
            if ai:
                v *= ui**ai
        vals[r] = v
    return Tms(n, order, vals)
