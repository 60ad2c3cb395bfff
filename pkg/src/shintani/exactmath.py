"""Exact integer and rational linear algebra.

Matrices are plain lists of rows.  Integer matrices hold ``int`` entries and
rational matrices hold ``Fraction`` entries; every routine accepts either and
never touches floating point.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from math import gcd, lcm
from typing import Iterable, Sequence

from .errors import SingularMatrix

__all__ = [
    "identity",
    "transpose",
    "matmul",
    "matvec",
    "det",
    "bareiss_det",
    "inv_det",
    "solve",
    "rank",
    "span_coordinates",
    "hnf",
    "LatticeQuotient",
    "quotient_reps",
    "in_integer_span",
    "integer_span_solution",
    "IntegerSpan",
    "lattice_basis",
    "primitive_vector",
    "common_denominator",
]


def identity(n: int, one=1) -> list[list]:
    return [[one if i == j else 0 * one for j in range(n)] for i in range(n)]


def transpose(m: Sequence[Sequence]) -> list[list]:
    return [list(col) for col in zip(*m)]


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> list[list]:
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def matvec(a: Sequence[Sequence], v: Sequence) -> list:
    return [sum(x * y for x, y in zip(row, v)) for row in a]


def common_denominator(values: Iterable) -> int:
    d = 1
    for x in values:
        if isinstance(x, Fraction):
            d = lcm(d, x.denominator)
    return d


def bareiss_det(m: Sequence[Sequence[int]]) -> int:
    """Fraction-free determinant of a square integer matrix."""
    n = len(m)
    if n == 0:
        return 1
    a = [list(row) for row in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
        prev = akk
    return sign * a[n - 1][n - 1]


def det(m: Sequence[Sequence]):
    """Exact determinant; integer input gives an int, rational input a Fraction."""
    n = len(m)
    if any(len(row) != n for row in m):
        raise ValueError("determinant of a non-square matrix")
    d = common_denominator(x for row in m for x in row)
    if d == 1:
        return bareiss_det([[int(x) for x in row] for row in m])
    scaled = [[int(x * d) for x in row] for row in m]
    return Fraction(bareiss_det(scaled), d**n)


def _echelon(a: list[list[Fraction]]) -> list[int]:
    """In-place reduced row echelon form; returns the pivot columns."""
    rows = len(a)
    cols = len(a[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return pivots


def inv_det(m: Sequence[Sequence], need_inverse: bool = True):
    """Return ``(inverse, det)``; the inverse is ``None`` if not requested."""
    n = len(m)
    dt = det(m)
    if not need_inverse:
        return None, dt
    if dt == 0:
        raise SingularMatrix("matrix is singular")
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(m)]
    _echelon(aug)
    return [row[n:] for row in aug], dt


def solve(m: Sequence[Sequence], b: Sequence) -> list[Fraction]:
    """Unique solution of the square system ``m x = b``."""
    n = len(m)
    aug = [[Fraction(x) for x in row] + [Fraction(b[i])] for i, row in enumerate(m)]
    piv = _echelon(aug)
    if len(piv) < n or piv[-1] >= n:
        raise SingularMatrix("system is singular")
    return [aug[i][n] for i in range(n)]


def rank(m: Sequence[Sequence]) -> int:
    if not m:
        return 0
    a = [[Fraction(x) for x in row] for row in m]
    return len(_echelon(a))


def span_coordinates(cols: Sequence[Sequence], w: Sequence):
    """Coefficients c with sum_i c_i cols[i] = w, or None if w is off the span.

    The columns must be linearly independent.
    """
    r = len(cols)
    n = len(w)
    if r == 0:
        return [] if all(x == 0 for x in w) else None
    aug = [[Fraction(cols[j][i]) for j in range(r)] + [Fraction(w[i])] for i in range(n)]
    piv = _echelon(aug)
    if r in piv:
        return None
    if len(piv) < r:
        raise SingularMatrix("cone generators are dependent")
    return [aug[i][r] for i in range(r)]


def _xgcd(a: int, b: int):
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def hnf(m: Sequence[Sequence[int]]):
    """Row Hermite normal form.

    Returns ``(h, u)`` with ``h = u m``, ``u`` unimodular, pivots positive and
    entries above each pivot reduced into ``[0, pivot)``.  Zero rows sink to
    the bottom.
    """
    rows = len(m)
    cols = len(m[0]) if rows else 0
    h = [[int(x) for x in row] for row in m]
    u = identity(rows)
    r = 0
    for c in range(cols):
        if r == rows:
            break
        for i in range(r + 1, rows):
            if h[i][c] == 0:
                continue
            a, b = h[r][c], h[i][c]
            g, x, y = _xgcd(a, b)
            p, q = a // g, b // g
            hr, hi, ur, ui = h[r], h[i], u[r], u[i]
            h[r] = [x * s + y * t for s, t in zip(hr, hi)]
            h[i] = [p * t - q * s for s, t in zip(hr, hi)]
            u[r] = [x * s + y * t for s, t in zip(ur, ui)]
            u[i] = [p * t - q * s for s, t in zip(ur, ui)]
        if h[r][c] == 0:
            continue
        if h[r][c] < 0:
            h[r] = [-x for x in h[r]]
            u[r] = [-x for x in u[r]]
        piv = h[r][c]
        for i in range(r):
            f = h[i][c] // piv
            if f:
                h[i] = [s - f * t for s, t in zip(h[i], h[r])]
                u[i] = [s - f * t for s, t in zip(u[i], u[r])]
        r += 1
    return h, u


class LatticeQuotient:
    """The finite group Z^n / sigma Z^n with canonical representatives."""

    __slots__ = ("sigma", "basis", "diagonal", "reps")

    def __init__(self, sigma, basis, diagonal, reps):
        self.sigma = sigma
        self.basis = basis
        self.diagonal = diagonal
        self.reps = reps

    def __len__(self):
        return len(self.reps)

    def reduce(self, x: Sequence[int]) -> tuple[int, ...]:
        """The canonical representative congruent to ``x``."""
        x = list(x)
        for i, row in enumerate(self.basis):
            q = x[i] // self.diagonal[i]
            if q:
                x = [s - q * t for s, t in zip(x, row)]
        return tuple(x)


def quotient_reps(sigma: Sequence[Sequence[int]]) -> LatticeQuotient:
    """Enumerate Z^n / sigma Z^n, sigma acting on column vectors."""
    n = len(sigma)
    if bareiss_det([[int(x) for x in row] for row in sigma]) == 0:
        raise SingularMatrix("quotient by a singular matrix")
    h, _ = hnf(transpose(sigma))
    diag = [h[i][i] for i in range(n)]
    reps = [tuple(p) for p in product(*(range(d) for d in diag))]
    return LatticeQuotient([list(r) for r in sigma], h, diag, reps)


def integer_span_solution(v: Sequence[int], gens: Sequence[Sequence[int]]):
    """Integer coefficients expressing ``v`` through ``gens``, or None."""
    if not gens:
        return [] if all(x == 0 for x in v) else None
    h, u = hnf(gens)
    x = [int(t) for t in v]
    coeff = [0] * len(h)
    for i, row in enumerate(h):
        c = next((j for j, t in enumerate(row) if t), None)
        if c is None:
            break
        if any(x[j] for j in range(c)):
            return None
        q, rem = divmod(x[c], row[c])
        if rem:
            return None
        if q:
            x = [s - q * t for s, t in zip(x, row)]
            coeff[i] = q
    if any(x):
        return None
    return [sum(coeff[i] * u[i][j] for i in range(len(h))) for j in range(len(gens))]


def in_integer_span(v: Sequence[int], gens: Sequence[Sequence[int]]) -> bool:
    return integer_span_solution(v, gens) is not None


class IntegerSpan:
    """Incrementally built Z-span of sparse integer vectors.

    Vectors are dicts from a totally ordered key to a nonzero int.  Rows are
    kept in echelon form keyed by their leading key, each remembering how it
    was produced from the inserted generators so that membership tests can
    return a witness.
    """

    def __init__(self):
        self._rows: dict = {}

    @staticmethod
    def _axpy(a: int, x: dict, b: int, y: dict) -> dict:
        out = {}
        for k, t in x.items():
            out[k] = a * t
        for k, t in y.items():
            s = out.get(k, 0) + b * t
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return {k: t for k, t in out.items() if t}

    def add(self, vec: dict, label) -> None:
        vec = {k: t for k, t in vec.items() if t}
        expr = {label: 1}
        while vec:
            lead = min(vec)
            row = self._rows.get(lead)
            if row is None:
                self._rows[lead] = (vec, expr)
                return
            rvec, rexpr = row
            a, b = rvec[lead], vec[lead]
            if b % a == 0:
                q = b // a
                vec = self._axpy(1, vec, -q, rvec)
                expr = self._axpy(1, expr, -q, rexpr)
                continue
            g, x, y = _xgcd(a, b)
            new_row = (self._axpy(x, rvec, y, vec), self._axpy(x, rexpr, y, expr))
            p, q = a // g, b // g
            vec, expr = self._axpy(p, vec, -q, rvec), self._axpy(p, expr, -q, rexpr)
            self._rows[lead] = new_row
            # the displaced row is re-expressed through the new one
            if new_row[0][lead] < 0:
                self._rows[lead] = ({k: -t for k, t in new_row[0].items()},
                                    {k: -t for k, t in new_row[1].items()})

    def solve(self, target: dict):
        """A witness dict label -> coefficient, or None if not in the span."""
        vec = {k: t for k, t in target.items() if t}
        expr: dict = {}
        while vec:
            lead = min(vec)
            row = self._rows.get(lead)
            if row is None:
                return None
            rvec, rexpr = row
            q, rem = divmod(vec[lead], rvec[lead])
            if rem:
                return None
            vec = self._axpy(1, vec, -q, rvec)
            expr = self._axpy(1, expr, q, rexpr)
        return expr


def lattice_basis(gens: Sequence[Sequence]) -> list[list[Fraction]]:
    """A basis (as rows) of the Z-span of rational vectors ``gens``."""
    d = common_denominator(x for g in gens for x in g)
    h, _ = hnf([[int(Fraction(x) * d) for x in g] for g in gens])
    return [[Fraction(x, d) for x in row] for row in h if any(row)]


def primitive_vector(v: Sequence) -> tuple[int, ...]:
    """The primitive integer vector on the ray through a nonzero rational v."""
    d = common_denominator(v)
    ints = [int(Fraction(x) * d) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        raise ValueError("zero vector has no primitive direction")
    return tuple(x // g for x in ints)
