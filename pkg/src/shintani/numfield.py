"""Totally real number fields with exact sign decisions.

A field is given by a monic irreducible integer polynomial all of whose roots
are real.  Elements are coordinate vectors in the power basis of a root
``theta``; the ``j``-th real embedding (``j = 1..n``) sends ``theta`` to the
``j``-th smallest root.  Signs of embedded elements are decided exactly by
evaluating on rational isolating intervals that are refined by bisection on
demand.

Ideals and other full-rank Z-lattices in the field are ``FieldLattice``
objects holding a Z-basis.  The ring of integers is assumed to be the
equation order Z[theta]; this holds for every built-in fixture.
"""

from __future__ import annotations

import os
import threading
from fractions import Fraction
from itertools import permutations, product
from math import floor
from typing import Iterable, Sequence

import mpmath

from .errors import PrecisionCap, SchemaError, SearchExhausted, SingularMatrix
from .exactmath import (
    LatticeQuotient,
    det,
    hnf,
    inv_det,
    lattice_basis,
    matmul,
    quotient_reps,
    solve,
    transpose,
)

__all__ = [
    "TotallyRealField",
    "FieldElem",
    "EmbeddedVector",
    "UnitSystem",
    "FieldLattice",
    "quadratic_field",
    "field_discriminant",
    "degree_one_primes",
    "squarefree_part",
    "fundamental_unit_quadratic",
    "trace_dual_basis",
    "coords_in_basis",
    "rho_w",
    "units_congruent_one",
    "regulator_sign",
    "sign_det_embeddings",
    "adapted_basis",
    "permutation_sign",
]

# bits of interval precision before giving up on a sign; overridable from the environment
DEFAULT_PRECISION_CAP = int(os.environ.get("SHINTANI_PRECISION_CAP", "4096"))


# -- polynomial helpers (ascending coefficient lists) -------------------------

def _trim(p):
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def _peval(p, x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def _prem(a, b):
    """Remainder of a by b over the rationals."""
    a = [Fraction(x) for x in a]
    db = len(b) - 1
    lead = Fraction(b[-1])
    while len(a) - 1 >= db and a:
        f = a[-1] / lead
        shift = len(a) - 1 - db
        for i, c in enumerate(b):
            a[shift + i] -= f * c
        a = _trim(a)
    return a


def _sturm_chain(p):
    chain = [[Fraction(c) for c in p]]
    d = [Fraction(i * c) for i, c in enumerate(p)][1:]
    chain.append(d)
    while True:
        r = _prem(chain[-2], chain[-1])
        if not r:
            break
        chain.append([-c for c in r])
    return chain


def _sign_changes(chain, x) -> int:
    signs = []
    for p in chain:
        v = _peval(p, x)
        if v:
            signs.append(v > 0)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _interval_eval(p, lo, hi):
    """Enclosure of p over [lo, hi] by interval Horner."""
    a = b = Fraction(0)
    for c in reversed(p):
        cands = (a * lo, a * hi, b * lo, b * hi)
        a, b = min(cands) + c, max(cands) + c
    return a, b


class TotallyRealField:
    """A totally real field Q(theta) of degree n."""

    def __init__(self, minpoly: Sequence[int], name: str | None = None):
        coeffs = [int(c) for c in minpoly]
        if any(Fraction(c) != int(c) for c in minpoly):
            raise SchemaError("minimal polynomial must have integer coefficients")
        coeffs = _trim(coeffs)
        if len(coeffs) < 2 or coeffs[-1] != 1:
            raise SchemaError("minimal polynomial must be monic of degree >= 1")
        self.minpoly = tuple(coeffs)
        self.n = len(coeffs) - 1
        self.name = name
        if not _is_irreducible(coeffs):
            raise SchemaError("irreducibility check failed: minimal polynomial %s "
                              "factors over the rationals" % (list(coeffs),))
        self._lock = threading.Lock()
        self._intervals = self._isolate()
        if len(self._intervals) != self.n:
            raise SchemaError("field is not totally real: %d of %d roots are real"
                              % (len(self._intervals), self.n))
        n = self.n
        # theta^k reduced to the power basis, for k < 2n - 1
        red = []
        for k in range(2 * n - 1):
            if k < n:
                red.append(tuple(Fraction(int(i == k)) for i in range(n)))
            else:
                prev = red[-1]
                top = prev[-1]
                shifted = (Fraction(0),) + prev[:-1]
                red.append(tuple(s - top * c for s, c in zip(shifted, coeffs[:-1])))
        self._reduction = red

    def __repr__(self):
        return "TotallyRealField(%s)" % (list(self.minpoly),)

    def __eq__(self, other):
        return isinstance(other, TotallyRealField) and self.minpoly == other.minpoly

    def __hash__(self):
        return hash(self.minpoly)

    # -- root isolation ------------------------------------------------------
    def _isolate(self):
        p = self.minpoly
        if self.n == 1:
            r = Fraction(-p[0])
            return [(r, r)]
        bound = 1 + max(abs(Fraction(c)) for c in p[:-1])
        chain = _sturm_chain(p)
        out = []
        stack = [(-bound, bound)]
        while stack:
            lo, hi = stack.pop()
            count = _sign_changes(chain, lo) - _sign_changes(chain, hi)
            if count == 0:
                continue
            if count == 1:
                out.append((lo, hi))
                continue
            mid = (lo + hi) / 2
            stack.append((lo, mid))
            stack.append((mid, hi))
        out.sort()
        return out

    def root_interval(self, j: int):
        """Current isolating interval (lo, hi] of the j-th root, j = 1..n."""
        return self._intervals[j - 1]

    def refine(self, j: int, width: Fraction | None = None):
        """Halve the j-th isolating interval (or refine below ``width``)."""
        p = self.minpoly
        with self._lock:
            lo, hi = self._intervals[j - 1]
            if lo == hi:
                return lo, hi
            target = width if width is not None else (hi - lo) / 2
            flo = _peval(p, lo)
            while hi - lo > target:
                mid = (lo + hi) / 2
                fm = _peval(p, mid)
                if fm == 0:
                    lo = hi = mid
                    break
                if (fm > 0) == (flo > 0):
                    lo, flo = mid, fm
                else:
                    hi = mid
            self._intervals[j - 1] = (lo, hi)
            return lo, hi

    def root_approx(self, j: int, bits: int = 80):
        lo, hi = self.refine(j, Fraction(1, 2**bits))
        with mpmath.workprec(bits + 20):
            return mpmath.mpf(lo.numerator) / lo.denominator

    # -- elements ------------------------------------------------------------
    def elem(self, coords: Iterable) -> "FieldElem":
        c = tuple(Fraction(x) for x in coords)
        if len(c) != self.n:
            raise ValueError("expected %d coordinates" % self.n)
        return FieldElem(self, c)

    def scalar(self, x) -> "FieldElem":
        return FieldElem(self, (Fraction(x),) + (Fraction(0),) * (self.n - 1))

    def one(self) -> "FieldElem":
        return self.scalar(1)

    def zero(self) -> "FieldElem":
        return self.scalar(0)

    def theta(self) -> "FieldElem":
        if self.n == 1:
            return self.scalar(-self.minpoly[0])
        return self.elem([int(i == 1) for i in range(self.n)])

    def power_basis(self) -> list["FieldElem"]:
        return [self.elem([int(i == k) for i in range(self.n)]) for k in range(self.n)]

    def _mul_coords(self, a, b):
        n = self.n
        prod = [Fraction(0)] * (2 * n - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        prod[i + j] += x * y
        out = [Fraction(0)] * n
        for k, c in enumerate(prod):
            if c:
                for i, r in enumerate(self._reduction[k]):
                    if r:
                        out[i] += c * r
        return tuple(out)


def _is_irreducible(coeffs) -> bool:
    import sympy

    x = sympy.Symbol("x")
    poly = sympy.Poly(list(reversed(coeffs)), x, domain="QQ")
    return poly.degree() >= 1 and poly.is_irreducible


class FieldElem:
    """An element of a TotallyRealField in power-basis coordinates."""

    __slots__ = ("field", "coords", "_hash")

    def __init__(self, field: TotallyRealField, coords: tuple):
        self.field = field
        self.coords = coords
        self._hash = None

    def _coerce(self, other):
        if isinstance(other, FieldElem):
            return other
        if isinstance(other, (int, Fraction)):
            return self.field.scalar(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return FieldElem(self.field, tuple(a + b for a, b in zip(self.coords, other.coords)))

    __radd__ = __add__

    def __neg__(self):
        return FieldElem(self.field, tuple(-a for a in self.coords))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return FieldElem(self.field, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return FieldElem(self.field, tuple(a * other for a in self.coords))
        if not isinstance(other, FieldElem):
            return NotImplemented
        return FieldElem(self.field, self.field._mul_coords(self.coords, other.coords))

    __rmul__ = __mul__

    def inverse(self) -> "FieldElem":
        if not any(self.coords):
            raise ZeroDivisionError("inverse of zero")
        n = self.field.n
        sol = solve(self.mult_matrix(), [int(i == 0) for i in range(n)])
        return FieldElem(self.field, tuple(sol))

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return FieldElem(self.field, tuple(a / other for a in self.coords))
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = self.field.one()
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.field.scalar(other)
        if not isinstance(other, FieldElem):
            return NotImplemented
        return self.field == other.field and self.coords == other.coords

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.coords)
        return self._hash

    def __repr__(self):
        terms = []
        for i, c in enumerate(self.coords):
            if c:
                terms.append("%s%s" % (c, "" if i == 0 else "*t" if i == 1 else "*t^%d" % i))
        return "FieldElem(%s)" % (" + ".join(terms) or "0")

    def is_zero(self) -> bool:
        return not any(self.coords)

    def mult_matrix(self) -> list[list[Fraction]]:
        """Matrix of multiplication by self; column k holds self * theta^k."""
        cols = [self.field._mul_coords(self.coords, b.coords) for b in self.field.power_basis()]
        return transpose(cols)

    def trace(self) -> Fraction:
        m = self.mult_matrix()
        return sum((m[i][i] for i in range(self.field.n)), Fraction(0))

    def norm(self) -> Fraction:
        return Fraction(det(self.mult_matrix()))

    def embedding_interval(self, j: int):
        lo, hi = self.field.root_interval(j)
        return _interval_eval(self.coords, lo, hi)

    def sign_at(self, j: int) -> int:
        """Exact sign of the j-th real embedding (j = 1..n)."""
        if not any(self.coords):
            return 0
        field = self.field
        while True:
            lo, hi = field.root_interval(j)
            if lo == hi:
                v = _peval(self.coords, lo)
                return (v > 0) - (v < 0)
            a, b = _interval_eval(self.coords, lo, hi)
            if a > 0:
                return 1
            if b < 0:
                return -1
            field.refine(j)

    def is_totally_positive(self) -> bool:
        return all(self.sign_at(j) > 0 for j in range(1, self.field.n + 1))

    def embed(self, j: int, bits: int = 80):
        """Approximate J_j(self) as an mpmath number (not used for decisions)."""
        r = self.field.root_approx(j, bits)
        with mpmath.workprec(bits + 20):
            acc = mpmath.mpf(0)
            for c in reversed(self.coords):
                acc = acc * r + mpmath.mpf(c.numerator) / c.denominator
            return acc


class EmbeddedVector:
    """The real vector (J_j(e_1), ..., J_j(e_n)) for field elements e_i."""

    __slots__ = ("field", "embedding_index", "elems")

    def __init__(self, field: TotallyRealField, embedding_index: int, elems: Sequence[FieldElem]):
        self.field = field
        self.embedding_index = embedding_index
        self.elems = tuple(elems)

    def __len__(self):
        return len(self.elems)

    def combination(self, coeffs: Sequence) -> FieldElem:
        acc = self.field.zero()
        for c, e in zip(coeffs, self.elems):
            if c:
                acc = acc + e * Fraction(c)
        return acc

    def transform(self, m: Sequence[Sequence]) -> "EmbeddedVector":
        return EmbeddedVector(self.field, self.embedding_index,
                              [self.combination(row) for row in m])

    def signs(self) -> list[int]:
        return [e.sign_at(self.embedding_index) for e in self.elems]


# -- bases, duals, regular representation ------------------------------------

def _basis_matrix(w: Sequence[FieldElem]):
    return transpose([e.coords for e in w])


def coords_in_basis(x: FieldElem, w: Sequence[FieldElem]) -> list[Fraction]:
    return solve(_basis_matrix(w), x.coords)


def trace_dual_basis(w: Sequence[FieldElem]) -> list[FieldElem]:
    n = len(w)
    gram = [[(w[i] * w[j]).trace() for j in range(n)] for i in range(n)]
    try:
        ginv, _ = inv_det(gram)
    except SingularMatrix:
        raise SingularMatrix("elements do not form a basis of the field") from None
    field = w[0].field
    out = []
    for j in range(n):
        acc = field.zero()
        for k in range(n):
            if ginv[k][j]:
                acc = acc + w[k] * ginv[k][j]
        out.append(acc)
    return out


def rho_w(u: FieldElem, w: Sequence[FieldElem]) -> list[list[Fraction]]:
    """Matrix with (w_1 u, ..., w_n u) = (w_1, ..., w_n) rho_w(u)."""
    b = _basis_matrix(w)
    binv, d = inv_det(b)
    cols = [[sum(binv[i][k] * c for k, c in enumerate((wj * u).coords)) for i in range(len(w))]
            for wj in w]
    return transpose(cols)


def permutation_sign(perm: Sequence[int]) -> int:
    s = 1
    p = list(perm)
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            s = -s
    return s


def _interval_det(entries):
    """Rational interval enclosure of a determinant by Leibniz expansion."""
    n = len(entries)
    lo_total = hi_total = Fraction(0)
    for perm in permutations(range(n)):
        lo = hi = Fraction(permutation_sign(perm))
        for i, j in enumerate(perm):
            a, b = entries[i][j]
            cands = (lo * a, lo * b, hi * a, hi * b)
            lo, hi = min(cands), max(cands)
        lo_total += lo
        hi_total += hi
    return lo_total, hi_total


def sign_det_embeddings(w: Sequence[FieldElem], max_steps: int = 4096) -> int:
    """Exact sign of det J(w) where J(w)_{ij} = J_i(w_j)."""
    field = w[0].field
    n = field.n
    if det(_basis_matrix(w)) == 0:
        return 0
    for _ in range(max_steps):
        entries = [[w[j].embedding_interval(i + 1) for j in range(n)] for i in range(n)]
        lo, hi = _interval_det(entries)
        if lo > 0:
            return 1
        if hi < 0:
            return -1
        for i in range(1, n + 1):
            field.refine(i)
    raise PrecisionCap("could not decide the sign of det J(w)")


# -- units -------------------------------------------------------------------

class UnitSystem:
    """Totally positive independent units, optionally tied to a conductor."""

    __slots__ = ("field", "units", "conductor")

    def __init__(self, units: Sequence[FieldElem], conductor: "FieldLattice | None" = None,
                 check: bool = True):
        units = list(units)
        if not units:
            raise ValueError("a unit system needs at least one unit")
        self.field = units[0].field
        self.units = tuple(units)
        self.conductor = conductor
        if check:
            if len(units) != self.field.n - 1:
                raise ValueError("need exactly n-1 units")
            for u in units:
                if abs(u.norm()) != 1:
                    raise ValueError("%r is not a unit" % (u,))
                if not u.is_totally_positive():
                    raise ValueError("%r is not totally positive" % (u,))

    def __iter__(self):
        return iter(self.units)

    def __len__(self):
        return len(self.units)


def squarefree_part(d: int) -> int:
    out, p = 1, 2
    while p * p <= d:
        while d % (p * p) == 0:
            d //= p * p
        if d % p == 0:
            out *= p
            d //= p
        p += 1
    return out * d


def quadratic_field(d: int) -> TotallyRealField:
    """Q(sqrt d) with Z[theta] the maximal order; d may be any integer > 1.

    A fundamental discriminant such as 8 or 12 gives the same field as its
    squarefree part.
    """
    if d <= 1:
        raise ValueError("d must exceed 1")
    d = squarefree_part(d)
    if d == 1:
        raise ValueError("d must not be a square")
    if d % 4 == 1:
        return TotallyRealField([-(d - 1) // 4, -1, 1], name="Q(sqrt %d)" % d)
    return TotallyRealField([-d, 0, 1], name="Q(sqrt %d)" % d)


def field_discriminant(d: int) -> int:
    d = squarefree_part(d)
    return d if d % 4 == 1 else 4 * d


def _floor_at(x: FieldElem, j: int) -> int:
    m = int(mpmath.floor(x.embed(j, 64)))
    while (x - m).sign_at(j) < 0:
        m -= 1
    while (x - (m + 1)).sign_at(j) >= 0:
        m += 1
    return m


def fundamental_unit_quadratic(field_or_d, max_steps: int = 100000) -> FieldElem:
    """Smallest totally positive unit > 1 of a real quadratic field.

    The fundamental unit is read off as the product of the complete quotients
    over one period of the continued fraction of the generator.
    """
    field = quadratic_field(field_or_d) if isinstance(field_or_d, int) else field_or_d
    if field.n != 2:
        raise ValueError("field is not quadratic")
    alpha = field.theta()
    seen: dict = {}
    quotients = []
    for _ in range(max_steps):
        if alpha.coords in seen:
            start = seen[alpha.coords]
            break
        seen[alpha.coords] = len(quotients)
        quotients.append(alpha)
        a = _floor_at(alpha, 2)
        alpha = (alpha - a).inverse()
    else:
        raise SearchExhausted("continued fraction period not found")
    eps = field.one()
    for q in quotients[start:]:
        eps = eps * q
    if abs(eps.norm()) != 1:
        raise ArithmeticError("continued fraction did not produce a unit")
    if eps.sign_at(2) < 0:
        eps = -eps
    if (eps - 1).sign_at(2) < 0:
        eps = eps.inverse()
    if eps.norm() == -1:
        eps = eps * eps
    return eps


# -- lattices ----------------------------------------------------------------

class FieldLattice:
    """A full-rank Z-lattice in the field, stored by a Z-basis in HNF order."""

    __slots__ = ("field", "basis", "_matrix", "_inverse")

    def __init__(self, field: TotallyRealField, basis: Sequence[FieldElem], reduce: bool = True):
        self.field = field
        if reduce:
            rows = lattice_basis([e.coords for e in basis])
            if len(rows) != field.n:
                raise ValueError("lattice is not of full rank")
            basis = [field.elem(r) for r in rows]
        self.basis = tuple(basis)
        self._matrix = _basis_matrix(self.basis)
        self._inverse, d = inv_det(self._matrix)

    @classmethod
    def from_matrix(cls, field, columns: Sequence[Sequence]) -> "FieldLattice":
        """Lattice spanned by the given coordinate vectors."""
        return cls(field, [field.elem(c) for c in columns])

    @classmethod
    def principal(cls, x: FieldElem) -> "FieldLattice":
        """The principal ideal x Z[theta]."""
        return cls(x.field, [x * b for b in x.field.power_basis()])

    @classmethod
    def ring(cls, field) -> "FieldLattice":
        return cls(field, field.power_basis())

    def coords(self, x: FieldElem) -> list[Fraction]:
        return [sum(r * c for r, c in zip(row, x.coords)) for row in self._inverse]

    def __contains__(self, x: FieldElem) -> bool:
        return all(c.denominator == 1 for c in self.coords(x))

    def contains_lattice(self, other: "FieldLattice") -> bool:
        return all(b in self for b in other.basis)

    def __eq__(self, other):
        return isinstance(other, FieldLattice) and self.contains_lattice(other) \
            and other.contains_lattice(self)

    def __hash__(self):
        return hash(tuple(e.coords for e in self.basis))

    def volume(self) -> Fraction:
        """|det| of the basis in power-basis coordinates (norm for ideals)."""
        return abs(Fraction(det(self._matrix)))

    def __mul__(self, other: "FieldLattice") -> "FieldLattice":
        return FieldLattice(self.field, [a * b for a in self.basis for b in other.basis])

    def scale(self, x: FieldElem) -> "FieldLattice":
        return FieldLattice(self.field, [x * b for b in self.basis])

    def colon(self, other: "FieldLattice") -> "FieldLattice":
        """The lattice {x : x * other is contained in self}."""
        n = self.field.n
        duals = []
        for a in other.basis:
            ma_inv, _ = inv_det(a.mult_matrix())
            b = matmul(ma_inv, self._matrix)
            bt_inv, _ = inv_det(transpose(b))
            duals.extend(transpose(bt_inv))
        s_rows = lattice_basis(duals)
        # the dual of the row span of s_rows is spanned by the columns of s_rows^{-1}
        inter, _ = inv_det(s_rows)
        return FieldLattice(self.field, [self.field.elem([inter[i][j] for i in range(n)])
                                         for j in range(n)])

    def quotient(self) -> LatticeQuotient:
        """Z[theta] / self for an integral lattice, on power-basis coordinates."""
        m = [[int(x) for x in row] for row in self._matrix]
        return quotient_reps(m)


def degree_one_primes(field: TotallyRealField, ell: int) -> list[FieldLattice]:
    """The primes (ell, theta - r) of norm ell, one per root r of the minimal polynomial mod ell."""
    n = field.n
    out = []
    for r in range(ell):
        if sum(c * r**i for i, c in enumerate(field.minpoly)) % ell == 0:
            t = field.theta() - r
            out.append(FieldLattice(field, [field.scalar(ell)] + [t * b for b in field.power_basis()]))
    return [p for p in out if p.volume() == ell and n >= 1]


def units_congruent_one(units: UnitSystem, f: FieldLattice, bound: int | None = None) -> UnitSystem:
    """Basis of the subgroup of <units> congruent to 1 modulo the ideal f.

    For a single unit this is the least power congruent to 1.  In general the
    kernel of Z^{n-1} -> (O/f)^x is computed exactly and its HNF basis is
    turned back into units.
    """
    field = units.field
    quot = f.quotient()
    size = len(quot)
    bound = size if bound is None else bound
    one = quot.reduce([int(i == 0) for i in range(field.n)])

    def red(x: FieldElem):
        if any(c.denominator != 1 for c in x.coords):
            raise ValueError("unit is not integral in the power basis")
        return quot.reduce([int(c) for c in x.coords])

    def mul(a, b):
        return red(field.elem(a) * field.elem(b))

    residues = [red(u) for u in units]
    orders = []
    for r in residues:
        acc = r
        m = 1
        while acc != one:
            acc = mul(acc, r)
            m += 1
            if m > bound:
                raise SearchExhausted("no power of the unit is congruent to 1 mod f")
        orders.append(m)
    k = len(residues)
    gens = [[orders[i] if i == j else 0 for j in range(k)] for i in range(k)]
    if k > 1:
        powers = []
        for r, m in zip(residues, orders):
            p = [one]
            for _ in range(m - 1):
                p.append(mul(p[-1], r))
            powers.append(p)
        for exps in product(*(range(m) for m in orders)):
            acc = one
            for i, e in enumerate(exps):
                acc = mul(acc, powers[i][e])
            if acc == one and any(exps):
                gens.append(list(exps))
    h, _ = hnf(gens)
    new_units = []
    for row in h[:k]:
        x = field.one()
        for u, e in zip(units, row):
            if e:
                x = x * u**e
        new_units.append(x)
    return UnitSystem(new_units, conductor=f, check=False)


def regulator_sign(units: UnitSystem, cap_bits: int = DEFAULT_PRECISION_CAP) -> int:
    """Sign of det(log J_j(eps_i)) for i, j = 1..n-1."""
    field = units.field
    m = len(units.units)
    if m == 0:
        return 1
    bits = 64
    iv = mpmath.iv
    while bits <= cap_bits:
        width = Fraction(1, 2**bits)
        for j in range(1, m + 1):
            field.refine(j, width)
        old = iv.prec
        iv.prec = bits + 32
        try:
            rows = []
            for u in units.units:
                row = []
                for j in range(1, m + 1):
                    a, b = u.embedding_interval(j)
                    lo = iv.mpf(a.numerator) / a.denominator
                    hi = iv.mpf(b.numerator) / b.denominator
                    row.append(iv.log(iv.mpf([lo.a, hi.b])))
                rows.append(row)
            total = iv.mpf(0)
            for perm in permutations(range(m)):
                term = iv.mpf(permutation_sign(perm))
                for i, j in enumerate(perm):
                    term = term * rows[i][j]
                total = total + term
        finally:
            iv.prec = old
        if total.a > 0:
            return 1
        if total.b < 0:
            return -1
        bits *= 2
    raise PrecisionCap("regulator sign undecided at %d bits" % cap_bits)


def adapted_basis(lattice: FieldLattice, superlattice: FieldLattice, ell: int,
                  twist: Sequence[Sequence[int]] | None = None) -> list[FieldElem]:
    """Basis w of ``lattice`` with (w_1/ell, w_2, ..., w_n) a basis of ``superlattice``.

    ``superlattice`` must contain ``lattice`` with index ell.  An optional
    ``twist`` in Gamma_0(ell) (lower-left entries divisible by ell, det +-1)
    produces a different basis with the same property.
    """
    n = lattice.field.n
    t = [[superlattice.coords(b)[i] for b in lattice.basis] for i in range(n)]
    if any(x.denominator != 1 for row in t for x in row):
        raise ValueError("lattice is not contained in the superlattice")
    t = [[int(x) for x in row] for row in t]
    dt = det(t)
    if abs(dt) != ell:
        raise ValueError("index is %d, expected %d" % (abs(dt), ell))
    tinv, _ = inv_det(t)
    adj = [[int(x * dt) for x in row] for row in tinv]
    c = next(row for row in adj if any(x % ell for x in row))
    i0 = next(i for i, x in enumerate(c) if x % ell)
    ci_inv = pow(c[i0], -1, ell)
    vecs = [[int(r == i0) for r in range(n)]]
    for j in range(n):
        if j == i0:
            continue
        s = (c[j] * ci_inv) % ell
        vecs.append([int(r == j) - (s if r == i0 else 0) for r in range(n)])
    sup = superlattice.basis
    w = []
    for idx, v in enumerate(vecs):
        e = lattice.field.zero()
        for coef, b in zip(v, sup):
            if coef:
                e = e + b * coef
        w.append(e * ell if idx == 0 else e)
    if twist is not None:
        g = twist
        if abs(det(g)) != 1 or any(g[r][0] % ell for r in range(1, n)):
            raise ValueError("twist must be unimodular with ell | g[r][0] for r > 0")
        w = [sum((w[r] * g[r][c] for r in range(n)), lattice.field.zero()) for c in range(n)]
    return w
