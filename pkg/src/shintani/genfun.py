"""Cone generating functions and the Shintani coefficient operator.

``MultiSeries`` is a power series in n variables truncated by total degree.
``HdElement`` is a quotient ``numerator / prod(forms)`` of such a series by
linear forms; the forms are stored unexpanded and normalized to primitive
integer vectors, so quotients with the same poles can be added directly.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations_with_replacement
from math import factorial, lcm
from typing import Iterable, Sequence

from .conegeom import Cone, ConeCombo, parallelepiped_points
from .errors import InsufficientTruncation, NotDense
from .exactmath import primitive_vector

__all__ = [
    "MultiSeries",
    "HdElement",
    "HdSum",
    "ConeGenFun",
    "bernoulli_numbers",
    "genfun_g",
    "genfun_h",
    "solomon_hu",
    "substitute_linear",
    "delta_kj",
    "delta_k",
    "delta_P",
    "prk_coeffs",
    "reciprocity_coeff",
    "polynomial_power",
    "default_truncation",
]

_ZERO = Fraction(0)


def _exps_of_degree(n: int, d: int):
    for c in combinations_with_replacement(range(n), d):
        e = [0] * n
        for i in c:
            e[i] += 1
        yield tuple(e)


def _mfact(r: Sequence[int]) -> int:
    out = 1
    for x in r:
        out *= factorial(x)
    return out


class MultiSeries:
    """Truncated power series: exponent tuple -> Fraction, total degree <= trunc."""

    __slots__ = ("nvars", "trunc", "coeffs")

    def __init__(self, nvars: int, trunc: int, coeffs: dict | None = None):
        self.nvars = nvars
        self.trunc = trunc
        self.coeffs = {}
        for e, c in (coeffs or {}).items():
            if c and sum(e) <= trunc:
                self.coeffs[tuple(e)] = Fraction(c)

    # -- constructors ------------------------------------------------------
    @classmethod
    def constant(cls, nvars, trunc, c=1):
        return cls(nvars, trunc, {(0,) * nvars: c})

    @classmethod
    def linear(cls, coeffs: Sequence, trunc: int):
        n = len(coeffs)
        return cls(n, trunc, {tuple(int(i == j) for j in range(n)): c
                              for i, c in enumerate(coeffs)})

    @classmethod
    def power_of_linear(cls, coeffs: Sequence, series_coeffs: Sequence, trunc: int):
        """sum_m series_coeffs[m] * L^m for the linear form L."""
        n = len(coeffs)
        out = MultiSeries(n, trunc)
        power = MultiSeries.constant(n, trunc)
        lin = MultiSeries.linear(coeffs, trunc)
        for m, c in enumerate(series_coeffs[: trunc + 1]):
            if m:
                power = power * lin
            if c:
                out = out + power.scale(c)
        return out

    @classmethod
    def exp_linear(cls, coeffs: Sequence, trunc: int):
        return cls.power_of_linear(coeffs, [Fraction(1, factorial(m)) for m in range(trunc + 1)],
                                   trunc)

    # -- arithmetic --------------------------------------------------------
    def _check(self, other):
        if self.nvars != other.nvars:
            raise ValueError("series in different numbers of variables")

    def __add__(self, other: "MultiSeries") -> "MultiSeries":
        self._check(other)
        t = min(self.trunc, other.trunc)
        out = {e: c for e, c in self.coeffs.items() if sum(e) <= t}
        for e, c in other.coeffs.items():
            if sum(e) <= t:
                s = out.get(e, _ZERO) + c
                if s:
                    out[e] = s
                else:
                    out.pop(e, None)
        res = MultiSeries(self.nvars, t)
        res.coeffs = out
        return res

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "MultiSeries":
        c = Fraction(c)
        res = MultiSeries(self.nvars, self.trunc)
        if c:
            res.coeffs = {e: x * c for e, x in self.coeffs.items()}
        return res

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        self._check(other)
        t = min(self.trunc, other.trunc)
        a = sorted(((sum(e), e, c) for e, c in self.coeffs.items()), key=lambda x: x[0])
        b = sorted(((sum(e), e, c) for e, c in other.coeffs.items()), key=lambda x: x[0])
        out: dict = {}
        for da, ea, ca in a:
            if da > t:
                break
            room = t - da
            for db, eb, cb in b:
                if db > room:
                    break
                e = tuple(x + y for x, y in zip(ea, eb))
                out[e] = out.get(e, _ZERO) + ca * cb
        res = MultiSeries(self.nvars, t)
        res.coeffs = {e: c for e, c in out.items() if c}
        return res

    __rmul__ = __mul__

    def truncate(self, t: int) -> "MultiSeries":
        return MultiSeries(self.nvars, min(t, self.trunc), self.coeffs)

    def constant_term(self) -> Fraction:
        return self.coeffs.get((0,) * self.nvars, _ZERO)

    def inverse(self) -> "MultiSeries":
        c0 = self.constant_term()
        if not c0:
            raise ZeroDivisionError("series is not a unit")
        g = self.scale(1 / c0) - MultiSeries.constant(self.nvars, self.trunc)
        out = MultiSeries.constant(self.nvars, self.trunc)
        power = MultiSeries.constant(self.nvars, self.trunc)
        neg = -g
        for _ in range(self.trunc):
            power = power * neg
            if not power.coeffs:
                break
            out = out + power
        return out.scale(1 / c0)

    def coefficient(self, e: Sequence[int]) -> Fraction:
        return self.coeffs.get(tuple(e), _ZERO)

    def homogeneous_part(self, d: int) -> dict:
        return {e: c for e, c in self.coeffs.items() if sum(e) == d}

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other):
        return isinstance(other, MultiSeries) and self.nvars == other.nvars \
            and self.trunc == other.trunc and self.coeffs == other.coeffs

    def __repr__(self):
        items = sorted(self.coeffs.items(), key=lambda x: (sum(x[0]), x[0]))
        body = " + ".join("%s*z^%s" % (c, e) for e, c in items[:8])
        more = " + ..." if len(items) > 8 else ""
        return "MultiSeries(n=%d, T=%d: %s%s)" % (self.nvars, self.trunc, body or "0", more)

    def substitute(self, m: Sequence[Sequence]) -> "MultiSeries":
        """The series z -> z m^t, i.e. z_i replaced by sum_j m_ij z_j."""
        n, t = self.nvars, self.trunc
        lins = [MultiSeries.linear(row, t) for row in m]
        powers = [[MultiSeries.constant(n, t)] for _ in range(n)]
        out = MultiSeries(n, t)
        for e, c in self.coeffs.items():
            term = MultiSeries.constant(n, t, c)
            for i, k in enumerate(e):
                while len(powers[i]) <= k:
                    powers[i].append(powers[i][-1] * lins[i])
                if k:
                    term = term * powers[i][k]
            out = out + term
        return out


def polynomial_power(poly: dict, k: int, nvars: int) -> dict:
    """k-th power of a polynomial stored as exponent -> coefficient."""
    out = {(0,) * nvars: Fraction(1)}
    for _ in range(k):
        nxt: dict = {}
        for e1, c1 in out.items():
            for e2, c2 in poly.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                nxt[e] = nxt.get(e, _ZERO) + c1 * c2
        out = {e: c for e, c in nxt.items() if c}
    return out


def _poly_substitute(poly: dict, m: Sequence[Sequence]) -> dict:
    """poly(z m^t): x_i replaced by sum_j m_ij z_j, exactly."""
    n = len(m)
    lin = [{tuple(int(i == j) for i in range(n)): Fraction(c) for j, c in enumerate(row) if c}
           for row in m]
    out: dict = {}
    for e, c in poly.items():
        term = {(0,) * n: Fraction(c)}
        for i, k in enumerate(e):
            if k:
                p = polynomial_power(lin[i], k, n)
                nxt: dict = {}
                for e1, c1 in term.items():
                    for e2, c2 in p.items():
                        ee = tuple(a + b for a, b in zip(e1, e2))
                        nxt[ee] = nxt.get(ee, _ZERO) + c1 * c2
                term = nxt
        for e1, c1 in term.items():
            out[e1] = out.get(e1, _ZERO) + c1
    return {e: c for e, c in out.items() if c}


def _canonical_form(coeffs: Sequence):
    """(primitive integer form, scalar) with coeffs = scalar * form."""
    prim = primitive_vector(coeffs)
    lead = next(x for x in prim if x)
    if lead < 0:
        prim = tuple(-x for x in prim)
    i = next(i for i, x in enumerate(prim) if x)
    return prim, Fraction(coeffs[i]) / prim[i]


class HdElement:
    """numerator / prod(forms) with forms primitive integer linear forms."""

    __slots__ = ("numerator", "forms")

    def __init__(self, numerator: MultiSeries, forms: Iterable[Sequence] = ()):
        scale = Fraction(1)
        canon = []
        for f in forms:
            p, s = _canonical_form(f)
            canon.append(p)
            scale *= s
        canon.sort()
        self.numerator = numerator if scale == 1 else numerator.scale(1 / scale)
        self.forms = tuple(canon)

    @property
    def nvars(self):
        return self.numerator.nvars

    @property
    def trunc(self):
        return self.numerator.trunc

    def __repr__(self):
        return "HdElement(%r / %s)" % (self.numerator, list(self.forms))

    def scale(self, c) -> "HdElement":
        out = HdElement.__new__(HdElement)
        out.numerator = self.numerator.scale(c)
        out.forms = self.forms
        return out

    def is_dense(self) -> bool:
        return all(all(c for c in f) for f in self.forms)

    def over(self, forms: Sequence) -> MultiSeries:
        """Numerator with respect to the larger multiset of forms ``forms``."""
        missing = list(forms)
        for f in self.forms:
            missing.remove(f)
        num = self.numerator
        for f in missing:
            num = num * MultiSeries.linear(f, num.trunc)
        return num


class HdSum:
    """A finite sum of HdElements (kept unsimplified for the Shintani operator)."""

    def __init__(self, terms: Iterable[HdElement] = ()):
        self.terms = [t for t in terms if not t.numerator.is_zero()]

    def __add__(self, other):
        if isinstance(other, HdElement):
            other = HdSum([other])
        return HdSum(self.terms + other.terms)

    def scale(self, c) -> "HdSum":
        return HdSum([t.scale(c) for t in self.terms])

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def common_forms(self) -> list:
        need: dict = {}
        for t in self.terms:
            counts: dict = {}
            for f in t.forms:
                counts[f] = counts.get(f, 0) + 1
            for f, k in counts.items():
                need[f] = max(need.get(f, 0), k)
        out = []
        for f in sorted(need):
            out.extend([f] * need[f])
        return out

    def combined(self, nvars: int | None = None, trunc: int | None = None) -> HdElement:
        """The sum over a common denominator."""
        forms = self.common_forms()
        if not self.terms:
            return HdElement(MultiSeries(nvars or 1, trunc or 0), ())
        num = None
        for t in self.terms:
            part = t.over(forms)
            num = part if num is None else num + part
        out = HdElement.__new__(HdElement)
        out.numerator = num
        out.forms = tuple(forms)
        return out

    def is_zero(self) -> bool:
        """True when the sum vanishes to the available truncation."""
        if not self.terms:
            return True
        return self.combined().numerator.is_zero()


# -- Bernoulli numbers for the unit series ------------------------------------

_BERN_CACHE = [Fraction(1)]


def bernoulli_numbers(m: int) -> list[Fraction]:
    """b_0..b_m with b_1 = -1/2 (t/(e^t-1) = sum b_k t^k/k!)."""
    while len(_BERN_CACHE) <= m:
        k = len(_BERN_CACHE)
        s = sum(Fraction(factorial(k + 1), factorial(j) * factorial(k + 1 - j)) * _BERN_CACHE[j]
                for j in range(k))
        _BERN_CACHE.append(-s / (k + 1))
    return _BERN_CACHE[: m + 1]


def _inverse_unit_series(coeffs: Sequence, trunc: int) -> MultiSeries:
    """L/(1 - e^L) = -sum b_m L^m/m! as a series in z."""
    b = bernoulli_numbers(trunc)
    return MultiSeries.power_of_linear(coeffs, [-b[m] / factorial(m) for m in range(trunc + 1)],
                                       trunc)


class ConeGenFun:
    """sum_a x^a / prod(1 - x^sigma_i) with integer exponent vectors."""

    __slots__ = ("numerator_exponents", "denominator_exponents")

    def __init__(self, numerator_exponents, denominator_exponents):
        self.numerator_exponents = sorted(tuple(a) for a in numerator_exponents)
        self.denominator_exponents = [tuple(s) for s in denominator_exponents]

    def __repr__(self):
        return "ConeGenFun(%s / %s)" % (self.numerator_exponents, self.denominator_exponents)

    def evaluate(self, x: Sequence):
        """Exact value at a rational point where the denominator is nonzero."""
        def mono(e):
            out = Fraction(1)
            for xi, k in zip(x, e):
                out *= Fraction(xi) ** k
            return out
        num = sum((mono(a) for a in self.numerator_exponents), Fraction(0))
        den = Fraction(1)
        for s in self.denominator_exponents:
            den *= 1 - mono(s)
        return num / den


def genfun_g(cone: Cone, v: Sequence) -> ConeGenFun:
    """Exponents of g(C, v): points of P - v on the lattice, over the generators."""
    cols = [list(g) for g in cone.gens]
    pts = parallelepiped_points(cols, range(len(cols)), v)
    v = [Fraction(x) for x in v]
    nums = [tuple(int(a - b) for a, b in zip(p, v)) for p in pts]
    return ConeGenFun(nums, cone.gens)


def _transform(vec: Sequence, m: Sequence[Sequence] | None):
    """m^t vec (the coefficient vector of vec . (z m^t))."""
    if m is None:
        return [Fraction(x) for x in vec]
    n = len(vec)
    return [sum(Fraction(m[i][j]) * vec[i] for i in range(n)) for j in range(len(m[0]))]


def _exp_sum(points: Sequence[Sequence[Fraction]], n: int, trunc: int) -> MultiSeries:
    """sum_a e^{a.z}: the z^e coefficient is (sum_a a^e) / e!."""
    out = MultiSeries(n, trunc)
    if not points:
        return out
    # clear denominators so the power sums run over integers
    den = lcm(*(x.denominator for a in points for x in a))
    ints = [[int(x * den) for x in a] for a in points]
    sums = {(0,) * n: [1] * len(ints)}
    frontier = [(0,) * n]
    coeffs = {(0,) * n: Fraction(len(ints))}
    for deg in range(1, trunc + 1):
        nxt = []
        for e in frontier:
            vals = sums[e]
            # extend e only in variables at or after its last nonzero slot
            last = max((i for i in range(n) if e[i]), default=0)
            for i in range(last, n):
                f = e[:i] + (e[i] + 1,) + e[i + 1:]
                fv = [x * a[i] for x, a in zip(vals, ints)]
                sums[f] = fv
                nxt.append(f)
                t = sum(fv)
                if t:
                    fact = 1
                    for k in f:
                        fact *= factorial(k)
                    coeffs[f] = Fraction(t, fact * den**deg)
        frontier = nxt
    out.coeffs = coeffs
    return out


def genfun_h(cone: Cone, v: Sequence, trunc: int, m: Sequence[Sequence] | None = None,
             check_dense: bool = False) -> HdElement:
    """h(C, v)(z m^t) = sum_a e^{a.z m^t} / prod(1 - e^{sigma_i . z m^t})."""
    cols = [list(g) for g in cone.gens]
    n = cone.dim
    pts = parallelepiped_points(cols, range(len(cols)), v)
    forms = [_transform(c, m) for c in cols]
    if check_dense and not all(all(x for x in f) for f in forms):
        raise NotDense("transformed denominator form has a zero coefficient")
    num = _exp_sum([_transform(a, m) for a in pts], n, trunc)
    for f in forms:
        # 1 - e^L = L * g with g a unit; 1/g = L/(1 - e^L)
        num = num * _inverse_unit_series(f, trunc)
    return HdElement(num, forms)


def solomon_hu(combo: ConeCombo, v: Sequence, trunc: int,
               m: Sequence[Sequence] | None = None) -> HdSum:
    out = HdSum()
    for cone, k in sorted(combo.terms.items(), key=lambda x: (x[0].gens, x[1])):
        out = out + genfun_h(cone, v, trunc, m).scale(k)
    return out


def substitute_linear(e: HdElement, m: Sequence[Sequence]) -> HdElement:
    """Replace z by z m^t throughout; every new form must be dense."""
    forms = [_transform(f, m) for f in e.forms]
    for f in forms:
        if not all(f):
            raise NotDense("substituted form %s is not dense" % ([str(x) for x in f],))
    return HdElement(e.numerator.substitute(m), forms)


def default_truncation(n: int, k: int, d: int) -> int:
    return n * (k + 1) + d + 2


def delta_kj(e: HdElement, j: int, k: int) -> Fraction:
    """Coefficient of z_j^{nk} prod_{i != j} z_i^k in e(Z_j); j is 0-based."""
    n = e.nvars
    d = len(e.forms)
    need = n * k + d
    if e.trunc < need:
        raise InsufficientTruncation("truncation %d below the required %d" % (e.trunc, need))
    others = [i for i in range(n) if i != j]
    tt = (n - 1) * k
    # prod of 1 / (l_j + sum_{i != j} l_i z_i), a series free of z_j
    inv = MultiSeries.constant(n, tt)
    for f in e.forms:
        if f[j] == 0:
            raise NotDense("form %s vanishes on the variable z_%d" % (list(f), j + 1))
        coeffs = [Fraction(0) if i == j else Fraction(f[i], f[j]) for i in range(n)]
        geo = MultiSeries.power_of_linear(coeffs, [(-1) ** m for m in range(tt + 1)], tt)
        inv = inv * geo.scale(Fraction(1, f[j]))
    total = Fraction(0)
    for mexp, c in e.numerator.homogeneous_part(need).items():
        rest = []
        ok = True
        for i in range(n):
            if i == j:
                rest.append(0)
                continue
            if mexp[i] > k:
                ok = False
                break
            rest.append(k - mexp[i])
        if ok:
            total += c * inv.coefficient(rest)
    return total


def delta_k(e, k: int) -> Fraction:
    """(k!)^n / n * sum_j delta_kj; linear over HdSum terms."""
    if isinstance(e, HdSum):
        return sum((delta_k(t, k) for t in e.terms), Fraction(0))
    n = e.nvars
    s = sum((delta_kj(e, j, k) for j in range(n)), Fraction(0))
    return Fraction(factorial(k) ** n, n) * s


def delta_P(s: MultiSeries, P: dict) -> Fraction:
    """sum_r F_r P_r(1) with P(z) = sum_r P_r(1) z^r / r!."""
    total = Fraction(0)
    for r, c in P.items():
        f = s.coefficient(r)
        if f:
            total += f * c * _mfact(r)
    return total


def prk_coeffs(fM: dict, sigma: Sequence[Sequence], k: int) -> dict:
    """P_r^k(sigma) = r! * coefficient of z^r in f_M(z sigma^t)^k."""
    n = len(sigma)
    sub = _poly_substitute(fM, sigma)
    powered = polynomial_power(sub, k, n)
    return {r: c * _mfact(r) for r, c in powered.items() if c}


def reciprocity_coeff(m: Sequence[Sequence], r: Sequence[int], s: Sequence[int]) -> Fraction:
    """C_{r,s}(m) = s! * coefficient of z^s in (z m)^r."""
    n = len(m)
    # (z m)_i = sum_j z_j m_ji
    poly = {(0,) * n: Fraction(1)}
    for i, ri in enumerate(r):
        lin = {tuple(int(a == j) for a in range(n)): Fraction(m[j][i]) for j in range(n) if m[j][i]}
        p = polynomial_power(lin, ri, n)
        nxt: dict = {}
        for e1, c1 in poly.items():
            for e2, c2 in p.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                nxt[e] = nxt.get(e, _ZERO) + c1 * c2
        poly = nxt
    return poly.get(tuple(s), _ZERO) * _mfact(s)
