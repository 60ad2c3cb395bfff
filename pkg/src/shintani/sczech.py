"""The combinatorial side of the comparison with Sczech's cocycle.

Symbols are tuples of pairs (a, b) meaning "column b of A_a"; a symbol sum
is a formal integer combination.  The cocycle relation of the rational
function f kills the image of the boundary map, and the coboundary h makes
beta - alpha a boundary modulo that image.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from typing import Iterable, Mapping, Sequence

from .errors import NotDense, PoleHit
from .exactmath import IntegerSpan, det, transpose
from .genfun import HdElement, MultiSeries

__all__ = [
    "f_eval",
    "SymbolSum",
    "alpha",
    "beta",
    "h_map",
    "dh_map",
    "boundary",
    "boundary_image_membership",
    "verify_coboundary",
    "polar_value",
]


def f_eval(taus: Sequence[Sequence], x: Sequence) -> Fraction:
    """det(tau_1, ..., tau_n) / (<x, tau_1> ... <x, tau_n>)."""
    taus = [[Fraction(t) for t in tau] for tau in taus]
    x = [Fraction(t) for t in x]
    den = Fraction(1)
    for tau in taus:
        p = sum(a * b for a, b in zip(x, tau))
        if p == 0:
            raise PoleHit("<x, tau> vanishes")
        den *= p
    return Fraction(det(transpose(taus))) / den


class SymbolSum:
    """A finite integer combination of symbols ((a_1, b_1), ..., (a_n, b_n))."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping | Iterable = ()):
        self.terms: dict = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for sym, c in items:
            self._add(tuple(tuple(p) for p in sym), c)

    def _add(self, sym, c):
        c = self.terms.get(sym, 0) + c
        if c:
            self.terms[sym] = c
        else:
            self.terms.pop(sym, None)

    @classmethod
    def symbol(cls, *pairs) -> "SymbolSum":
        return cls([(tuple(pairs), 1)])

    def __add__(self, other: "SymbolSum") -> "SymbolSum":
        out = SymbolSum(self.terms)
        for s, c in other.terms.items():
            out._add(s, c)
        return out

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c: int) -> "SymbolSum":
        return SymbolSum({s: c * t for s, t in self.terms.items()} if c else {})

    def __eq__(self, other):
        return isinstance(other, SymbolSum) and self.terms == other.terms

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join("%d*%s" % (c, list(s)) for s, c in sorted(self.terms.items()))

    def map_first(self, fn) -> "SymbolSum":
        """Apply fn to every first index a."""
        return SymbolSum([(tuple((fn(a), b) for a, b in s), c) for s, c in self.terms.items()])

    def pairs(self) -> set:
        return {p for s in self.terms for p in s}

    def evaluate(self, A: Sequence[Sequence[Sequence]], x: Sequence) -> Fraction:
        """sum c f(tau(A, t))(x), with A_a the a-th matrix (1-based a, b)."""
        total = Fraction(0)
        for s, c in self.terms.items():
            taus = [[row[b - 1] for row in A[a - 1]] for a, b in s]
            total += c * f_eval(taus, x)
        return total


def alpha(w: Sequence[int]) -> SymbolSum:
    return SymbolSum.symbol(*((i + 1, 1) for i in range(len(w))))


def beta(w: Sequence[int]) -> SymbolSum:
    return SymbolSum.symbol(*((i + 1, wi) for i, wi in enumerate(w)))


def _h_i(w: Sequence[int], i: int) -> SymbolSum:
    n = len(w) + 1
    if w[i - 1] == 1:
        return SymbolSum()
    pairs = [(j, w[j - 1]) for j in range(1, i)]
    pairs += [(i, 1), (i, w[i - 1])]
    pairs += [(j, 1) for j in range(i + 1, n)]
    return SymbolSum.symbol(*pairs)


def h_map(w: Sequence[int]) -> SymbolSum:
    """h(w) = sum_i (-1)^i h_i(w) for w in S^{n-1}."""
    out = SymbolSum()
    for i in range(1, len(w) + 1):
        out = out + _h_i(w, i).scale((-1) ** i)
    return out


def dh_map(w: Sequence[int]) -> SymbolSum:
    """(dh)(w) = sum_i (-1)^i (e_i x id)(h(w without w_i))."""
    n = len(w)
    out = SymbolSum()
    for i in range(1, n + 1):
        sub = list(w[:i - 1]) + list(w[i:])
        img = h_map(sub).map_first(lambda a, i=i: a if a < i else a + 1)
        out = out + img.scale((-1) ** i)
    return out


def boundary(s: SymbolSum) -> SymbolSum:
    """d[t_0, ..., t_n] = sum_i (-1)^i [t_0, ..., omit t_i, ..., t_n]."""
    out = SymbolSum()
    for sym, c in s.terms.items():
        for i in range(len(sym)):
            out._add(sym[:i] + sym[i + 1:], (-1) ** i * c)
    return out


def _candidates(targets: Iterable, alphabet: Sequence) -> set:
    out = set()
    for sym in targets:
        for p in alphabet:
            for j in range(len(sym) + 1):
                out.add(sym[:j] + (p,) + sym[j:])
    return out


def boundary_image_membership(s: SymbolSum, alphabet: Iterable, rounds: int = 2):
    """(True, witness) if s is the boundary of an integer combination of
    symbols over the alphabet, else (False, None).

    Candidate preimages are built by inserting one alphabet pair into a
    symbol already in play; each round adds the symbols met in the
    boundaries of the previous candidates.
    """
    if not s:
        return True, SymbolSum()
    alphabet = sorted(set(alphabet))
    span = IntegerSpan()
    seen: set = set()
    frontier = set(s.terms)
    for _ in range(rounds):
        new = _candidates(frontier, alphabet) - seen
        for cand in sorted(new):
            seen.add(cand)
            span.add(boundary(SymbolSum.symbol(*cand)).terms, cand)
        sol = span.solve(s.terms)
        if sol is not None:
            witness = SymbolSum({c: t for c, t in sol.items()})
            if boundary(witness) == s:
                return True, witness
        frontier = {t for cand in new for t in boundary(SymbolSum.symbol(*cand)).terms}
    return False, None


def verify_coboundary(n: int) -> dict:
    """Check beta - alpha = dh modulo the image of the boundary for all w in S^n."""
    if n < 2:
        raise ValueError("n must be at least 2")
    failures = []
    count = 0
    for w in product(range(1, n + 1), repeat=n):
        count += 1
        diff = beta(w) - alpha(w) - dh_map(w)
        seed = diff.pairs() | beta(w).pairs() | alpha(w).pairs() | dh_map(w).pairs()
        ok, witness = boundary_image_membership(diff, seed)
        if not ok:
            full = {(i + 1, 1) for i in range(n)} | {(i + 1, wi) for i, wi in enumerate(w)}
            ok, witness = boundary_image_membership(diff, seed | full)
        if not ok:
            failures.append(list(w))
    return {"n": n, "checked": count, "pass": not failures, "failures": failures}


def polar_value(A, m: Sequence[Sequence], trunc: int) -> HdElement:
    """(-1)^{n+1} det(sigma) / prod_j (z m^t sigma_j), sigma the first columns of A."""
    cols = []
    for a in A:
        if a and isinstance(a[0], (list, tuple)):
            cols.append([Fraction(row[0]) for row in a])
        else:
            cols.append([Fraction(x) for x in a])
    n = len(cols)
    d = det(transpose(cols))
    if d == 0:
        return HdElement(MultiSeries(n, trunc), [])
    forms = []
    for c in cols:
        f = [sum(Fraction(m[r][j]) * c[r] for r in range(n)) for j in range(n)]
        if not all(f):
            raise NotDense("form %s is not dense" % ([str(x) for x in f],))
        forms.append(f)
    num = MultiSeries.constant(n, trunc, (-1) ** (n + 1) * Fraction(d))
    return HdElement(num, forms)
