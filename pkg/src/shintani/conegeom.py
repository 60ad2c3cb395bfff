"""Rational simplicial cones and their Q-perturbed characteristic functions.

A cone is stored by primitive integer generators in lexicographic order, so
two cones are equal exactly when they are the same set.  ``c_Q`` attaches to
an n-dimensional cone the boundary faces that are entered when a point is
nudged in the direction of Q; the face pattern is recorded in
``FaceWeights``.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations, permutations, product
from math import ceil, floor
from typing import Iterable, Sequence

import mpmath

from .errors import DegenerateQ, SingularMatrix
from .exactmath import (
    det,
    inv_det,
    matvec,
    primitive_vector,
    quotient_reps,
    rank,
    span_coordinates,
    transpose,
)
from .numfield import (
    EmbeddedVector,
    FieldElem,
    UnitSystem,
    coords_in_basis,
    permutation_sign,
    regulator_sign,
    sign_det_embeddings,
    trace_dual_basis,
)

__all__ = [
    "Cone",
    "ConeCombo",
    "PerturbationVector",
    "FaceWeights",
    "SignedDomain",
    "cq_eval",
    "face_weights",
    "cocycle_defect",
    "hill_constant",
    "wedge",
    "parallelepiped_points",
    "cq_decomposition",
    "signed_fundamental_domain",
    "subsets",
]


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def subsets(n: int):
    for r in range(n + 1):
        for c in combinations(range(n), r):
            yield frozenset(c)


class Cone:
    """Open cone spanned by linearly independent integer vectors."""

    __slots__ = ("gens", "dim", "_hash")

    def __init__(self, vectors: Iterable[Sequence], ambient: int | None = None):
        gens = sorted(primitive_vector(v) for v in vectors)
        if gens:
            ambient = len(gens[0])
            if rank(gens) != len(gens):
                raise SingularMatrix("cone generators are dependent")
        elif ambient is None:
            raise ValueError("the zero cone needs an ambient dimension")
        self.gens = tuple(gens)
        self.dim = ambient
        self._hash = hash((self.gens, self.dim))

    def __eq__(self, other):
        return isinstance(other, Cone) and self.gens == other.gens and self.dim == other.dim

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return "Cone(%s)" % (list(self.gens),)

    def __len__(self):
        return len(self.gens)

    def contains(self, w: Sequence) -> bool:
        c = span_coordinates(self.gens, w)
        return c is not None and all(x > 0 for x in c)


class ConeCombo:
    """Finite integer combination of cones (an element of the cone group)."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict | None = None):
        self.terms = {c: k for c, k in (terms or {}).items() if k}

    def add(self, cone: Cone, coef: int = 1) -> None:
        k = self.terms.get(cone, 0) + coef
        if k:
            self.terms[cone] = k
        else:
            self.terms.pop(cone, None)

    def __add__(self, other: "ConeCombo") -> "ConeCombo":
        out = ConeCombo(dict(self.terms))
        for c, k in other.terms.items():
            out.add(c, k)
        return out

    def __neg__(self):
        return ConeCombo({c: -k for c, k in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, k: int) -> "ConeCombo":
        return ConeCombo({c: k * v for c, v in self.terms.items()})

    def __eq__(self, other):
        return isinstance(other, ConeCombo) and self.terms == other.terms

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        return "ConeCombo(%r)" % (self.terms,)

    def evaluate(self, w: Sequence) -> int:
        return sum(k for c, k in self.terms.items() if c.contains(w))


class PerturbationVector:
    """The auxiliary direction Q, either rational or embedded from a field."""

    def __init__(self, values):
        if isinstance(values, EmbeddedVector):
            self.embedded = values
            self.rational = None
        else:
            self.embedded = None
            self.rational = tuple(Fraction(x) for x in values)
        self._cache: dict = {}

    def __len__(self):
        return len(self.embedded) if self.embedded is not None else len(self.rational)

    def __repr__(self):
        if self.rational is not None:
            return "PerturbationVector(%s)" % ([str(x) for x in self.rational],)
        return "PerturbationVector(J_%d of %r)" % (self.embedded.embedding_index,
                                                  list(self.embedded.elems))

    def transform(self, m: Sequence[Sequence]) -> "PerturbationVector":
        """The vector m Q."""
        if self.rational is not None:
            return PerturbationVector(matvec(m, self.rational))
        return PerturbationVector(self.embedded.transform(m))

    def scaled(self, c) -> "PerturbationVector":
        if Fraction(c) <= 0:
            raise ValueError("only positive scalings leave Q unchanged")
        n = len(self)
        return self.transform([[Fraction(c) if i == j else 0 for j in range(n)]
                               for i in range(n)])

    def signs_in(self, m: Sequence[Sequence]) -> tuple[int, ...]:
        """Signs of the coordinates of m Q (m rational)."""
        key = tuple(tuple(Fraction(x) for x in row) for row in m)
        s = self._cache.get(key)
        if s is None:
            if self.rational is not None:
                s = tuple(_sign(x) for x in matvec(m, self.rational))
            else:
                s = tuple(self.embedded.transform(m).signs())
            self._cache[key] = s
        return s

    def signs(self) -> tuple[int, ...]:
        n = len(self)
        return self.signs_in([[int(i == j) for j in range(n)] for i in range(n)])

    def sign_of_pairing(self, x: Sequence) -> int:
        """Sign of <x, Q> for a rational row vector x."""
        return self.signs_in([list(x)])[0]


def _sigma_matrix(cols: Sequence[Sequence]) -> list[list]:
    return transpose([list(c) for c in cols])


def _q_coords_signs(cols, Q: PerturbationVector):
    sinv, _ = inv_det(_sigma_matrix(cols))
    signs = Q.signs_in(sinv)
    if 0 in signs:
        raise DegenerateQ("Q lies in the span of n-1 generators %s" % (list(cols),))
    return sinv, signs


class FaceWeights:
    """Which faces C_I of the cone on ``cols`` belong to C_Q."""

    __slots__ = ("cols", "signs", "weights")

    def __init__(self, cols, signs):
        self.cols = tuple(tuple(c) for c in cols)
        self.signs = tuple(signs)
        n = len(self.cols)
        self.weights = {}
        for I in subsets(n):
            self.weights[I] = int(all(self.signs[i] > 0 for i in range(n) if i not in I))

    def __getitem__(self, subset) -> int:
        return self.weights[frozenset(subset)]

    def faces(self):
        """The subsets I with weight 1."""
        return [I for I, k in self.weights.items() if k]


def face_weights(cols: Sequence[Sequence], Q: PerturbationVector) -> FaceWeights:
    _, signs = _q_coords_signs(cols, Q)
    return FaceWeights(cols, signs)


def cq_eval(cols: Sequence[Sequence], Q: PerturbationVector, w: Sequence) -> int:
    """Value at w of the Q-perturbed characteristic function of C(cols)."""
    sinv, signs = _q_coords_signs(cols, Q)
    x = matvec(sinv, [Fraction(t) for t in w])
    for xi, qi in zip(x, signs):
        if xi < 0 or (xi == 0 and qi < 0):
            return 0
    return 1


def _face_combo(cols, Q, coef: int, combo: ConeCombo) -> None:
    fw = face_weights(cols, Q)
    n = len(cols)
    for I in fw.faces():
        combo.add(Cone([cols[i] for i in sorted(I)], ambient=len(cols[0])), coef)


def cq_combo(cols: Sequence[Sequence], Q: PerturbationVector) -> ConeCombo:
    """c_Q(cols) written as a combination of open faces."""
    combo = ConeCombo()
    _face_combo(cols, Q, 1, combo)
    return combo


def cocycle_defect(vectors: Sequence[Sequence[int]], Q: PerturbationVector,
                   basis: Sequence[Sequence] | None = None) -> ConeCombo:
    """sum_i (-1)^i O_B(v_0..^v_i..v_n) c_Q(v_0..^v_i..v_n) as faces."""
    n = len(vectors) - 1
    if basis is None:
        bsign = 1
    else:
        bsign = _sign(det(basis))
    combo = ConeCombo()
    for i in range(n + 1):
        sub = [vectors[j] for j in range(n + 1) if j != i]
        d = det(_sigma_matrix(sub))
        if d == 0:
            continue
        coef = (-1) ** i * _sign(d) * bsign
        _face_combo(sub, Q, coef, combo)
    return combo


def hill_constant(vecs) -> int:
    """The constant value of the cocycle defect of v_0, ..., v_n (vectors in general position).

    It is sgn det(v_1, ..., v_n) when the linear relation among the v_i has
    coefficients of one sign, and 0 otherwise.
    """
    n = len(vecs) - 1
    dets = [det(transpose(vecs[:i] + vecs[i + 1:])) for i in range(n + 1)]
    # lambda_i = (-1)^i det(omit v_i) solves sum lambda_i v_i = 0 (Cramer)
    lam = [(-1) ** i * d for i, d in enumerate(dets)]
    if all(x > 0 for x in lam) or all(x < 0 for x in lam):
        return (1 if dets[0] > 0 else -1)
    return 0


def wedge(vectors: Sequence[Sequence[int]]) -> ConeCombo:
    """The decomposition of R v_1 + R_{>0} v_2 + ... into three open cones."""
    v1, rest = list(vectors[0]), [list(v) for v in vectors[1:]]
    ambient = len(v1)
    combo = ConeCombo()
    combo.add(Cone([v1] + rest, ambient))
    combo.add(Cone(rest, ambient) if rest else Cone([], ambient))
    combo.add(Cone([[-x for x in v1]] + rest, ambient))
    return combo


def _independent_rows(cols):
    """Row indices of an invertible maximal minor of the matrix with columns cols."""
    m = _sigma_matrix(cols)
    chosen = []
    for i in range(len(m)):
        if rank([m[j] for j in chosen + [i]]) == len(chosen) + 1:
            chosen.append(i)
        if len(chosen) == len(cols):
            break
    return chosen


def _to_half_open(t: Fraction) -> Fraction:
    """The representative of t mod 1 in (0, 1]."""
    return t - ceil(t) + 1


def parallelepiped_points(cols: Sequence[Sequence[int]], I: Iterable[int],
                          v: Sequence) -> list[tuple[Fraction, ...]]:
    """Points a = v mod Z^n with a = sum_{i in I} t_i cols[i], t_i in (0, 1]."""
    I = sorted(I)
    v = [Fraction(x) for x in v]
    n = len(v)
    if not I:
        return [tuple(Fraction(0) for _ in range(n))] if all(x.denominator == 1 for x in v) else []
    sub = [list(cols[i]) for i in I]
    rows = _independent_rows(sub)
    if len(rows) < len(sub):
        raise SingularMatrix("face generators are dependent")
    s_r = [[sub[j][i] for j in range(len(sub))] for i in rows]
    s_inv, _ = inv_det(s_r)
    out = []
    for m in quotient_reps(s_r).reps:
        t = matvec(s_inv, [v[i] + m[k] for k, i in enumerate(rows)])
        t = [_to_half_open(x) for x in t]
        a = tuple(sum(t[j] * sub[j][i] for j in range(len(sub))) for i in range(n))
        if all((a[i] - v[i]).denominator == 1 for i in range(n)):
            out.append(a)
    out.sort()
    return out


def cq_decomposition(cols: Sequence[Sequence[int]], Q: PerturbationVector, v: Sequence):
    """Disjoint pieces (a_I, I): C_Q meets v + Z^n in the union of a_I + N cols_I."""
    sinv, signs = _q_coords_signs(cols, Q)
    sigma = _sigma_matrix(cols)
    n = len(cols)
    fw = FaceWeights(cols, signs)
    v = [Fraction(x) for x in v]
    out = []
    for x in quotient_reps(sigma).reps:
        y = matvec(sinv, [a + b for a, b in zip(v, x)])
        J = [j for j in range(n) if y[j].denominator == 1]
        off = frozenset(range(n)) - frozenset(J)
        for r in range(len(J) + 1):
            for K in combinations(J, r):
                I = off | frozenset(K)
                if not fw.weights[I]:
                    continue
                t = [y[j] - floor(y[j]) if j in off else Fraction(int(j in I)) for j in range(n)]
                a = tuple(matvec(sigma, t))
                out.append((a, I))
    out.sort(key=lambda p: (sorted(p[1]), p[0]))
    return out


class SignedDomain:
    """Signed combination of Q-perturbed cones, in coordinates of a basis w."""

    def __init__(self, pieces, Q: PerturbationVector, w, units: UnitSystem):
        self.pieces = pieces  # list of (coefficient, Cone, FaceWeights)
        self.Q = Q
        self.w = list(w)
        self.units = units

    def indicator(self, x: Sequence) -> int:
        total = 0
        for coef, _, fw in self.pieces:
            if coef:
                total += coef * cq_eval(fw.cols, self.Q, x)
        return total

    def _center(self, xi: FieldElem):
        """Real exponents a with prod eps_i^{a_i} xi roughly balanced."""
        field = xi.field
        n = field.n
        m = len(self.units.units)
        with mpmath.workprec(80):
            lx = [mpmath.log(xi.embed(j, 60)) for j in range(1, n + 1)]
            mean = sum(lx) / n
            target = [-(t - mean) for t in lx[:m]]
            mat = mpmath.matrix(m, m)
            for i, u in enumerate(self.units.units):
                for j in range(m):
                    mat[j, i] = mpmath.log(u.embed(j + 1, 60))
            a = mpmath.lu_solve(mat, mpmath.matrix(target))
            return [int(mpmath.nint(a[i])) for i in range(m)]

    def orbit_sum(self, xi: FieldElem, start: int = 2, max_window: int = 40) -> int:
        """sum over u in U of the signed indicator at the coordinates of u xi."""
        m = len(self.units.units)
        center = self._center(xi)
        K = start
        cache: dict = {}
        while K <= max_window:
            total = 0
            boundary_hit = False
            for exps in product(range(-K, K + 1), repeat=m):
                val = cache.get(exps)
                if val is None:
                    u = xi
                    for e, c, eps in zip(exps, center, self.units.units):
                        if e + c:
                            u = u * eps ** (e + c)
                    val = self.indicator(coords_in_basis(u, self.w))
                    cache[exps] = val
                total += val
                if val and any(abs(e) == K for e in exps):
                    boundary_hit = True
            if not boundary_hit:
                return total
            K *= 2
        raise ArithmeticError("unit window did not close around the orbit")


def signed_fundamental_domain(units: UnitSystem, w: Sequence[FieldElem]) -> SignedDomain:
    field = units.field
    n = field.n
    Q = PerturbationVector(EmbeddedVector(field, n, trace_dual_basis(w)))
    wu = regulator_sign(units)
    sdj = sign_det_embeddings(w)
    pieces = []
    for perm in permutations(range(n - 1)):
        vs = [field.one()]
        for t in perm:
            vs.append(vs[-1] * units.units[t])
        cols = [primitive_vector(coords_in_basis(x, w)) for x in vs]
        d = det(_sigma_matrix(cols))
        coef = (-1) ** (n - 1) * wu * permutation_sign(perm) * _sign(d) * sdj
        pieces.append((coef, Cone(cols), face_weights(cols, Q)))
    return SignedDomain(pieces, Q, w, units)
