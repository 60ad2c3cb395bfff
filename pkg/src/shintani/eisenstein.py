"""Bernoulli-Dedekind sums, the smoothed cocycle, and partial zeta values.

Everything here is exact.  The partial zeta values of a totally real field
at negative integers are obtained from the explicit formula for the
ell-smoothed Shintani cocycle in terms of Dedekind sums: the field data only
enters through rational matrices (the regular representation of units in an
adapted basis), a rational polynomial (the scaled norm form) and the exact
signs of the embedded perturbation vector.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import permutations, product
from math import factorial, lcm
from typing import Mapping, Sequence

from .conegeom import PerturbationVector, face_weights
from .errors import (
    AmbiguousB1,
    DegenerateQ,
    MissingClassData,
    NotSmoothable,
    ScalingHitsEll,
)
from .exactmath import det, inv_det, matvec, quotient_reps, solve, transpose
from .genfun import HdSum, MultiSeries, genfun_h, polynomial_power, prk_coeffs
from .conegeom import Cone
from .numfield import (
    EmbeddedVector,
    FieldElem,
    FieldLattice,
    TotallyRealField,
    UnitSystem,
    adapted_basis,
    coords_in_basis,
    permutation_sign,
    regulator_sign,
    rho_w,
    sign_det_embeddings,
    trace_dual_basis,
    units_congruent_one,
)

__all__ = [
    "BernoulliTable",
    "bernoulli_poly",
    "periodic_B",
    "b_product",
    "dedekind_D",
    "dedekind_sums",
    "dedekind_D_ell",
    "smoothed_cocycle_value",
    "smoothed_cocycle_values",
    "smoothed_series",
    "psi_sh_hd",
    "psi_sh_ell_hd",
    "norm_form",
    "ZetaJob",
    "smoothed_zeta",
    "unsmooth_solve",
    "integrality_check",
    "is_ell_integral",
    "smoothing_hypothesis",
]


class BernoulliTable:
    """Bernoulli polynomials b_0..b_max as ascending coefficient lists."""

    def __init__(self, max_degree: int = 0):
        self.polys: list[list[Fraction]] = [[Fraction(1)]]
        self.extend(max_degree)

    def extend(self, m: int) -> None:
        # b_k(x) = sum_j C(k, j) b_j x^{k-j}, with the numbers from
        # sum_{j<k+1} C(k+1, j) b_j = 0
        nums = [p[0] for p in self.polys]
        while len(nums) <= m:
            k = len(nums)
            s = sum(Fraction(_binom(k + 1, j)) * nums[j] for j in range(k))
            nums.append(-s / (k + 1))
        while len(self.polys) <= m:
            k = len(self.polys)
            coeffs = [Fraction(0)] * (k + 1)
            for j in range(k + 1):
                coeffs[k - j] = _binom(k, j) * nums[j]
            self.polys.append(coeffs)

    def poly(self, k: int) -> list[Fraction]:
        self.extend(k)
        return self.polys[k]

    def value(self, k: int, x: Fraction) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.poly(k)):
            acc = acc * x + c
        return acc


def _binom(n: int, k: int) -> int:
    return factorial(n) // (factorial(k) * factorial(n - k))


_TABLE = BernoulliTable(8)


def bernoulli_poly(k: int) -> list[Fraction]:
    return list(_TABLE.poly(k))


def periodic_B(k: int, x) -> Fraction:
    """B_k(x) = b_k({x}); undefined for k = 1 at integers."""
    x = Fraction(x)
    if k == 1 and x.denominator == 1:
        raise AmbiguousB1("B_1 at an integer depends on a choice of side")
    return _TABLE.value(k, x - (x.numerator // x.denominator))


def b_product(e: Sequence[int], v: Sequence, q_signs: Sequence[int]) -> Fraction:
    """prod_{j in J} (-sgn Q_j / 2) * prod_{j not in J} B_{e_j}(v_j)."""
    out = Fraction(1)
    for ej, vj, qj in zip(e, v, q_signs):
        vj = Fraction(vj)
        if ej == 1 and vj.denominator == 1:
            if qj == 0:
                raise DegenerateQ("Q has a zero coordinate where B_1 needs a side")
            out *= Fraction(-qj, 2)
        else:
            out *= periodic_B(ej, vj)
        if not out:
            return out
    return out


def _as_vector(v) -> list[Fraction]:
    return [Fraction(x) for x in v]


def _scaled_bernoulli(m: int, big: int) -> tuple[list[int], int]:
    """Integer coefficients of P(r) = d * big^m * b_m(r / big), and d."""
    coeffs = _TABLE.poly(m)
    d = lcm(*(c.denominator for c in coeffs))
    if m == 1:
        d = lcm(d, 2)
    return [int(c * d) * big ** (m - j) for j, c in enumerate(coeffs)], d


def _horner(coeffs: list[int], r: int) -> int:
    acc = 0
    for c in reversed(coeffs):
        acc = acc * r + c
    return acc


def dedekind_sums(sigma: Sequence[Sequence[int]], es: Sequence[Sequence[int]],
                  Q: PerturbationVector, v: Sequence) -> dict:
    """D(sigma, e, Q, v) for several exponent vectors e at once.

    Each y = sigma^{-1}(x + v) is kept as an integer residue vector r with
    y = r / big mod Z^n, and each B_m(r / big) as an integer numerator over
    a denominator depending only on m, so the loop is integer arithmetic.
    """
    sigma = [[int(x) for x in row] for row in sigma]
    n = len(sigma)
    v = _as_vector(v)
    sinv, d = inv_det(sigma)
    es = [tuple(e) for e in es]
    if not es:
        return {}
    maxdeg = max(max(e) for e in es)
    _TABLE.extend(maxdeg)
    dv = lcm(*(x.denominator for x in v)) if v else 1
    big = dv * abs(int(d))
    adj = [[int(x * big) for x in row] for row in sinv]
    base = [int(sum(adj[i][j] * v[j] for j in range(n))) for i in range(n)]
    degs = sorted({m for e in es for m in e})
    scaled = {m: _scaled_bernoulli(m, big) for m in degs}
    q_signs = None

    def j_value(j):
        # -sgn(Q_j)/2 over the denominator 2 big of B_1
        nonlocal q_signs
        if q_signs is None:
            q_signs = Q.signs_in(sinv)
        if q_signs[j] == 0:
            raise DegenerateQ("sigma^{-1} Q has a zero coordinate")
        return -q_signs[j] * big

    diag = quotient_reps(sigma).diagonal
    sums = {e: 0 for e in es}
    last = n - 1
    step = [adj[i][last] % big for i in range(n)]
    per_coord = [sorted({e[i] for e in es}) for i in range(n)]
    coord_degs = [[(m, scaled[m][0]) for m in per_coord[i]] for i in range(n)]
    idx = [[(i, e[i]) for i in range(n)] for e in es]
    inner = diag[last]
    for head in product(*(range(t) for t in diag[:last])):
        r = [(base[i] + sum(adj[i][j] * head[j] for j in range(last))) % big
             for i in range(n)]
        for _ in range(inner):
            vals = []
            for i in range(n):
                ri = r[i]
                row = {}
                for m, cs in coord_degs[i]:
                    if ri == 0:
                        row[m] = j_value(i) if m == 1 else cs[0]
                        continue
                    acc = 0
                    for c in reversed(cs):
                        acc = acc * ri + c
                    row[m] = acc
                vals.append(row)
            for e, pairs in zip(es, idx):
                t = 1
                for i, m in pairs:
                    t *= vals[i][m]
                sums[e] += t
            for i in range(n):
                ri = r[i] + step[i]
                r[i] = ri - big if ri >= big else ri
    out = {}
    for e in es:
        den = 1
        for m in e:
            den *= scaled[m][1] * big ** m
        out[e] = Fraction(sums[e], den)
    return out


def dedekind_D(sigma, e, Q: PerturbationVector, v) -> Fraction:
    return dedekind_sums(sigma, [tuple(e)], Q, v)[tuple(e)]


def _pi(n: int, ell: int):
    return [[(ell if i == 0 else 1) if i == j else 0 for j in range(n)] for i in range(n)]


def _sigma_ell(sigma, ell):
    if any(x % ell for row in sigma[1:] for x in row):
        raise NotSmoothable("rows 2..n of sigma must be divisible by ell")
    return [list(sigma[0])] + [[x // ell for x in row] for row in sigma[1:]]


def dedekind_D_ell(sigma, e, Q: PerturbationVector, v, ell: int) -> Fraction:
    return dedekind_ell_sums(sigma, [tuple(e)], Q, v, ell)[tuple(e)]


def dedekind_ell_sums(sigma, es, Q: PerturbationVector, v, ell: int) -> dict:
    """D_ell(sigma, e, Q, v) = D(sigma_ell, e, pi Q, pi v) - ell^{1-n+|e|} D(sigma, e, Q, v)."""
    sigma = [[int(x) for x in row] for row in sigma]
    n = len(sigma)
    s_ell = _sigma_ell(sigma, ell)
    pi = _pi(n, ell)
    v = _as_vector(v)
    first = dedekind_sums(s_ell, es, Q.transform(pi), matvec(pi, v))
    second = dedekind_sums(sigma, es, Q, v)
    return {tuple(e): first[tuple(e)] - Fraction(ell) ** (1 - n + sum(e)) * second[tuple(e)]
            for e in es}


def _first_columns(A) -> list[list[Fraction]]:
    """First columns of the matrices A_i, or the vectors themselves."""
    cols = []
    for a in A:
        if a and isinstance(a[0], (list, tuple)):
            cols.append([Fraction(row[0]) for row in a])
        else:
            cols.append([Fraction(x) for x in a])
    return cols


def _integral_sigma(A, ell: int):
    cols = _first_columns(A)
    lam = lcm(*(x.denominator for c in cols for x in c))
    if lam % ell == 0:
        raise ScalingHitsEll("clearing denominators needs a multiple of ell")
    sigma = transpose([[int(x * lam) for x in c] for c in cols])
    if any(x % ell for row in sigma[1:] for x in row):
        raise NotSmoothable("a first column is not congruent to (*, 0, ..., 0) mod ell")
    if any(x % ell == 0 for x in sigma[0]):
        raise NotSmoothable("a first column vanishes mod ell, so it is not in Gamma_ell")
    return sigma


def smoothed_cocycle_values(A, fM: Mapping, Q: PerturbationVector, v, ell: int,
                            ks: Sequence[int]) -> dict:
    """smoothed_cocycle_value for several k, sharing one pass over the classes."""
    sigma = _integral_sigma(A, ell)
    n = len(sigma)
    d = det(sigma)
    if d == 0:
        return {k: Fraction(0) for k in ks}
    prs = {k: prk_coeffs(fM, sigma, k) for k in ks}
    es = sorted({tuple(x + 1 for x in r) for pr in prs.values() for r in pr})
    dl = dedekind_ell_sums(sigma, es, Q, v, ell)
    sgn = (-1) ** n * (1 if d > 0 else -1)
    out = {}
    for k, pr in prs.items():
        total = Fraction(0)
        for r, p in pr.items():
            e = tuple(x + 1 for x in r)
            rf = 1
            for x in e:
                rf *= factorial(x)
            total += p / (Fraction(ell) ** sum(r) * rf) * dl[e]
        out[k] = sgn * total
    return out


def smoothed_cocycle_value(A, fM: Mapping, Q: PerturbationVector, v, ell: int, k: int) -> Fraction:
    """Shintani operator of the ell-smoothed cocycle via Dedekind sums.

    ``A`` is a list of n matrices in Gamma_0(ell) (or just their first
    columns); ``fM`` a homogeneous polynomial of degree n as a dict from
    exponent tuples to coefficients.
    """
    return smoothed_cocycle_values(A, fM, Q, v, ell, [k])[k]


def smoothed_series(A, m: Sequence[Sequence], Q: PerturbationVector, v, ell: int,
                    trunc: int) -> MultiSeries:
    """The regular series (-1)^n sgn det sigma sum_r ell^{-|r|} D_ell (z m^t sigma)^r/(r+1)!."""
    sigma = _integral_sigma(A, ell)
    n = len(sigma)
    d = det(sigma)
    if d == 0:
        return MultiSeries(n, trunc)
    forms = []
    for i in range(n):
        col = [sigma[r][i] for r in range(n)]
        forms.append([sum(Fraction(m[r][j]) * col[r] for r in range(n)) for j in range(n)])
    rs = [r for deg in range(trunc + 1) for r in _exps(n, deg)]
    es = [tuple(x + 1 for x in r) for r in rs]
    dl = dedekind_ell_sums(sigma, es, Q, v, ell)
    lin = [MultiSeries.linear(f, trunc) for f in forms]
    powers = [[MultiSeries.constant(n, trunc)] for _ in range(n)]
    out = MultiSeries(n, trunc)
    for r, e in zip(rs, es):
        c = dl[e]
        if not c:
            continue
        rf = 1
        for x in e:
            rf *= factorial(x)
        term = MultiSeries.constant(n, trunc, c / (Fraction(ell) ** sum(r) * rf))
        for i, ri in enumerate(r):
            while len(powers[i]) <= ri:
                powers[i].append(powers[i][-1] * lin[i])
            if ri:
                term = term * powers[i][ri]
        out = out + term
    sgn = 1 if d > 0 else -1
    return out.scale((-1) ** n * sgn)


def _exps(n, d):
    from .genfun import _exps_of_degree

    return list(_exps_of_degree(n, d))


def psi_sh_hd(cols, m, Q: PerturbationVector, v, trunc: int) -> HdSum:
    """h(sgn det sigma * c_Q(sigma), v)(z m^t) as a sum of HdElements."""
    cols = [list(c) for c in cols]
    n = len(cols)
    d = det(transpose(cols))
    if d == 0:
        return HdSum()
    sgn = 1 if d > 0 else -1
    fw = face_weights(cols, Q)
    out = HdSum()
    for I in sorted(fw.faces(), key=sorted):
        cone = Cone([cols[i] for i in sorted(I)], ambient=n)
        out = out + genfun_h(cone, v, trunc, m).scale(sgn)
    return out


def psi_sh_ell_hd(A, m, Q: PerturbationVector, v, ell: int, trunc: int) -> HdSum:
    """Psi(pi A pi^-1, pi^-1 m, pi Q, pi v) - ell Psi(A, m, Q, v) via cone generating functions."""
    sigma = _integral_sigma(A, ell)
    n = len(sigma)
    cols = transpose(sigma)
    pi = _pi(n, ell)
    pi_inv = [[Fraction(1, ell) if (i == j == 0) else int(i == j) for j in range(n)]
              for i in range(n)]
    v = _as_vector(v)
    cols_pi = [matvec(pi, c) for c in cols]
    first = psi_sh_hd(cols_pi, [[sum(pi_inv[i][r] * Fraction(m[r][j]) for r in range(n))
                                 for j in range(n)] for i in range(n)],
                      Q.transform(pi), matvec(pi, v), trunc)
    second = psi_sh_hd(cols, m, Q, v, trunc)
    return first - second.scale(ell)


# -- partial zeta values --------------------------------------------------------

def norm_form(w: Sequence[FieldElem]) -> dict:
    """N(x_1 w_1 + ... + x_n w_n) as a polynomial in x."""
    n = len(w)
    mats = [e.mult_matrix() for e in w]
    # entry (i, j) is the linear polynomial sum_t x_t mats[t][i][j]
    total: dict = {}
    for perm in permutations(range(n)):
        term = {(0,) * n: Fraction(permutation_sign(perm))}
        for i, j in enumerate(perm):
            lin = {tuple(int(s == t) for s in range(n)): mats[t][i][j]
                   for t in range(n) if mats[t][i][j]}
            nxt: dict = {}
            for e1, c1 in term.items():
                for e2, c2 in lin.items():
                    e = tuple(a + b for a, b in zip(e1, e2))
                    nxt[e] = nxt.get(e, Fraction(0)) + c1 * c2
            term = nxt
            if not term:
                break
        for e, c in term.items():
            total[e] = total.get(e, Fraction(0)) + c
    return {e: c for e, c in total.items() if c}


class ZetaJob:
    """Everything needed for zeta_f(a, -k) over the classes of a ray class group.

    ``classes`` are integral ideals representing the narrow ray classes mod f
    that are of interest; ``action[i]`` is the index of the class of
    ``classes[i] * c``.  ``units`` are totally positive units generating a
    finite-index subgroup of the totally positive units; the subgroup
    congruent to 1 mod f is computed from them.
    """

    def __init__(self, field: TotallyRealField, f: FieldLattice, c: FieldLattice, k: int,
                 units: UnitSystem, classes: Sequence[FieldLattice] | None = None,
                 action: Sequence[int] | None = None, twist=None):
        self.field = field
        self.f = f
        self.c = c
        self.k = int(k)
        self.classes = list(classes) if classes is not None else [FieldLattice.ring(field)]
        self.action = list(action) if action is not None else list(range(len(self.classes)))
        self.twist = twist
        ell = c.volume()
        if ell.denominator != 1 or not _is_prime(int(ell)):
            raise NotSmoothable("the smoothing ideal must have prime norm, got %s" % ell)
        self.ell = int(ell)
        self.units = units_congruent_one(units, f)

    def pairing_data(self, a: FieldLattice):
        """(w, Q, v, f_M) for the class of a."""
        lat = self.f.colon(a)
        sup = self.f.colon(a * self.c)
        w = adapted_basis(lat, sup, self.ell, self.twist)
        dual = trace_dual_basis(w)
        Q = PerturbationVector(EmbeddedVector(self.field, self.field.n, dual))
        v = [x.trace() for x in dual]
        scale = self.ell * a.volume()
        fM = {e: c * scale for e, c in norm_form(w).items()}
        return w, Q, v, fM


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


def _check_gamma0(m, ell) -> None:
    if any(x.denominator != 1 for row in m for x in row):
        raise NotSmoothable("unit matrix is not integral in the adapted basis")
    if any(m[i][0] % ell for i in range(1, len(m))):
        raise NotSmoothable("unit matrix is not in Gamma_0(%d)" % ell)


def smoothed_zeta(job: ZetaJob, a: FieldLattice | None = None) -> Fraction:
    """zeta_f(a c, -k) - ell^{1+k} zeta_f(a, -k), exactly."""
    a = job.classes[0] if a is None else a
    field = job.field
    n = field.n
    w, Q, v, fM = job.pairing_data(a)
    units = job.units.units
    for eps in units:
        _check_gamma0(rho_w(eps, w), job.ell)
    w_eps = regulator_sign(job.units)
    sdj = sign_det_embeddings(w)
    total = Fraction(0)
    for perm in permutations(range(n - 1)):
        vs = [field.one()]
        for t in perm:
            vs.append(vs[-1] * units[t])
        cols = [coords_in_basis(w[0] * x, w) for x in vs]
        coef = sdj * (-1) ** (n - 1) * w_eps * permutation_sign(perm)
        total += coef * smoothed_cocycle_value(cols, fM, Q, v, job.ell, job.k)
    return total


def unsmooth_solve(smoothed: Sequence[Fraction], action: Sequence[int], ell: int,
                   k: int) -> list[Fraction]:
    """Solve zeta(a c) - ell^{1+k} zeta(a) = S(a) for every class a."""
    m = len(smoothed)
    if len(action) != m or sorted(action) != list(range(m)):
        raise MissingClassData("class action must be a permutation of the listed classes")
    if any(s is None for s in smoothed):
        raise MissingClassData("a smoothed value is missing")
    c = Fraction(ell) ** (1 + k)
    mat = [[(1 if action[i] == j else 0) - (c if i == j else 0) for j in range(m)]
           for i in range(m)]
    return solve(mat, list(smoothed))


def is_ell_integral(x, ell: int) -> bool:
    d = Fraction(x).denominator
    while d % ell == 0:
        d //= ell
    return d == 1


def integrality_check(values, ell: int) -> dict:
    """Report whether every value lies in Z[1/ell]."""
    items = list(values.items()) if isinstance(values, Mapping) else list(enumerate(values))
    offenders = [(key, str(Fraction(x))) for key, x in items if not is_ell_integral(x, ell)]
    return {"ell": ell, "count": len(items), "pass": not offenders, "offenders": offenders}


def smoothing_hypothesis(fM: Mapping, v: Sequence, ell: int) -> bool:
    """Whether f_M(v + (1/ell)Z + Z^{n-1}) lies in Z[1/ell].

    g(x) = f_M(v + pi^{-1} x) has degree n, and a polynomial of degree d
    maps Z^n into Z[1/ell] exactly when it does so on the box {0..d}^n
    (its binomial-basis coefficients are integral combinations of those
    values).
    """
    v = _as_vector(v)
    n = len(v)
    deg = max((sum(e) for e in fM), default=0)
    for x in product(range(deg + 1), repeat=n):
        pt = [v[0] + Fraction(x[0], ell)] + [v[i] + x[i] for i in range(1, n)]
        val = Fraction(0)
        for e, c in fM.items():
            term = Fraction(c)
            for p, k in zip(pt, e):
                term *= p ** k
            val += term
        if not is_ell_integral(val, ell):
            return False
    return True
