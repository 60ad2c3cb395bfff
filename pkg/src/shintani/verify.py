"""Seeded property suites, used by ``shintani verify`` and the tests.

Each suite returns a list of checks {"name", "pass", "detail"}; with the
same seed the report is identical.
"""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import product
from typing import Callable

from .conegeom import (
    PerturbationVector,
    cocycle_defect,
    cq_eval,
    hill_constant,
    signed_fundamental_domain,
    wedge,
)
from .eisenstein import (
    ZetaJob,
    periodic_B,
    psi_sh_ell_hd,
    smoothed_cocycle_value,
    smoothed_series,
    smoothed_zeta,
    unsmooth_solve,
)
from .errors import DegenerateQ
from .exactmath import det, hnf, inv_det, matmul, quotient_reps, transpose
from .fixtures import fixture_field, fixture_units
from .genfun import Cone, MultiSeries, delta_k, genfun_h, solomon_hu
from .numfield import FieldLattice, trace_dual_basis
from .sczech import f_eval, verify_coboundary

__all__ = ["SUITES", "run_suite", "random_gamma_ell_columns", "random_invertible"]


def _check(name: str, ok: bool, detail: str = "") -> dict:
    return {"name": name, "pass": bool(ok), "detail": detail}


def random_invertible(rng: random.Random, n: int, lo: int = -4, hi: int = 4):
    while True:
        m = [[rng.randint(lo, hi) for _ in range(n)] for _ in range(n)]
        if det(m) != 0:
            return m


def random_gamma_ell_columns(rng: random.Random, n: int, ell: int, count: int):
    """Integer columns c with c_1 prime to ell and ell | c_j for j > 1."""
    cols = []
    for _ in range(count):
        first = rng.choice([x for x in range(-6, 7) if x % ell])
        cols.append([first] + [ell * rng.randint(-2, 2) for _ in range(n - 1)])
    return cols


def _generic_q(rng: random.Random, n: int) -> PerturbationVector:
    return PerturbationVector([Fraction(rng.randint(1, 97), rng.randint(98, 199)) * rng.choice([-1, 1])
                               + Fraction(j, 1009) for j in range(n)])


def suite_exactmath(rng: random.Random) -> list:
    out = []
    for t in range(10):
        n = rng.choice([2, 3])
        m = random_invertible(rng, n)
        inv, d = inv_det(m)
        ident = matmul(m, inv)
        ok = all(ident[i][j] == (i == j) for i in range(n) for j in range(n))
        q = quotient_reps(m)
        ok = ok and len(q) == abs(d)
        h, u = hnf(transpose(m))
        ok = ok and matmul(u, transpose(m)) == h
        out.append(_check("inverse/hnf/quotient #%d" % t, ok))
    return out


def suite_cones(rng: random.Random) -> list:
    out = []
    for t in range(10):
        n = rng.choice([2, 3])
        cols = transpose(random_invertible(rng, n))
        Q = _generic_q(rng, n)
        try:
            inv, _ = inv_det(transpose(cols))
            qc = Q.signs_in(inv)
        except DegenerateQ:
            continue
        # points on faces: the limit definition says w + tQ lies in the open cone
        ok = True
        for coeffs in product([0, 1, 2], repeat=n):
            w = [sum(c * col[i] for c, col in zip(coeffs, cols)) for i in range(n)]
            expect = int(all(c > 0 or (c == 0 and s > 0) for c, s in zip(coeffs, qc)))
            ok = ok and cq_eval(cols, Q, w) == expect
        out.append(_check("face weights match the limit definition #%d" % t, ok))
    for t in range(10):
        n = rng.choice([2, 3])
        vecs = [[rng.randint(1, 5) for _ in range(n)] for _ in range(n + 1)]
        Q = _generic_q(rng, n)
        try:
            combo = cocycle_defect(vecs, Q)
        except DegenerateQ:
            continue
        pts = [[rng.randint(-5, 5) for _ in range(n)] for _ in range(30)]
        ok = all(combo.evaluate(p) == 0 for p in pts)
        out.append(_check("positive cocycle relation at 30 points #%d" % t, ok))
    for t in range(10):
        n = rng.choice([2, 3])
        vecs = [[rng.randint(-3, 3) for _ in range(n)] for _ in range(n + 1)]
        if any(det(transpose(vecs[:i] + vecs[i + 1:])) == 0 for i in range(n + 1)):
            continue
        Q = _generic_q(rng, n)
        try:
            combo = cocycle_defect(vecs, Q)
        except DegenerateQ:
            continue
        const = hill_constant(vecs)
        pts = [[rng.randint(-5, 5) for _ in range(n)] for _ in range(30)]
        ok = all(combo.evaluate(p) == const for p in pts)
        out.append(_check("general position defect is the constant %d #%d" % (const, t), ok))
    return out


def suite_domains(rng: random.Random) -> list:
    out = []
    for name in ("D5", "D12"):
        field = fixture_field(name)
        units = fixture_units(field)
        w = field.power_basis()
        dom = signed_fundamental_domain(units, w)
        ok = True
        for _ in range(10):
            while True:
                xi = field.elem([Fraction(rng.randint(-20, 20), rng.randint(1, 9))
                                 for _ in range(field.n)])
                if xi.is_totally_positive():
                    break
            ok = ok and dom.orbit_sum(xi) == 1
        out.append(_check("orbit sum is 1 on %s" % name, ok))
    return out


def suite_genfun(rng: random.Random) -> list:
    out = []
    for t in range(5):
        n = rng.choice([2, 3])
        vecs = transpose(random_invertible(rng, n))
        v = [Fraction(rng.randint(0, 5), 6) for _ in range(n)]
        s = solomon_hu(wedge(vecs), v, 4)
        out.append(_check("wedge maps to 0 #%d" % t, s.is_zero()))
    x = MultiSeries.linear([1, -1], 4)
    num = x * MultiSeries.constant(2, 4)
    from .genfun import HdElement
    e = HdElement(num, [[1, 1]])
    out.append(_check("Delta^0 (z1 - z2)/(z1 + z2) = 0", delta_k(e, 0) == 0))
    for k in range(4):
        for q in range(1, 5):
            for p in range(1, q + 1):
                a = Fraction(p, q)
                h = genfun_h(Cone([[1]], 1), [a], k + 3)
                ok = delta_k(h, k) == -periodic_B(k + 1, a) / (k + 1) if (k + 1 != 1 or a != 1) \
                    else delta_k(h, k) == Fraction(-1, 2)
                if not ok:
                    out.append(_check("Hurwitz k=%d v=%s" % (k, a), False))
    out.append(_check("Hurwitz values k <= 3, q <= 4", all(c["pass"] for c in out)))
    return out


def suite_eisenstein(rng: random.Random) -> list:
    out = []
    field = fixture_field("D5")
    units = fixture_units(field)
    theta = field.theta()
    ring = FieldLattice.ring(field)
    c = FieldLattice.principal(4 - theta)
    s = smoothed_zeta(ZetaJob(field, ring, c, 1, units))
    out.append(_check("flagship smoothed value -4", s == -4, str(s)))
    z = unsmooth_solve([s], [0], 11, 1)[0]
    out.append(_check("flagship zeta(-1) = 1/30", z == Fraction(1, 30), str(z)))
    ell = 3
    for t in range(4):
        n = 2
        cols = random_gamma_ell_columns(rng, n, ell, n)
        if det(transpose(cols)) == 0:
            continue
        m = [[Fraction(rng.randint(1, 5)), Fraction(rng.randint(1, 5))],
             [Fraction(rng.randint(-5, -1)), Fraction(rng.randint(1, 5))]]
        Q = _generic_q(rng, n)
        v = [Fraction(rng.randint(0, 5), 6) for _ in range(n)]
        try:
            hd = psi_sh_ell_hd(cols, m, Q, v, ell, 6)
            series = smoothed_series(cols, m, Q, v, ell, 6)
        except DegenerateQ:
            continue
        comb = hd.combined()
        den = MultiSeries.constant(n, 6)
        for f in comb.forms:
            den = den * MultiSeries.linear(f, 6)
        regular = comb.numerator == series * den
        fm = _norm_poly(m)
        two_path = smoothed_cocycle_value(cols, fm, Q, v, ell, 1) == series.coefficient((1, 1))
        out.append(_check("smoothing is regular and both paths agree #%d" % t, regular and two_path))
    return out


def _norm_poly(m) -> dict:
    """prod_j (x m)_j as a polynomial dict."""
    n = len(m)
    poly = {(0,) * n: Fraction(1)}
    for j in range(n):
        nxt: dict = {}
        for e, c in poly.items():
            for i in range(n):
                ee = list(e)
                ee[i] += 1
                ee = tuple(ee)
                nxt[ee] = nxt.get(ee, Fraction(0)) + c * Fraction(m[i][j])
        poly = {e: c for e, c in nxt.items() if c}
    return poly


def suite_sczech(rng: random.Random) -> list:
    out = []
    for n in (2, 3):
        rep = verify_coboundary(n)
        out.append(_check("beta - alpha = dh mod boundaries, n=%d" % n, rep["pass"],
                          "%d tuples" % rep["checked"]))
    ok = True
    for _ in range(20):
        n = rng.choice([2, 3])
        taus = [[rng.randint(-4, 4) for _ in range(n)] for _ in range(n + 1)]
        x = [Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(n)]
        try:
            total = sum((-1) ** i * f_eval(taus[:i] + taus[i + 1:], x) for i in range(n + 1))
        except ZeroDivisionError:
            continue
        ok = ok and total == 0
    out.append(_check("cocycle relation of f at random points", ok))
    return out


SUITES: dict[str, Callable] = {
    "exactmath": suite_exactmath,
    "cones": suite_cones,
    "domains": suite_domains,
    "genfun": suite_genfun,
    "eisenstein": suite_eisenstein,
    "sczech": suite_sczech,
}


def run_suite(name: str, seed: int = 0) -> dict:
    if name == "all":
        names = list(SUITES)
    elif name in SUITES:
        names = [name]
    else:
        raise KeyError("unknown suite %r (choose from %s, all)" % (name, ", ".join(SUITES)))
    checks = []
    for nm in names:
        rng = random.Random("%s:%d" % (nm, seed))
        for c in SUITES[nm](rng):
            checks.append(dict(c, suite=nm))
    return {"suite": name, "seed": seed, "pass": all(c["pass"] for c in checks),
            "checks": checks}
