from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shintani.errors import SingularMatrix
from shintani.exactmath import (
    IntegerSpan,
    bareiss_det,
    det,
    hnf,
    identity,
    inv_det,
    lattice_basis,
    matmul,
    primitive_vector,
    quotient_reps,
    rank,
    solve,
    transpose,
)

small = st.integers(-6, 6)


def square(n):
    return st.lists(st.lists(small, min_size=n, max_size=n), min_size=n, max_size=n)


def brute_det(m):
    n = len(m)
    if n == 1:
        return m[0][0]
    return sum((-1) ** j * m[0][j] * brute_det([r[:j] + r[j + 1:] for r in m[1:]])
               for j in range(n))


@given(st.integers(1, 4).flatmap(square))
def test_det_matches_cofactor_expansion(m):
    assert det(m) == brute_det(m)
    assert bareiss_det(m) == brute_det(m)


@given(st.integers(2, 3).flatmap(lambda n: st.tuples(square(n), square(n))))
def test_det_is_multiplicative(pair):
    a, b = pair
    assert det(matmul(a, b)) == det(a) * det(b)


@given(st.integers(1, 4).flatmap(square))
def test_inverse(m):
    if det(m) == 0:
        with pytest.raises(ZeroDivisionError):
            inv_det(m)
        return
    inv, d = inv_det(m)
    assert d == det(m)
    assert matmul(m, inv) == identity(len(m))


def test_solve_rational_system():
    m = [[2, 1], [1, 3]]
    x = solve(m, [Fraction(1), Fraction(2)])
    assert x == [Fraction(1, 5), Fraction(3, 5)]


@settings(max_examples=60)
@given(st.integers(1, 4).flatmap(lambda r: st.lists(st.lists(small, min_size=3, max_size=3),
                                                    min_size=r, max_size=r)))
def test_hnf_shape(m):
    h, u = hnf(m)
    assert matmul(u, m) == h
    assert abs(det(u)) == 1
    assert rank(h) == rank(m)
    col = -1
    for row in h:
        if not any(row):
            continue
        piv = next(j for j, x in enumerate(row) if x)
        assert piv > col and row[piv] > 0
        col = piv


@settings(max_examples=40)
@given(square(2))
def test_quotient_reps_are_a_transversal(m):
    if det(m) == 0:
        with pytest.raises(SingularMatrix):
            quotient_reps(m)
        return
    q = quotient_reps(m)
    assert len(q) == abs(det(m))
    inv, _ = inv_det(m)
    # two reps never differ by a lattice vector
    reps = list(q.reps)
    for a, b in product(reps[:12], reps[:12]):
        if a != b:
            diff = [x - y for x, y in zip(a, b)]
            coords = [sum(r * d for r, d in zip(row, diff)) for row in inv]
            assert any(c.denominator != 1 for c in coords)
    # reduce lands on a representative in the same class
    for x in ([7, -3], [0, 0], [-11, 5]):
        r = q.reduce(x)
        assert r in set(reps)
        coords = [sum(a * (s - t) for a, s, t in zip(row, x, r)) for row in inv]
        assert all(c.denominator == 1 for c in coords)


def test_integer_span_membership_and_witness():
    span = IntegerSpan()
    span.add({"a": 2, "b": 4}, "g1")
    span.add({"a": 3, "c": 1}, "g2")
    target = {"a": 1, "b": -4, "c": 1}
    sol = span.solve(target)
    assert sol is not None
    total: dict = {}
    gens = {"g1": {"a": 2, "b": 4}, "g2": {"a": 3, "c": 1}}
    for lab, c in sol.items():
        for k, t in gens[lab].items():
            total[k] = total.get(k, 0) + c * t
    assert {k: t for k, t in total.items() if t} == target
    assert span.solve({"a": 1}) is None


def test_lattice_basis_and_primitive_vector():
    rows = lattice_basis([[Fraction(1, 2), 0], [0, 2], [Fraction(1, 2), 2]])
    assert abs(det(rows)) == 1
    assert primitive_vector([Fraction(2, 3), Fraction(-4, 3)]) == (1, -2)
    assert primitive_vector([0, 6, 9]) == (0, 2, 3)


def test_transpose():
    assert transpose([[1, 2, 3], [4, 5, 6]]) == [[1, 4], [2, 5], [3, 6]]
