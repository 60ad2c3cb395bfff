import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shintani.errors import SchemaError
from shintani.exactmath import det, matmul
from shintani.fixtures import CUBIC_MINPOLY, fixture_field, fixture_units
from shintani.numfield import (
    FieldLattice,
    TotallyRealField,
    UnitSystem,
    adapted_basis,
    degree_one_primes,
    fundamental_unit_quadratic,
    quadratic_field,
    regulator_sign,
    rho_w,
    sign_det_embeddings,
    trace_dual_basis,
    units_congruent_one,
)

GOLDEN = TotallyRealField([-1, -1, 1])
THETA = GOLDEN.theta()
CUBIC = TotallyRealField(CUBIC_MINPOLY)

coords = st.lists(st.fractions(min_value=-9, max_value=9, max_denominator=7), min_size=2, max_size=2)


def test_arithmetic_examples():
    assert THETA.trace() == 1
    assert THETA.norm() == -1
    assert THETA * THETA == THETA + 1
    assert (4 - THETA).norm() == 11


def test_signs_at_embeddings():
    assert THETA.sign_at(1) == -1
    assert THETA.sign_at(2) == 1
    assert GOLDEN.zero().sign_at(1) == 0


@given(coords, coords)
def test_trace_additive_norm_multiplicative(a, b):
    x, y = GOLDEN.elem(a), GOLDEN.elem(b)
    assert (x + y).trace() == x.trace() + y.trace()
    assert (x * y).norm() == x.norm() * y.norm()


def test_signs_agree_with_interval_evaluation():
    rng = random.Random(7)
    for _ in range(500):
        field = GOLDEN if rng.random() < 0.5 else CUBIC
        x = field.elem([Fraction(rng.randint(-30, 30), rng.randint(1, 9)) for _ in range(field.n)])
        for j in range(1, field.n + 1):
            with mpmath.workprec(100):
                val = x.embed(j, 100)
            if abs(val) > mpmath.mpf(2) ** -80:
                assert x.sign_at(j) == (1 if val > 0 else -1)


def test_trace_dual_basis():
    w = GOLDEN.power_basis()
    dual = trace_dual_basis(w)
    assert dual == [(3 - THETA) / 5, (2 * THETA - 1) / 5]
    assert [x.trace() for x in dual] == [1, 0]
    assert trace_dual_basis(dual) == w
    for i in range(2):
        for j in range(2):
            assert (w[i] * dual[j]).trace() == (i == j)


def test_rho_w():
    w = GOLDEN.power_basis()
    assert rho_w(THETA + 1, w) == [[1, 1], [1, 2]]
    assert rho_w(GOLDEN.one(), w) == [[1, 0], [0, 1]]
    rng = random.Random(3)
    for field in (GOLDEN, CUBIC):
        w = field.power_basis()
        units = fixture_units(field).units
        for _ in range(10):
            u = units[rng.randrange(len(units))] ** rng.randint(-2, 2)
            v = units[rng.randrange(len(units))] ** rng.randint(-2, 2)
            assert rho_w(u * v, w) == matmul(rho_w(u, w), rho_w(v, w))
            assert det(rho_w(u, w)) == u.norm()


def test_fundamental_units():
    assert fundamental_unit_quadratic(GOLDEN) == THETA + 1
    q3 = TotallyRealField([-3, 0, 1])
    assert fundamental_unit_quadratic(q3) == 2 + q3.theta()
    for d in (5, 8, 12, 13, 17):
        u = fundamental_unit_quadratic(quadratic_field(d))
        assert u.norm() == 1 and u.is_totally_positive()


def test_quadratic_field_uses_the_maximal_order():
    assert quadratic_field(8) == TotallyRealField([-2, 0, 1])
    assert quadratic_field(12) == TotallyRealField([-3, 0, 1])
    assert quadratic_field(5) == GOLDEN
    assert quadratic_field(13) == TotallyRealField([-3, -1, 1])


def test_units_congruent_one():
    units = UnitSystem([THETA + 1])
    assert units_congruent_one(units, FieldLattice.ring(GOLDEN)).units == (THETA + 1,)
    f = FieldLattice.principal(2 * THETA - 1)
    sub = units_congruent_one(units, f)
    assert sub.units == (3 * THETA + 2,)
    assert units_congruent_one(sub, f).units == sub.units


def test_regulator_sign():
    assert regulator_sign(UnitSystem([THETA + 1])) == -1
    assert regulator_sign(UnitSystem([(THETA + 1).inverse()])) == 1
    e1, e2 = fixture_units(CUBIC).units
    assert regulator_sign(UnitSystem([e1, e2])) == -regulator_sign(UnitSystem([e2, e1]))


def test_sign_det_embeddings_flips_with_swap():
    w = GOLDEN.power_basis()
    assert sign_det_embeddings(w) == -sign_det_embeddings(w[::-1])


def test_ideal_lattices():
    c = FieldLattice.principal(4 - THETA)
    assert c.volume() == 11
    ring = FieldLattice.ring(GOLDEN)
    assert ring.colon(c).volume() == Fraction(1, 11)
    assert (c * ring.colon(c)) == ring
    primes = degree_one_primes(GOLDEN, 11)
    assert len(primes) == 2 and c in primes
    assert degree_one_primes(GOLDEN, 7) == []


def test_adapted_basis_property():
    ring = FieldLattice.ring(GOLDEN)
    c = FieldLattice.principal(4 - THETA)
    sup = ring.colon(c)
    for twist in (None, [[1, 0], [0, -1]], [[1, 1], [11, 12]]):
        w = adapted_basis(ring, sup, 11, twist)
        assert FieldLattice(GOLDEN, w) == ring
        assert FieldLattice(GOLDEN, [w[0] / 11] + w[1:]) == sup


def test_reducible_minpoly_is_rejected():
    with pytest.raises(SchemaError, match="irreducibility"):
        TotallyRealField([-1, 0, 1])


def test_complex_roots_are_rejected():
    with pytest.raises(SchemaError, match="totally real"):
        TotallyRealField([1, 0, 1])


@settings(max_examples=20)
@given(st.sampled_from(["D5", "D8", "D12", "D13", "D17", "cubic49"]))
def test_fixture_units_are_totally_positive(name):
    field = fixture_field(name)
    for u in fixture_units(field):
        assert u.is_totally_positive() and abs(u.norm()) == 1
