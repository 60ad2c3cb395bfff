import random
from fractions import Fraction
from itertools import product

import pytest

from shintani.conegeom import (
    Cone,
    PerturbationVector,
    cocycle_defect,
    cq_combo,
    cq_decomposition,
    cq_eval,
    face_weights,
    hill_constant,
    parallelepiped_points,
    signed_fundamental_domain,
    wedge,
)
from shintani.errors import DegenerateQ
from shintani.exactmath import det, inv_det, matvec, transpose
from shintani.fixtures import fixture_field, fixture_units
from shintani.verify import _generic_q, random_invertible

I2 = [[1, 0], [0, 1]]


def test_cq_eval_examples():
    assert cq_eval(I2, PerturbationVector([1, 1]), [0, 0]) == 1
    assert cq_eval(I2, PerturbationVector([1, -1]), [0, 0]) == 0
    assert cq_eval(I2, PerturbationVector([1, -1]), [0, 5]) == 1


def test_face_weights_example():
    fw = face_weights(I2, PerturbationVector([1, -1]))
    assert fw[{0, 1}] == 1 and fw[{1}] == 1
    assert fw[{0}] == 0 and fw[set()] == 0
    fw = face_weights([[2, 1], [1, 3]], PerturbationVector([5, 5]))
    assert all(fw.weights.values())


def test_degenerate_q_is_reported():
    with pytest.raises(DegenerateQ):
        cq_eval(I2, PerturbationVector([1, 0]), [1, 1])


def _face_sum(cols, Q, w):
    return cq_combo(cols, Q).evaluate(w)


def test_face_weights_match_pointwise_values():
    rng = random.Random(11)
    for _ in range(15):
        n = rng.choice([2, 3])
        cols = transpose(random_invertible(rng, n, -3, 3))
        Q = _generic_q(rng, n)
        for _ in range(100):
            # half the samples land on faces of the cone
            coeffs = [rng.choice([0, 0, 1, 2, Fraction(1, 3), -1]) for _ in range(n)]
            if rng.random() < 0.5:
                w = [sum(c * col[i] for c, col in zip(coeffs, cols)) for i in range(n)]
            else:
                w = [Fraction(rng.randint(-9, 9), rng.randint(1, 4)) for _ in range(n)]
            assert cq_eval(cols, Q, w) == _face_sum(cols, Q, w)


def test_limit_characterization():
    rng = random.Random(5)
    for _ in range(10):
        n = rng.choice([2, 3])
        cols = transpose(random_invertible(rng, n, -3, 3))
        Q = PerturbationVector([Fraction(rng.randint(-50, 50) or 1, rng.randint(1, 30))
                                for _ in range(n)])
        try:
            face_weights(cols, Q)
        except DegenerateQ:
            continue
        sinv, _ = inv_det(transpose(cols))
        for coeffs in product([-1, 0, 1], repeat=n):
            w = [sum(c * col[i] for c, col in zip(coeffs, cols)) for i in range(n)]
            vals = []
            for k in range(20, 40):
                eps = Fraction(1, 2**k)
                pt = [a + eps * q for a, q in zip(w, Q.rational)]
                vals.append(int(all(x > 0 for x in matvec(sinv, pt))))
            assert vals[-1] == vals[-2]
            assert cq_eval(cols, Q, w) == vals[-1]


def test_q_scaling_invariance():
    rng = random.Random(2)
    cols = [[2, 1], [-1, 3]]
    Q = PerturbationVector([Fraction(3, 7), Fraction(-2, 5)])
    Q2 = Q.scaled(Fraction(9, 4))
    assert face_weights(cols, Q).weights == face_weights(cols, Q2).weights
    for _ in range(30):
        w = [rng.randint(-6, 6) for _ in range(2)]
        assert cq_eval(cols, Q, w) == cq_eval(cols, Q2, w)


def test_cocycle_relation_example():
    combo = cocycle_defect([[1, 0], [1, 1], [0, 1]], PerturbationVector([2, 3]))
    for p in ([2, 1], [1, 1], [5, 2]):
        assert combo.evaluate(p) == 0
    assert not cocycle_defect([[1], [2]], PerturbationVector([1]))


def test_cocycle_relation_positive_orthant():
    rng = random.Random(8)
    for _ in range(20):
        n = rng.choice([2, 3])
        vecs = [[rng.randint(1, 6) for _ in range(n)] for _ in range(n + 1)]
        Q = _generic_q(rng, n)
        try:
            combo = cocycle_defect(vecs, Q)
        except DegenerateQ:
            continue
        for _ in range(40):
            p = [Fraction(rng.randint(-8, 8), rng.randint(1, 3)) for _ in range(n)]
            assert combo.evaluate(p) == 0


def test_cocycle_defect_is_the_hill_constant():
    # outside the positive orthant the relation holds modulo wedges: the
    # defect is the constant function d(v_0, ..., v_n)
    rng = random.Random(9)
    seen = set()
    for _ in range(40):
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
        seen.add(const)
        for _ in range(20):
            p = [Fraction(rng.randint(-8, 8), rng.randint(1, 3)) for _ in range(n)]
            assert combo.evaluate(p) == const
    assert {0, 1, -1} <= seen


def test_wedge_covers_a_half_space():
    combo = wedge([[1, 0], [0, 1]])
    assert combo.evaluate([-3, 1]) == 1
    assert combo.evaluate([0, 2]) == 1
    assert combo.evaluate([5, -1]) == 0
    assert len(combo.terms) == 3


def test_parallelepiped_examples():
    diag = [[2, 0], [0, 1]]
    assert parallelepiped_points(diag, [0, 1], [0, 0]) == [(1, 1), (2, 1)]
    assert parallelepiped_points(I2, [], [0, 0]) == [(0, 0)]
    assert parallelepiped_points(I2, [], [Fraction(1, 2), 0]) == []
    half = Fraction(1, 2)
    assert parallelepiped_points(I2, [0, 1], [half, half]) == [(half, half)]


def test_decomposition_example():
    pieces = cq_decomposition(I2, PerturbationVector([1, 1]), [0, 0])
    assert sorted((sorted(I), a) for a, I in pieces) == [
        ([], (0, 0)), ([0], (1, 0)), ([0, 1], (1, 1)), ([1], (0, 1))]


def test_decomposition_is_a_partition():
    rng = random.Random(4)
    for _ in range(8):
        cols = transpose(random_invertible(rng, 2, -3, 3))
        Q = _generic_q(rng, 2)
        v = [Fraction(rng.randint(0, 2), 3), Fraction(rng.randint(0, 1), 2)]
        pieces = cq_decomposition(cols, Q, v)
        box = 5
        counts: dict = {}
        for a, I in pieces:
            idx = sorted(I)
            for ms in product(range(40), repeat=len(idx)):
                pt = tuple(a[r] + sum(m * cols[i][r] for m, i in zip(ms, idx)) for r in range(2))
                if all(abs(x) <= box for x in pt):
                    counts[pt] = counts.get(pt, 0) + 1
        assert all(c == 1 for c in counts.values())
        direct = set()
        for x in product(range(-box - 1, box + 2), repeat=2):
            pt = tuple(Fraction(s) + t for s, t in zip(x, v))
            if all(abs(c) <= box for c in pt) and cq_eval(cols, Q, pt):
                direct.add(pt)
        assert set(counts) == direct


def test_signed_domain_golden():
    field = fixture_field("D5")
    units = fixture_units(field)
    dom = signed_fundamental_domain(units, field.power_basis())
    assert [coef for coef, _, _ in dom.pieces] == [1]
    assert dom.orbit_sum(3 + field.theta()) == 1


def test_cone_normalization():
    assert Cone([[2, 4], [0, 3]]) == Cone([[0, 1], [1, 2]])
    assert Cone([[1, 1]]).contains([3, 3]) and not Cone([[1, 1]]).contains([3, 2])
