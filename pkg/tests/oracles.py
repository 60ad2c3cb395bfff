"""Independent reference values, computed without the package under test.

Dedekind zeta values of real quadratic fields at negative integers factor as
zeta(-k) L(-k, chi_D), and both factors are generalized Bernoulli numbers.
"""

from __future__ import annotations

from fractions import Fraction

import sympy


def bernoulli_poly_value(m: int, x: Fraction) -> Fraction:
    t = sympy.Symbol("t")
    val = sympy.bernoulli(m, t).subs(t, sympy.Rational(x.numerator, x.denominator))
    return Fraction(int(val.p), int(val.q))


def kronecker(d: int, a: int) -> int:
    """Kronecker symbol (d / a) for a fundamental discriminant d, a > 0."""
    result = 1
    for p, e in sympy.factorint(a).items():
        if p == 2:
            if d % 2 == 0:
                return 0
            s = 1 if d % 8 in (1, 7) else -1
        else:
            r = pow(d % p, (p - 1) // 2, p)
            s = 0 if d % p == 0 else (1 if r == 1 else -1)
        result *= s**e
    return result


def generalized_bernoulli(m: int, d: int) -> Fraction:
    f = abs(d)
    total = Fraction(0)
    for a in range(1, f + 1):
        c = kronecker(d, a)
        if c:
            total += c * bernoulli_poly_value(m, Fraction(a, f))
    return Fraction(f) ** (m - 1) * total


def riemann_zeta_neg(k: int) -> Fraction:
    return -bernoulli_poly_value(k + 1, Fraction(1)) / (k + 1)


def dirichlet_l_neg(k: int, d: int) -> Fraction:
    return -generalized_bernoulli(k + 1, d) / (k + 1)


def quadratic_zeta_neg(k: int, d: int) -> Fraction:
    """zeta_F(-k) for F = Q(sqrt d), d the field discriminant."""
    return riemann_zeta_neg(k) * dirichlet_l_neg(k, d)


def hurwitz_neg(k: int, a: Fraction) -> Fraction:
    """zeta(-k, a) = -B_{k+1}(a) / (k+1) for 0 < a <= 1."""
    return -bernoulli_poly_value(k + 1, a) / (k + 1)


def cubic7_zeta_neg(k: int) -> Fraction:
    """zeta_F(-k) for the cubic field of conductor 7, as zeta(-k) L(-k, chi) L(-k, chi^2).

    chi is the character of order 3 mod 7 with chi(3) = exp(2 pi i / 3).
    """
    omega = sympy.exp(2 * sympy.pi * sympy.I / 3)
    total = sympy.Integer(1)
    for power in (1, 2):
        chi = {pow(3, j, 7): omega ** (power * j) for j in range(6)}
        b = sum(chi[a] * sympy.bernoulli(k + 1, sympy.Rational(a, 7)) for a in range(1, 7))
        total *= -sympy.Integer(7) ** k * b / (k + 1)
    val = sympy.nsimplify(sympy.expand(sympy.simplify(total)))
    return riemann_zeta_neg(k) * Fraction(int(val.p), int(val.q))


if __name__ == "__main__":
    for k in range(4):
        print(k, quadratic_zeta_neg(k, 5), cubic7_zeta_neg(k))
    print(dirichlet_l_neg(0, -3) * dirichlet_l_neg(0, -4))
