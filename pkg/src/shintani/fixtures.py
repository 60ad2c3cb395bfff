"""Built-in fields with units, for the command line and the test suites."""

from __future__ import annotations

from .numfield import (
    TotallyRealField,
    UnitSystem,
    fundamental_unit_quadratic,
    quadratic_field,
)

__all__ = ["FIXTURES", "fixture_field", "fixture_units", "CUBIC_MINPOLY", "CUBIC_UNITS"]

# x^3 + x^2 - 2x - 1, the cubic field of discriminant 49
CUBIC_MINPOLY = [-1, -2, 1, 1]
# theta^2 and (theta + 1)^2, a basis of the totally positive units
CUBIC_UNITS = [[0, 0, 1], [1, 2, 1]]

FIXTURES = {
    "D5": 5,
    "D8": 8,
    "D12": 12,
    "D13": 13,
    "D17": 17,
    "cubic49": None,
}


def fixture_field(name: str) -> TotallyRealField:
    if name not in FIXTURES:
        raise KeyError("unknown fixture %r" % name)
    d = FIXTURES[name]
    if d is None:
        return TotallyRealField(CUBIC_MINPOLY, name=name)
    return quadratic_field(d)


def fixture_units(field: TotallyRealField) -> UnitSystem:
    """Totally positive units for a built-in field (quadratic ones are computed)."""
    if field.n == 2:
        return UnitSystem([fundamental_unit_quadratic(field)])
    if list(field.minpoly) == CUBIC_MINPOLY:
        return UnitSystem([field.elem(c) for c in CUBIC_UNITS])
    raise KeyError("no stored units for this field")
