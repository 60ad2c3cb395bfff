"""Exception hierarchy.

Every error carries a short machine-readable ``code`` which the command line
front end copies into its result documents.
"""

from __future__ import annotations

__all__ = [
    "ShintaniError",
    "SingularMatrix",
    "DegenerateQ",
    "NotDense",
    "InsufficientTruncation",
    "AmbiguousB1",
    "NotSmoothable",
    "ScalingHitsEll",
    "SearchExhausted",
    "PrecisionCap",
    "PoleHit",
    "MissingClassData",
    "SchemaError",
]


class ShintaniError(Exception):
    code = "error"


class SingularMatrix(ShintaniError, ZeroDivisionError):
    code = "singular-matrix"


class DegenerateQ(ShintaniError):
    code = "degenerate-q"


class NotDense(ShintaniError):
    code = "not-dense"


class InsufficientTruncation(ShintaniError):
    code = "insufficient-truncation"


class AmbiguousB1(ShintaniError):
    code = "ambiguous-b1"


class NotSmoothable(ShintaniError):
    code = "not-smoothable"


class ScalingHitsEll(ShintaniError):
    code = "scaling-hits-ell"


class SearchExhausted(ShintaniError):
    code = "search-exhausted"


class PrecisionCap(ShintaniError):
    code = "precision-cap"


class PoleHit(ShintaniError, ZeroDivisionError):
    code = "pole-hit"


class MissingClassData(ShintaniError):
    code = "missing-class-data"


class SchemaError(ShintaniError, ValueError):
    code = "schema"
