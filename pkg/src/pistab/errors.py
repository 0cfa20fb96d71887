"""Exception hierarchy. Every error carries a short machine-readable code."""

from __future__ import annotations


class PistabError(Exception):
    code = "E_PISTAB"


class InvalidSpec(PistabError, ValueError):
    code = "E_INVALID_SPEC"


class StructureError(PistabError, ValueError):
    """Shapes, quivers or lengths do not fit together."""

    code = "E_STRUCTURE"


class QuiverMismatch(StructureError):
    code = "E_QUIVER_MISMATCH"


class ProjectionFailed(PistabError):
    code = "E_PROJECTION_FAILED"


class BoundExceeded(PistabError):
    code = "E_BOUND_EXCEEDED"


class DomainError(PistabError, ValueError):
    code = "E_DOMAIN"


class MasslessCharge(PistabError, ArithmeticError):
    code = "E_MASSLESS"


class RefinementExhausted(PistabError):
    code = "E_REFINEMENT_EXHAUSTED"


class ZeroRank(PistabError, ZeroDivisionError):
    code = "E_ZERO_RANK"


class NormalizationError(PistabError, ValueError):
    code = "E_NORMALIZATION"


class NotClosed(PistabError, ValueError):
    code = "E_NOT_CLOSED"


class NumericalFailure(PistabError, ArithmeticError):
    code = "E_NUMERICAL"


class ChargeMismatch(PistabError, ValueError):
    code = "E_CHARGE_MISMATCH"


class ConfigError(PistabError):
    code = "E_CONFIG"

    def __init__(self, message: str, path: str = "/", code: str | None = None):
        super().__init__(message)
        self.path = path
        if code is not None:
            self.code = code
