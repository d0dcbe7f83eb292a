"""Exception and warning classes shared by every module.

Each error carries a short machine-readable ``code`` that the CLI reports
in its JSON error document.
"""


class SLMinimalError(Exception):
    code = "error"

    def to_dict(self) -> dict:
        return {"error": self.code, "message": str(self)}


class BoundaryPoint(SLMinimalError, ValueError):
    code = "BoundaryPoint"


class WrongModel(SLMinimalError, ValueError):
    code = "WrongModel"


class DeterminantError(SLMinimalError, ValueError):
    code = "DeterminantError"


class IdealPole(SLMinimalError, ValueError):
    code = "IdealPole"


class NonpositiveRadius(SLMinimalError, ValueError):
    code = "NonpositiveRadius"


class NoConvergence(SLMinimalError, RuntimeError):
    code = "NoConvergence"


class NonFinite(SLMinimalError, FloatingPointError):
    code = "NonFinite"


class NoBracket(SLMinimalError, ValueError):
    code = "NoBracket"


class BadParameter(SLMinimalError, ValueError):
    code = "BadParameter"


class NewtonDiverged(SLMinimalError, RuntimeError):
    code = "NewtonDiverged"

    def __init__(self, message, trace=()):
        super().__init__(message)
        self.trace = list(trace)

    def to_dict(self) -> dict:
        d = super().to_dict()
        d["trace"] = self.trace
        return d


class BadBoundary(SLMinimalError, ValueError):
    code = "BadBoundary"


class DegenerateFiber(SLMinimalError, ValueError):
    code = "DegenerateFiber"


class InvalidCurve(SLMinimalError, ValueError):
    code = "InvalidCurve"


class TooManyVertices(SLMinimalError, ValueError):
    code = "TooManyVertices"


class OverlappingHorocycles(SLMinimalError, ValueError):
    code = "OverlappingHorocycles"


class InputFormatError(SLMinimalError, ValueError):
    code = "InputFormatError"


class NearSingularWarning(RuntimeWarning):
    """Evaluation requested within 1e-9 of a singular domain endpoint."""
