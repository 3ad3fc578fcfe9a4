from typing import Optional


class HeatTraceError(ValueError):
    """Base error. `field` names the offending input where there is one."""

    def __init__(self, message: str, field: Optional[str] = None):
        super().__init__(message)
        self.field = field

    def to_record(self) -> dict:
        return {
            "error": type(self).__name__,
            "message": str(self),
            "field": self.field,
        }


class MalformedSpec(HeatTraceError):
    pass


class NonPositiveEigenvalue(HeatTraceError):
    pass


class NonIncreasingEigenvalues(HeatTraceError):
    pass


class RootInIndexSet(HeatTraceError):
    pass


class PoleAt(HeatTraceError):
    def __init__(self, pole, message: Optional[str] = None):
        super().__init__(message or f"pole at s = {pole}", field="s")
        self.pole = pole


class DomainError(HeatTraceError):
    pass


class NotTraceClass(HeatTraceError):
    pass


class TolError(HeatTraceError):
    pass


class OutsideHalfPlane(HeatTraceError):
    pass


class UnsupportedClass(HeatTraceError):
    pass


class DepthInsufficient(HeatTraceError):
    pass


class NotAPole(HeatTraceError):
    pass


class RadiusTooSmall(HeatTraceError):
    pass


class PoleOnLine(HeatTraceError):
    pass


class NonIntegrableLine(HeatTraceError):
    pass


class InsufficientData(HeatTraceError):
    pass


class UnknownName(HeatTraceError):
    pass


class NoContinuation(HeatTraceError):
    pass
