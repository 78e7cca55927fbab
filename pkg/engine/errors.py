"""
Exception hierarchy shared by every engine module.

The CLI maps ConfigValidationError to exit code 1 and every other
DynamicBarrierError to exit code 2.
"""
from typing import Optional


class DynamicBarrierError(Exception):
    pass


class ConfigValidationError(DynamicBarrierError, ValueError):
    def __init__(
        self,
        message: str,
        field: Optional[str] = None,
        line: Optional[int] = None,
        column: Optional[int] = None,
    ):
        self.message = message
        self.field = field
        self.line = line
        self.column = column
        prefix = ""
        if line is not None:
            prefix += f"line {line}, column {column}: " if column is not None else f"line {line}: "
        if field:
            prefix += f"{field}: "
        super().__init__(prefix + message)


class BarrierDomainError(DynamicBarrierError, ValueError):
    pass


class ClosedChannelError(DynamicBarrierError):
    pass


class SingularityError(DynamicBarrierError):
    pass


class MatchingError(DynamicBarrierError):
    pass


class BesselRangeError(DynamicBarrierError):
    pass


class StabilityError(DynamicBarrierError):
    pass


class GeometryError(DynamicBarrierError):
    pass


class VerificationError(DynamicBarrierError):
    pass
