"""Exception types shared across the toolkit."""


class HardycompError(Exception):
    """Base class for toolkit errors."""


class SymbolSyntaxError(HardycompError, ValueError):
    def __init__(self, message, position):
        super().__init__(f"{message} at position {position}")
        self.position = position


class ParameterRangeError(HardycompError, ValueError):
    pass


class SelfMapError(HardycompError, ValueError):
    pass


class BoundaryTraceError(HardycompError, ValueError):
    """Raised when a boundary value cannot be produced for a symbol."""


class DegreeOverflowError(HardycompError, ValueError):
    pass


class ConvergenceError(HardycompError, RuntimeError):
    pass


class NoLowerBoundError(HardycompError, ValueError):
    pass


class PreconditionError(HardycompError, ValueError):
    pass
