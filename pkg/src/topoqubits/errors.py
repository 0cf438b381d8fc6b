"""Exception hierarchy shared by the simulation modules and the CLI."""


class TopoQubitsError(Exception):
    """Base class for all package errors."""


class InvalidSpecError(TopoQubitsError, ValueError):
    """A parameter set violates its documented invariants."""


class SizeLimitError(TopoQubitsError, ValueError):
    """Requested full-Hilbert-space operator is beyond the oracle scale."""


class NumericalError(TopoQubitsError, ArithmeticError):
    """Base for numerical failures (CLI exit code 3)."""


class NonConvergenceError(NumericalError):
    pass


class NotHermitianError(TopoQubitsError, ValueError):
    pass


class NoEdgeModeError(TopoQubitsError, LookupError):
    pass


class InsufficientSupportError(TopoQubitsError, ValueError):
    pass


class StepSizeError(NumericalError):
    """Norm drift exceeded the stepper tolerance; retry with a smaller dt."""


class NeverCrossedError(TopoQubitsError, LookupError):
    pass


class BranchTrackingError(NumericalError):
    def __init__(self, message: str, sample_index: int):
        super().__init__(message)
        self.sample_index = sample_index


class MissingStatesError(TopoQubitsError, ValueError):
    pass


class DegenerateLevelsError(NumericalError):
    pass


class InconsistentDoubletError(NumericalError):
    pass


class ConfigError(TopoQubitsError, ValueError):
    """Malformed run configuration (CLI exit code 2)."""
