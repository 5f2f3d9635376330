"""Exception types shared across the simulation chain."""


class ParameterDomainError(ValueError):
    """A parameter lies outside the domain an operation accepts."""


class WindowOverrunError(ParameterDomainError):
    """The delayed pulse does not fit inside the receive window."""


class BoundaryError(RuntimeError):
    """The matched-filter peak has no neighbour on one side."""


class FlatPeakError(RuntimeError):
    """The three points around the peak have zero curvature."""


class ExchangeError(RuntimeError):
    """A time-transfer exchange aborted; the caller may retry.

    The underlying channel or estimator error is chained as ``__cause__``.
    """


class ConfigValidationError(ValueError):
    """Raised with the list of offending config fields."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(f"{k}: {v}" for k, v in self.problems))

    @property
    def fields(self):
        return [k for k, _ in self.problems]
