"""
Exceptions raised by the simulation toolkit
Management commands map ConfigError to exit code 2 and every other
EpomError to exit code 3
"""


class EpomError(Exception):
    """Base class for every domain error of the toolkit"""


class InvalidStateError(EpomError, ValueError):
    """A field state or derivative contains NaN/Inf"""


class DomainError(EpomError, ValueError):
    """Parameters outside the domain where an operation is defined"""


class ConvergenceError(EpomError):
    """A steady state was required but the solver did not converge"""

    def __init__(self, message, steady_state=None):
        super().__init__(message)
        self.steady_state = steady_state


class IntegrationError(EpomError):
    """Time integration failed (step-size underflow or non-finite state)"""

    def __init__(self, message, last_good_time=0.0):
        super().__init__(f'{message} (last good time t={last_good_time:.6g})')
        self.last_good_time = last_good_time


class InsufficientDataError(EpomError, ValueError):
    """A time series is too short for the requested analysis"""


class ConfigError(EpomError, ValueError):
    """
    Invalid run configuration
    `diagnostics` holds one 'section.field: message' string per problem
    """

    def __init__(self, diagnostics):
        if isinstance(diagnostics, str):
            diagnostics = [diagnostics]
        self.diagnostics = list(diagnostics)
        super().__init__('; '.join(self.diagnostics))
