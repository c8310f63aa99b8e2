"""Exception hierarchy.

Parameter problems derive from :class:`ValueError`; everything that goes
wrong inside a numerical routine derives from :class:`NumericalError`.  The
command line maps the two families onto distinct exit codes.
"""


class ParameterError(ValueError):
    """An argument lies outside the domain of the operation."""


class NumericalError(RuntimeError):
    """Base class for failures of a numerical procedure."""


class QuadratureError(NumericalError):
    """Adaptive quadrature hit its subdivision cap before converging."""

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class SelectionError(NumericalError):
    """No candidate cutoff parameter satisfies the warp conditions."""

    def __init__(self, message, condition=None, delta=None):
        super().__init__(message)
        self.condition = condition
        self.delta = delta


class DegenerateMetricError(NumericalError):
    """A warping function vanishes where the metric must be non-degenerate."""


class StepSizeError(NumericalError):
    """The ODE integrator could not make progress."""

    def __init__(self, message, r=None):
        super().__init__(message)
        self.r = r


class OutOfRegimeError(NumericalError):
    """The soliton profile left the positive-curvature regime (w reached 0)."""

    def __init__(self, message, r=None):
        super().__init__(message)
        self.r = r


class BracketError(NumericalError):
    """Shooting could not bracket the requested cone angle."""

    def __init__(self, message, slope_range=None):
        super().__init__(message)
        self.slope_range = slope_range


class MonotonicityError(NumericalError):
    """The map from vertex curvature to cone angle was observed non-monotone."""


class ProfileTooShortError(NumericalError):
    """The integrated profile does not reach far enough for the request."""

    def __init__(self, message, estimates=None):
        super().__init__(message)
        self.estimates = estimates
