"""Exception types shared across the package.

The split matters for the command-line front end: ConditionViolated and its
subclasses mean "the mathematics says no" (a named hypothesis fails) and map
to exit code 2, while everything else is an internal failure mapping to 1.
"""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class StructuralError(ValueError):
    """A container argument is malformed (wrong shape or mismatched lengths)."""


class ConfigError(ValueError):
    """A parameter config failed to parse or validate."""

    def __init__(self, message, line=None):
        if line is not None:
            message = "line %s: %s" % (line, message)
        super().__init__(message)
        self.line = line


class ConditionViolated(RuntimeError):
    """A construction hypothesis fails.

    ``failed`` lists the violated inequalities by name, e.g. "5/9 < 4kB".
    """

    def __init__(self, message, failed=None):
        super().__init__(message)
        self.failed = list(failed) if failed is not None else [message]


class FoldCrossedError(ConditionViolated):
    """The requested point lies past the fold where two branches meet."""


class BlockedFlowError(ConditionViolated):
    """A slow segment hits an equilibrium before reaching its target value."""


class NoConnectionError(ConditionViolated):
    """A matching equation has no root inside its admissible bracket."""


class DivergentIntegralError(DomainError):
    """An exponentially weighted integral violates its convergence condition."""


class ConvergenceError(RuntimeError):
    """An iterative solver failed; diagnostics are in the message."""


class IntervalTooShortError(ConvergenceError):
    """A boundary-value solve converged but the tails have not decayed.

    The solution satisfies the projected boundary conditions yet deviates
    from the rest state by more than the boundary tolerance, so the
    truncation interval must be enlarged.
    """


class TrackingError(RuntimeError):
    """Pulse tracking failed (no single dominant peak, or too few snapshots)."""


class PlotDataError(ValueError):
    """A data file handed to the plotter failed to parse.

    ``line`` is the 1-based line number of the offending row when known.
    """

    def __init__(self, message, line=None):
        if line is not None:
            message = "line %s: %s" % (line, message)
        super().__init__(message)
        self.line = line
