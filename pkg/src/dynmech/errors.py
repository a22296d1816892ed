"""Exception types shared across the package."""


class InfeasibleError(ValueError):
    """A program or tradeoff problem has no feasible point."""


class SolverLimitError(RuntimeError):
    """The LP solver hit its pivot cap before certifying a status."""


class ResourceLimitError(RuntimeError):
    """An exact enumeration would exceed the desk-scale size limit."""


class InvalidStateError(ValueError):
    """A policy was queried at a state outside its domain."""
