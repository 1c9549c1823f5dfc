"""Exceptions shared across the package."""


class ZeroSurvivalMass(Exception):
    """Raised when a conditional-belief update has zero normalizing mass.

    Means that, given the current belief and registration decision, a
    no-report outcome is impossible at this step.
    """


class NonConvergence(RuntimeError):
    """An iterative solver exceeded its iteration cap or lost contraction."""


class CapExceeded(RuntimeError):
    """A reachability enumeration grew past its configured cap."""
