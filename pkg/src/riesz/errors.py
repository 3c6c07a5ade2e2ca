"""Exception hierarchy.

Validation problems derive from ``ValueError``; numerical failures derive from
``ArithmeticError``. The CLI maps the two families to exit codes 2 and 3.
"""


class RieszValueError(ValueError):
    """Invalid input: bad parameters, malformed shape, excluded case."""


class PoleError(RieszValueError):
    """Argument sits on a pole (gamma at 0, -1, -2, ...)."""


class DomainError(RieszValueError):
    """Argument outside the supported domain."""


class BoundaryPointError(RieszValueError):
    """Regularized potential requested at a boundary point with lambda <= 0."""


class ShapeError(RieszValueError):
    """Shape description violates a constructor invariant."""


class NumericalError(ArithmeticError):
    """A numerical procedure failed to produce a trustworthy value."""


class DivergenceError(NumericalError):
    """A series was evaluated where it diverges."""


class ConvergenceError(NumericalError):
    """An iterative procedure hit its iteration cap."""
