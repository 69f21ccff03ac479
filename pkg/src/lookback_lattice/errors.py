"""Exception types shared across the package."""


class DomainError(ValueError):
    """An input lies outside the mathematical domain of the operation."""


class CapacityError(RuntimeError):
    """The requested problem size exceeds a configured resource limit."""


class DegenerateInputError(ValueError):
    """The input data cannot support the requested fit or extrapolation."""


class IntegerBarrierError(DomainError):
    """The fixed strike sits exactly on a lattice level, where the
    moving-strike construction is undefined; perturb n or the strike."""
