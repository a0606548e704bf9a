"""Exception types raised by the rlnc_tdd package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class PolicyInfeasibleError(ValueError):
    """A policy sends fewer packets than the dofs missing in some state."""


class UnboundedSearchError(RuntimeError):
    """The integer policy search kept hitting its upper bound."""


class ShapeError(ValueError):
    """Packet or payload dimensions do not match the coding block."""
