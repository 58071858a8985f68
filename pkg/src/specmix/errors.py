"""Exception types shared across the package."""


class SpecmixError(Exception):
    """Base class for all specmix errors."""


class CapacityError(SpecmixError):
    """A configured enumeration or matrix-size cap was exceeded."""


class InvalidPinningError(SpecmixError):
    """A pinning references an unknown vertex or a colour outside its list."""


class InfeasibleError(SpecmixError):
    """No proper list colouring exists under the given constraints."""


class NotReversibleError(SpecmixError):
    """Detailed balance fails beyond tolerance for the supplied weights."""


class ParameterError(SpecmixError):
    """A formula argument lies outside its stated domain."""


class ContractError(SpecmixError):
    """Inputs violate the structural precondition of an operation."""
