"""Exception types shared across the package."""


class RankStoreError(Exception):
    """Base class for all package errors."""


class FieldMismatch(RankStoreError, ValueError):
    """Operands come from different fields."""


class SingularMatrix(RankStoreError, ValueError):
    pass


class InconsistentSystem(RankStoreError, ValueError):
    pass


class MalformedInput(RankStoreError, ValueError):
    """Wrong lengths, shapes or index sets."""


class InvalidPoints(RankStoreError, ValueError):
    """Evaluation points are not linearly independent over the base field."""


class DecodeFailure(RankStoreError):
    """No codeword lies within the guaranteed decoding radius."""


class InsufficientNodes(DecodeFailure):
    pass


class InfeasibleAdversary(RankStoreError, ValueError):
    """The adversary is too strong for the bound to be defined."""


class GroupUnrepairable(RankStoreError):
    """Too many failures inside one local group."""


class RepairFailure(RankStoreError):
    pass


class ScenarioError(RankStoreError, ValueError):
    """A scenario event violates a simulator invariant."""
