"""Exception types shared across the toolkit."""


class KoszulKitError(Exception):
    """Base class for all toolkit errors."""


class InputError(KoszulKitError):
    """Malformed or inconsistent user input (CLI exit code 2)."""


class DegreeOverflowError(KoszulKitError):
    """Operation would leave the computed truncation window."""


class WellDefinednessError(KoszulKitError):
    """The candidate derivation does not descend to the quadratic dual."""


class CdgaInvariantError(KoszulKitError):
    """A curved dga axiom (Leibniz, d(c)=0, d^2=[c,-]) fails exactly."""


class CurvedInputError(KoszulKitError):
    """Operation requires curvature c = 0."""


class InconsistentDataError(KoszulKitError):
    """Objects built from different presentations or deformations."""


class NonFreeComponentError(KoszulKitError):
    """A free-complex operation was given a non-free complex."""


class NotCofreeError(KoszulKitError):
    """A cofree-complex operation was given a module with no cofree decomposition."""


class MissingWeightsError(KoszulKitError):
    """Regrading requires integer weights on every basis vector."""
