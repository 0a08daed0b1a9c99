"""Exception hierarchy.

Every error raised by the library derives from :class:`CohDistError`, which
is itself a ``ValueError`` so callers that only care about bad input can
catch the builtin.
"""

from __future__ import annotations

from dataclasses import dataclass


class CohDistError(ValueError):
    pass


@dataclass(frozen=True)
class Violation:
    """One violated bound found while validating a state."""

    kind: str  # NotHermitian | NotPSD | TraceNotOne | NotNormalized
    magnitude: float
    bound: float

    def __str__(self) -> str:
        return f"{self.kind}: magnitude {self.magnitude:.3e} exceeds bound {self.bound:.1e}"


class StateValidationError(CohDistError):
    """Raised when a matrix or vector is not a valid quantum state.

    All violations are collected before raising, so a matrix that is both
    non-PSD and not unit trace reports both.
    """

    def __init__(self, violations: list[Violation]):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))

    @property
    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}


class DimMismatch(CohDistError):
    pass


class IncompleteKrausSet(CohDistError):
    pass


class InvalidKrausSet(CohDistError):
    pass


class ZeroProbability(CohDistError):
    pass


class NegativeWeight(CohDistError):
    pass


class MassMismatch(CohDistError):
    pass


class IncompleteEnsemble(CohDistError):
    pass


class BlockNotPure(CohDistError):
    pass


class ZeroBlock(CohDistError):
    pass


class InvalidPartition(CohDistError):
    pass


class DimensionTooLarge(CohDistError):
    pass


class InvalidThreshold(CohDistError):
    pass


class BlockNotPureWarning(UserWarning):
    """Emitted when a connected component of the unit-entry graph had to be split."""
