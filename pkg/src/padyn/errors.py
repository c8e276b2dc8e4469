"""Exception hierarchy shared by every module."""

from __future__ import annotations


class PadicError(Exception):
    """Base class for all errors raised by padyn."""


class NotIntegral(PadicError):
    """A value that must lie in Z_p has negative p-adic valuation."""


class InsufficientPrecision(PadicError):
    """Not enough p-adic digits are known to certify the requested result."""


class NotSelfMap(PadicError):
    """The polynomial does not map Z_p into Z_p."""


class NotLocallyScaling(PadicError):
    """Common base for the two ways radius detection can fail."""


class ContractionDetected(NotLocallyScaling):
    """The map strictly contracts some ball, so it cannot be locally scaling.

    ``coset`` is the offending ``(depth, residue)`` pair and ``valuation`` the
    valuation of the derivative there (positive means |f'| < 1).
    """

    def __init__(self, message: str, coset: tuple[int, int], valuation: int):
        super().__init__(message)
        self.coset = coset
        self.valuation = valuation


class NotLocallyScalingUpToDepth(NotLocallyScaling):
    """No depth up to the configured cap satisfies the per-coset criterion."""


class NotStationary(PadicError):
    """A row vector fails v = vA."""


class NegativeEntry(PadicError):
    """A row vector that must be nonnegative has a negative entry."""


class NotStochastic(PadicError, ValueError):
    """A matrix has a negative entry or a row that does not sum to 1."""


class NotRealizable(PadicError):
    """A stochastic matrix lacks the row structure of a transition matrix."""


class RealizationDepthExceeded(PadicError):
    """Polynomial realization did not verify below the truncation-degree cap."""


class EmptyCylinder(PadicError):
    """The requested word is inadmissible; its preimage has measure zero."""


class InternalInconsistency(PadicError):
    """Two independent routes to the same fact disagree (an implementation bug)."""


class ParseError(PadicError, ValueError):
    """The polynomial expression could not be parsed."""
