"""Exception types shared across the package."""

from __future__ import annotations


class MintError(Exception):
    """Base class for all errors raised by this package."""


class DuplicatePointsError(MintError):
    """Two or more sample points coincide exactly.

    Nearest-neighbour log-distances are undefined at zero, and coincident
    points signal data that is not absolutely continuous. Callers working
    with dirty (e.g. rounded) real data can opt in to a deterministic
    jitter; see :func:`mint.knn.jitter_points`.
    """

    def __init__(self, pairs):
        self.pairs = [(int(i), int(j)) for i, j in pairs]
        preview = ", ".join(f"{i}=={j}" for i, j in self.pairs[:5])
        more = "" if len(self.pairs) <= 5 else f" (+{len(self.pairs) - 5} more)"
        super().__init__(f"duplicate point rows: {preview}{more}")


class KTooLargeError(MintError):
    """Requested neighbour order k exceeds n-1."""


class DomainError(MintError):
    """Argument outside a function's mathematical domain."""


class InfeasibleSupportError(MintError):
    """Weight support has fewer points than active constraints."""


class IllConditionedError(MintError):
    """Weight constraint system too ill-conditioned to solve reliably."""


class SamplerDimensionMismatchError(MintError):
    """Marginal sampler dimension does not match the target block."""


class SingularDesignError(MintError):
    """Design matrix X has (numerically) rank-deficient X'X."""


class DegenerateResidualsError(MintError):
    """Residual scale estimate is zero; standardised residuals undefined."""
