"""Exception hierarchy shared across the package."""

from __future__ import annotations


class VortexlabError(Exception):
    """Base class for all package-specific failures."""


class ValidationError(VortexlabError, ValueError):
    """Invalid state or argument (non-finite values, shape mismatch, ...)."""


class SingularEvaluationError(VortexlabError):
    """Exact kernel evaluated at zero separation with no desingularization."""


class CoincidentVorticesError(VortexlabError):
    """Two point vortices occupy the same position."""


class ZeroTotalCirculationError(VortexlabError):
    """Operation requires a nonzero total circulation."""


class CollisionAbortError(VortexlabError):
    """Integration aborted: pairwise separation fell below the floor."""

    def __init__(self, time: float, pair: tuple[int, int], separation: float):
        self.time = time
        self.pair = pair
        self.separation = separation
        super().__init__(
            f"near-collision at t={time:g}: vortices {pair} at separation {separation:.3e}"
        )


class StepSizeUnderflowError(VortexlabError):
    """Adaptive step size shrank below the representable minimum."""


class NonConvergenceError(VortexlabError):
    """Iterative solver failed to reach its target residual."""

    def __init__(self, message: str, residual: float):
        self.residual = residual
        super().__init__(f"{message} (final residual {residual:.3e})")


class DegenerateConfigurationError(VortexlabError):
    """Configuration is collinear, equilateral, or otherwise degenerate."""


class BlowUpError(VortexlabError):
    """Particle speed exceeded the configured guard bound."""


class SnapshotFormatError(VortexlabError):
    """Snapshot or checkpoint file is missing, corrupt, or wrong version."""
