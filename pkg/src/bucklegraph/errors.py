"""Exception hierarchy shared across the package.

CLI exit codes map onto these groups: configuration problems exit 2,
missing/stale upstream artifacts exit 3, numerical failures exit 4.
"""


class BucklegraphError(Exception):
    """Base class for all package-specific errors."""


class GenerationError(BucklegraphError):
    """Geometry resample budget exhausted for a (kind, seed) slot."""


class AmbiguousSampleError(BucklegraphError):
    """Simulation ended in an exact left/right tie; sample must be regenerated."""


class SolverFailure(BucklegraphError):
    """Newton solve could not complete; carries the last converged state."""

    def __init__(self, message, last_state=None):
        super().__init__(message)
        self.last_state = last_state


class InvertedElementError(SolverFailure):
    """An element reached non-positive Jacobian (det F <= 0)."""


class UnsupportedRepresentationError(BucklegraphError):
    """Requested graph representation does not exist for this geometry family."""


class EmptyStructureError(BucklegraphError):
    """No structure-associated superpixels survived feature extraction."""


class NumericalFailure(BucklegraphError):
    """Non-finite value encountered during training."""


class ConfigError(BucklegraphError):
    """Pipeline configuration failed to parse or validate."""


class UpstreamArtifactError(BucklegraphError):
    """A required artifact from an earlier stage is missing."""


class StalenessError(UpstreamArtifactError):
    """Upstream artifact was produced under a different configuration."""
