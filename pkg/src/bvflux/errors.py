"""Exception types shared across the package."""


class BVFluxError(Exception):
    """Base class for all package-specific errors."""


class InvalidInputError(BVFluxError):
    """Non-finite or structurally malformed input."""


class RootFindError(BVFluxError):
    """A bracketed scalar solve failed to converge or to bracket."""


class InvariantViolationError(BVFluxError):
    """A discrete invariant the scheme guarantees was violated at runtime."""


class UnsupportedReferenceError(BVFluxError):
    """An exact solution was requested at a time it is not available."""


class ConfigError(BVFluxError):
    """Run configuration is missing, malformed, or inconsistent."""
