"""Exception types raised by the ultralola package."""


class UltraLoLaError(Exception):
    """Base class for all package errors."""


class NoSignChange(UltraLoLaError, ValueError):
    """The bracket endpoints do not straddle a root."""


class NoConvergence(UltraLoLaError, RuntimeError):
    """An iterative solver ran out of iterations."""


class IndivisibleDimensions(UltraLoLaError, ValueError):
    """Feature dimension is not a multiple of the number of classes."""


class EmptyFusion(UltraLoLaError, ValueError):
    """Average pooling was asked to fuse zero feature vectors."""


class InfeasibleDeadline(UltraLoLaError, ValueError):
    """No packet length fits within the deadline."""


class TargetUnreachable(UltraLoLaError, ValueError):
    """No feasible packet length meets the requested decoding-error target."""


class DomainViolation(UltraLoLaError, ValueError):
    """A continuous surrogate was evaluated outside its domain."""


class ConfigError(UltraLoLaError, ValueError):
    """Malformed or invalid experiment configuration."""
