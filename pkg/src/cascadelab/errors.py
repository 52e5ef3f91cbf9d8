"""Exception types shared across the package."""
from __future__ import annotations


class ParameterError(ValueError):
    """A model parameter lies outside its valid domain."""


class UnsupportedRegimeError(ValueError):
    """The requested analysis does not apply at these parameters.

    Raised by the stage decomposition when the walk geometry has no
    usable stage structure (weight ordering wrong, or zero stages).
    """


class UndecidedRateError(RuntimeError):
    """Too many Monte Carlo trials hit the step cap without absorbing."""
