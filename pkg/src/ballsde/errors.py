"""Exception types shared across the package.

Everything raised on purpose derives from :class:`BallSdeError` so callers can
catch package-level failures with a single except clause while still letting
programming errors (TypeError and friends) propagate.
"""

from __future__ import annotations


class BallSdeError(Exception):
    """Base class for all errors raised deliberately by this package."""


class ConfigError(BallSdeError):
    """A configuration file or parameter set failed validation."""


class InfeasibleError(BallSdeError):
    """A requested quantity does not exist for the given model.

    Raised e.g. when asking for a boundary-shell width at an exponent the
    model cannot support, or for a coupling-rate bound below the uniqueness
    threshold.
    """


class HypothesisViolation(BallSdeError):
    """Input data falls outside the structural assumptions of an estimator.

    Used by the general-domain decomposition when the drift has no inward
    normal component, so the normal/tangential split is ill-conditioned.
    """
