"""Exception types shared across the package.

Every domain failure raises one of these so callers (and the CLI) can
distinguish physics degeneracies from programming errors.
"""

from __future__ import annotations


class EprSimError(Exception):
    """Base class for all domain errors raised by this package."""


class StateError(EprSimError):
    """Invalid state construction (bad tuples, labels, or weights)."""


class NormalizationError(StateError):
    """State norm or mixture weights outside the 1e-9 tolerance."""


class CutoffError(StateError):
    """Total-photon cutoff too small for the requested truncation tail."""


class UnknownModeError(StateError):
    """A mode label that is not part of the state's layout."""


class StateFileError(StateError):
    """JSON state file failed to parse or validate."""


class ZeroCoincidence(EprSimError):
    """Coincidence denominator <(n_a1+n_b1)(n_a2+n_b2)> vanishes."""


class ZeroIntensity(EprSimError):
    """A mean photon number needed for normalization vanishes."""


class DegenerateLO(EprSimError):
    """Optimal local-oscillator amplitudes are undefined (<n1 n2> = 0)."""


class CatDegenerate(EprSimError):
    """Cat-state formulas are singular at this (alpha, phi)."""


class ZeroDenominator(EprSimError):
    """Classical ensemble intensity-product mean vanishes."""


class OptimizerShortfall(EprSimError):
    """Numeric Bell maximization fell below the analytic value: a bug."""
