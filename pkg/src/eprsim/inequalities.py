"""Bell/CHSH combinations, bound classification, and boundary curves.

The CHSH quantity uses the sign pattern

    B = E(t1, t2) - E(t1', t2) + E(t1, t2') + E(t1', t2')

With the two-cosine correlation E = A1 cos(t1 - t2 + xi)
+ A2 cos(t1 + t2 + zeta) the maximum of |B| over all settings is
2 sqrt(2) sqrt(A1^2 + A2^2). ``bell_max`` finds it by a brute grid search
over the four phases plus local refinement, and checks the search against
that closed form — falling short signals a bug, not a physics result.

Bounds on the amplitude pair (first quadrant):
    stochastic-field:  A1 <= 1/2 and A2 <= 1/2
    Bell (local):      A1^2 + A2^2 <= 1/2      (equivalent to b_max <= 2)
    Tsirelson:         A1^2 + A2^2 <= 1
    quantum states:    A1 + A2 <= 1             (= 1 for perfect correlation)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .correlation import CorrelationAmplitudes, amplitudes, predict_E
from .errors import OptimizerShortfall, StateError
from .network import PhaseSetting

BOUND_TOL = 1e-9
SHORTFALL_TOL = 1e-4

__all__ = [
    "BellSettings",
    "BellMaxResult",
    "InequalityReport",
    "bell_B",
    "bell_max",
    "classify",
    "figure3_boundaries",
    "REGION_LABELS",
]

REGION_LABELS = ("classical", "nonclassical-local", "bell-violating", "unphysical")


@dataclass(frozen=True)
class BellSettings:
    """Two analyzer phases per station: (theta1, theta1p) x (theta2, theta2p)."""

    theta1: float
    theta1p: float
    theta2: float
    theta2p: float


@dataclass(frozen=True)
class BellMaxResult:
    b_max: float
    settings: BellSettings
    analytic: float


@dataclass(frozen=True)
class InequalityReport:
    """Margins against every bound; positive margin = inside the bound."""

    a1: float
    a2: float
    region: str
    epr_boundary: bool
    stochastic_margin: float
    bell_margin: float
    tsirelson_margin: float
    quantum_margin: float
    b_max: float
    bell_ok: bool


def _coerce_amps(source) -> CorrelationAmplitudes:
    if isinstance(source, CorrelationAmplitudes):
        return source
    return amplitudes(source)


def bell_B(source, settings: BellSettings) -> float:
    """CHSH combination of four correlation values."""
    amps = _coerce_amps(source)
    e = lambda t1, t2: predict_E(amps, PhaseSetting(t1, t2))
    return (
        e(settings.theta1, settings.theta2)
        - e(settings.theta1p, settings.theta2)
        + e(settings.theta1, settings.theta2p)
        + e(settings.theta1p, settings.theta2p)
    )


def _b_grid(amps: CorrelationAmplitudes, n: int) -> tuple[float, np.ndarray]:
    """Best B on an n^4 grid over the settings torus."""
    t = 2.0 * math.pi * np.arange(n) / n
    e = amps.a1 * np.cos(t[:, None] - t[None, :] + amps.xi) + amps.a2 * np.cos(
        t[:, None] + t[None, :] + amps.zeta
    )  # e[i, k] = E(t_i, t_k)
    b = (
        e[:, None, :, None]    # E(t1, t2)
        - e[None, :, :, None]  # E(t1', t2)
        + e[:, None, None, :]  # E(t1, t2')
        + e[None, :, None, :]  # E(t1', t2')
    )
    flat = int(np.argmax(b))  # first maximum = lexicographically smallest settings
    i, j, k, l = np.unravel_index(flat, b.shape)
    return float(b[i, j, k, l]), np.array([t[i], t[j], t[k], t[l]])


def bell_max(source, grid_points: int = 24) -> BellMaxResult:
    """Maximize B over settings; verified against 2 sqrt(2) |A|."""
    amps = _coerce_amps(source)
    analytic = 2.0 * math.sqrt(2.0) * math.hypot(amps.a1, amps.a2)
    _, x0 = _b_grid(amps, grid_points)

    def neg_b(x):
        return -bell_B(amps, BellSettings(*x))

    res = minimize(
        neg_b,
        x0,
        method="Nelder-Mead",
        options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 4000, "maxfev": 8000},
    )
    b_best = -float(res.fun)
    if b_best < analytic - SHORTFALL_TOL:
        raise OptimizerShortfall(
            f"numeric Bell maximum {b_best!r} fell below analytic {analytic!r}"
        )
    settings = BellSettings(*(float(v) for v in res.x))
    return BellMaxResult(b_max=b_best, settings=settings, analytic=analytic)


def classify(amps: CorrelationAmplitudes, state_b_max: float) -> InequalityReport:
    """Place an amplitude pair in the bound geometry.

    The three bound regions (classical, bell-violating, unphysical) do not
    tile the quadrant: a pair can exceed an individual A_k <= 1/2 bound
    while staying inside the Bell circle. That gap is labeled
    ``nonclassical-local`` so every pair gets exactly one region.
    """
    a1, a2 = float(amps.a1), float(amps.a2)
    circle = a1 * a1 + a2 * a2
    total = a1 + a2
    if total > 1.0 + BOUND_TOL:
        region = "unphysical"
    elif circle > 0.5 + BOUND_TOL:
        region = "bell-violating"
    elif a1 <= 0.5 + BOUND_TOL and a2 <= 0.5 + BOUND_TOL:
        region = "classical"
    else:
        region = "nonclassical-local"
    return InequalityReport(
        a1=a1,
        a2=a2,
        region=region,
        epr_boundary=abs(total - 1.0) <= BOUND_TOL,
        stochastic_margin=0.5 - max(a1, a2),
        bell_margin=0.5 - circle,
        tsirelson_margin=1.0 - circle,
        quantum_margin=1.0 - total,
        b_max=float(state_b_max),
        bell_ok=state_b_max <= 2.0 + BOUND_TOL,
    )


def figure3_boundaries(samples_per_curve: int) -> list[tuple[str, float, float]]:
    """First-quadrant samples of the four bound curves.

    Curves: ``quantum`` (a1 + a2 = 1), ``bell`` (a1^2 + a2^2 = 1/2),
    ``stochastic`` (outer edge of the [0, 1/2]^2 box), ``tsirelson``
    (a1^2 + a2^2 = 1). With an odd sample count the midpoint of the first
    three curves lands exactly on (1/2, 1/2), where they intersect.
    """
    m = int(samples_per_curve)
    if m < 2:
        raise StateError("figure3_boundaries needs samples_per_curve >= 2")
    rows: list[tuple[str, float, float]] = []
    for i in range(m):
        s = i / (m - 1)
        rows.append(("quantum", s, 1.0 - s))
    r_bell = math.sqrt(0.5)
    for i in range(m):
        t = 0.5 * math.pi * i / (m - 1)
        rows.append(("bell", r_bell * math.cos(t), r_bell * math.sin(t)))
    for i in range(m):
        s = i / (m - 1)
        rows.append(("stochastic", min(s, 0.5), min(1.0 - s, 0.5)))
    for i in range(m):
        t = 0.5 * math.pi * i / (m - 1)
        rows.append(("tsirelson", math.cos(t), math.sin(t)))
    return rows
