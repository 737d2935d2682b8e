"""Local-oscillator measurement of a two-mode signal.

A two-mode signal on (a1, a2) is analyzed by mixing each arm with a
coherent local oscillator |beta_k e^{i theta_k}> on the station
beamsplitter. The correlation amplitudes then depend on the signal only
through three normalized coherence functions

    g11 = <a1^dag a2> / sqrt(<n1><n2>)        (first order, cross)
    g20 = <a1^dag a2^dag> / sqrt(<n1><n2>)    (anomalous)
    g22 = <a1^dag a2^dag a2 a1> / (<n1><n2>)  (intensity cross-correlation)

and, at the oscillator amplitudes maximizing the correlation
(beta1 beta2 = sqrt(<n1 n2>), beta1/beta2 = sqrt(<n1>/<n2>)),

    A1 = |g11| / (1 + sqrt(g22)),   A2 = |g20| / (1 + sqrt(g22)).

``homodyne_network_state`` builds the explicit four-mode state so the
closed form can be cross-checked against the full network correlators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .errors import DegenerateLO, StateError, ZeroIntensity
from .fock import (
    AnyState,
    MixedState,
    ModeLayout,
    MultiModeState,
    coherent_cutoff,
    make_coherent,
    normal_moment,
    reorder,
    tensor,
)

ZERO_TOL = 1e-12

__all__ = [
    "CoherenceFunctions",
    "LOConfig",
    "coherence_functions",
    "optimal_lo",
    "amplitudes_from_g",
    "homodyne_network_state",
]

SIGNAL_MODES = ("a1", "a2")


@dataclass(frozen=True)
class CoherenceFunctions:
    g11: complex
    g20: complex
    g22: float

    def __post_init__(self) -> None:
        if not (self.g22 >= 0.0 and math.isfinite(self.g22)):
            raise StateError(f"g22 must be finite and nonnegative, got {self.g22!r}")


@dataclass(frozen=True)
class LOConfig:
    """Real oscillator amplitudes; phases carry the measurement settings."""

    beta1: float
    beta2: float
    theta1: float = 0.0
    theta2: float = 0.0

    def __post_init__(self) -> None:
        if self.beta1 < 0.0 or self.beta2 < 0.0:
            raise StateError("oscillator amplitudes must be nonnegative")


def _check_signal(state: AnyState) -> None:
    labels = state.layout.labels
    if labels != SIGNAL_MODES:
        raise StateError(f"signal state must live on modes {SIGNAL_MODES}, got {labels}")


def coherence_functions(state: AnyState) -> CoherenceFunctions:
    """Normalized first/second order cross-coherences of the signal arms."""
    _check_signal(state)
    n1 = normal_moment(state, [("a1", 1, 1)]).real
    n2 = normal_moment(state, [("a2", 1, 1)]).real
    if n1 <= ZERO_TOL or n2 <= ZERO_TOL:
        raise ZeroIntensity(f"mean photon numbers ({n1!r}, {n2!r}) too small to normalize")
    scale = math.sqrt(n1 * n2)
    g11 = normal_moment(state, [("a1", 1, 0), ("a2", 0, 1)]) / scale
    g20 = normal_moment(state, [("a1", 1, 0), ("a2", 1, 0)]) / scale
    g22 = normal_moment(state, [("a1", 1, 1), ("a2", 1, 1)]).real / (n1 * n2)
    return CoherenceFunctions(g11=g11, g20=g20, g22=max(0.0, g22))


def optimal_lo(state: AnyState) -> tuple[float, float]:
    """Oscillator amplitudes maximizing the correlation:

    beta1 * beta2 = sqrt(<n1 n2>) and beta1 / beta2 = sqrt(<n1> / <n2>).
    """
    _check_signal(state)
    n1 = normal_moment(state, [("a1", 1, 1)]).real
    n2 = normal_moment(state, [("a2", 1, 1)]).real
    if n1 <= ZERO_TOL or n2 <= ZERO_TOL:
        raise ZeroIntensity(f"mean photon numbers ({n1!r}, {n2!r}) too small")
    nn = normal_moment(state, [("a1", 1, 1), ("a2", 1, 1)]).real
    if nn <= ZERO_TOL:
        raise DegenerateLO(
            f"<n1 n2> = {nn!r}: optimal oscillator amplitudes vanish "
            "(single shared photon between the arms)"
        )
    prod = math.sqrt(nn)
    ratio = math.sqrt(n1 / n2)
    beta1 = math.sqrt(prod * ratio)
    beta2 = math.sqrt(prod / ratio)
    return beta1, beta2


def amplitudes_from_g(g: CoherenceFunctions) -> tuple[float, float]:
    """Correlation amplitudes at the optimal oscillator setting."""
    denom = 1.0 + math.sqrt(g.g22)
    return abs(g.g11) / denom, abs(g.g20) / denom


def homodyne_network_state(
    state: AnyState, lo: LOConfig, lo_cutoff: Optional[int] = None
):
    """Four-mode state on (a1, b1, a2, b2): signal plus oscillators.

    The oscillator pair is a truncated two-mode coherent state; its cutoff
    defaults to the sizing rule for the combined amplitude
    sqrt(beta1^2 + beta2^2).
    """
    _check_signal(state)
    lam = math.sqrt(lo.beta1 ** 2 + lo.beta2 ** 2)
    if lo_cutoff is None:
        lo_cutoff = coherent_cutoff(lam)
    lo_pair = make_coherent(
        ModeLayout(("b1", "b2"), lo_cutoff),
        [
            lo.beta1 * complex(math.cos(lo.theta1), math.sin(lo.theta1)),
            lo.beta2 * complex(math.cos(lo.theta2), math.sin(lo.theta2)),
        ],
    )
    if isinstance(state, MixedState):
        return state.map_components(
            lambda s: reorder(tensor(s, lo_pair), ("a1", "b1", "a2", "b2"))
        )
    return reorder(tensor(state, lo_pair), ("a1", "b1", "a2", "b2"))
