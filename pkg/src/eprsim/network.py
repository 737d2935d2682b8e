"""Passive linear optics: phase shifters, 50:50 beamsplitters, networks.

Beamsplitter convention
-----------------------
Output operators (c, d) relate to inputs (a, b) with the phase applied to
the b arm *before* the mixing:

    c = (a + e^{i theta} b) / sqrt(2)
    d = (-a + e^{i theta} b) / sqrt(2)

Here the phase is kept as a separate ``phase_shift`` element and
``beamsplitter`` implements the theta = 0 mixing. On creation operators
the inverse map used to transform kets is

    a^dag = (c^dag - d^dag) / sqrt(2)
    b^dag = (c^dag + d^dag) / sqrt(2)

which is unitary and photon-number conserving, so a state inside the total
cutoff stays inside it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import StateError
from .fock import (
    AnyState,
    MixedState,
    ModeLayout,
    MultiModeState,
    relabel,
    reorder,
    tensor,
    vacuum,
    _canonicalize,
)

__all__ = [
    "PhaseSetting",
    "phase_shift",
    "beamsplitter",
    "epr_split_network",
    "two_photon_network",
]


@dataclass(frozen=True)
class PhaseSetting:
    """Analyzer phases for the two measurement stations."""

    theta1: float
    theta2: float


def phase_shift(state: AnyState, mode: str, theta: float):
    """Multiply each ket by e^{i n theta} for the photon count n in ``mode``."""
    if isinstance(state, MixedState):
        return state.map_components(lambda s: phase_shift(s, mode, theta))
    col = state.layout.index(mode)
    phases = np.exp(1j * float(theta) * state._occ[:, col])
    # occupations are untouched, so canonical order is preserved
    return MultiModeState._from_canonical(state.layout, state._occ, state._amp * phases)


@lru_cache(maxsize=None)
def _sector_matrix(n: int) -> np.ndarray:
    """Number-sector matrix of the 50:50 splitter.

    Column k is the input ket with k photons in a (n-k in b); row j the
    output ket with j photons in c (n-j in d). Entries follow from
    expanding (c^dag - d^dag)^k (c^dag + d^dag)^{n-k} via a polynomial
    convolution, with factorial normalization.
    """
    lg = [math.lgamma(i + 1) for i in range(n + 1)]
    mat = np.zeros((n + 1, n + 1), dtype=np.float64)
    scale = 2.0 ** (-0.5 * n)
    for k in range(n + 1):
        # coefficients of (x - 1)^k and (x + 1)^{n-k} in powers of x,
        # where x stands for c^dag and the constant for d^dag
        pa = np.array([math.comb(k, i) * (-1.0) ** (k - i) for i in range(k + 1)])
        pb = np.array([float(math.comb(n - k, i)) for i in range(n - k + 1)])
        conv = np.convolve(pa, pb)  # coefficient of (c^dag)^j (d^dag)^{n-j}
        for j in range(n + 1):
            norm = math.exp(0.5 * (lg[j] + lg[n - j] - lg[k] - lg[n - k]))
            mat[j, k] = scale * conv[j] * norm
    return mat


def beamsplitter(state: AnyState, mode_a: str, mode_b: str):
    """Apply the 50:50 splitter to (mode_a, mode_b); outputs reuse the labels.

    mode_a carries the c output (symmetric combination on the ket side),
    mode_b the d output.
    """
    if isinstance(state, MixedState):
        return state.map_components(lambda s: beamsplitter(s, mode_a, mode_b))
    layout = state.layout
    ia, ib = layout.index(mode_a), layout.index(mode_b)
    if ia == ib:
        raise StateError("beamsplitter needs two distinct modes")
    occ, amp = state._occ, state._amp
    # total-photon cutoff: the pair sector n = n_a + n_b never exceeds it,
    # so every output occupation stays representable
    sector = occ[:, ia] + occ[:, ib]
    k_in = occ[:, ia]
    occ_chunks = []
    amp_chunks = []
    for n in np.unique(sector):
        sel = sector == n
        group_occ = occ[sel]
        group_amp = amp[sel]
        mat = _sector_matrix(int(n))          # (n+1, n+1)
        out = mat[:, k_in[sel]] * group_amp[None, :]   # (n+1, G)
        g = group_occ.shape[0]
        rows = np.repeat(group_occ, n + 1, axis=0)
        js = np.tile(np.arange(n + 1, dtype=np.int64), g)
        rows[:, ia] = js
        rows[:, ib] = n - js
        occ_chunks.append(rows)
        amp_chunks.append(out.T.ravel())
    occ_out = np.vstack(occ_chunks)
    amp_out = np.concatenate(amp_chunks)
    occ_out, amp_out = _canonicalize(layout, occ_out, amp_out)
    return MultiModeState._from_canonical(layout, occ_out, amp_out)


def epr_split_network(state: AnyState, input_mode: str = "a") -> AnyState:
    """Split one input beam into the four analyzer arms (a1, b1, a2, b2).

    Three 50:50 splitters with vacuum at every unused port: the input is
    divided between the two stations, then each half is divided between
    that station's two arms.
    """
    if isinstance(state, MixedState):
        return state.map_components(lambda s: epr_split_network(s, input_mode))
    if state.layout.n_modes != 1:
        raise StateError("epr_split_network expects a single-mode input state")
    s = relabel(state, {state.layout.labels[0]: "a1"})
    s = tensor(s, vacuum(("b1", "a2", "b2")))
    s = beamsplitter(s, "a1", "a2")   # input -> station halves
    s = beamsplitter(s, "a1", "b1")   # station 1 half -> its two arms
    s = beamsplitter(s, "a2", "b2")   # station 2 half -> its two arms
    return s


def two_photon_network(cutoff: int = 2) -> MultiModeState:
    """Two independent single photons, one split across each station.

    Photon 1 enters the (a1, a2) splitter, photon 2 the (b1, b2) splitter;
    the result is reported on the standard (a1, b1, a2, b2) ordering.
    """
    if cutoff < 2:
        raise StateError("two photons need cutoff >= 2")
    half = cutoff // 2
    # inject through the symmetric port so each split carries + signs
    one_a = MultiModeState(ModeLayout(("a1", "a2"), half), {(0, 1): 1.0})
    one_b = MultiModeState(ModeLayout(("b1", "b2"), cutoff - half), {(0, 1): 1.0})
    s = tensor(beamsplitter(one_a, "a1", "a2"), beamsplitter(one_b, "b1", "b2"))
    return reorder(s, ("a1", "b1", "a2", "b2"))
