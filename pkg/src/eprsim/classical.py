"""Monte Carlo over nonnegative coherent-amplitude distributions.

A classical (stochastic-field) model assigns each detection arm a complex
field amplitude drawn from a joint distribution that is an honest
probability density — point masses and Gaussians here, nothing more
singular. The correlation amplitudes then become moment ratios of the
fields,

    a1 = 2 |E[conj(alpha1) beta1 alpha2 conj(beta2)]|
         / E[(|alpha1|^2 + |beta1|^2)(|alpha2|^2 + |beta2|^2)]

(and a2 with the station-2 conjugation swapped). The pointwise inequality
|a|^2 + |b|^2 >= 2|a b| forces a_k <= 1/2 for every such model, which the
estimators here verify empirically with bootstrap standard errors.

Sampling is chunked with per-chunk child seeds and compensated summation,
so estimates are deterministic for a given seed and independent of chunk
evaluation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import StateError, ZeroDenominator

CHUNK = 1 << 15
BOOTSTRAP_RESAMPLES = 200

__all__ = [
    "ClassicalEnsemble",
    "AmplitudeEstimate",
    "BoundReport",
    "make_ensemble",
    "estimate_amplitudes",
    "bound_report",
    "pointwise_margin",
]


@dataclass(frozen=True)
class ClassicalEnsemble:
    """Weighted field samples (alpha_k for signals, beta_k for oscillators)."""

    weights: np.ndarray
    alpha1: np.ndarray
    alpha2: np.ndarray
    beta1: np.ndarray
    beta2: np.ndarray
    seed: int
    generator_id: str

    def __post_init__(self) -> None:
        n = self.weights.shape[0]
        for name in ("alpha1", "alpha2", "beta1", "beta2"):
            arr = getattr(self, name)
            if arr.shape != (n,):
                raise StateError(f"{name} has shape {arr.shape}, expected ({n},)")
            if not np.all(np.isfinite(arr.real)) or not np.all(np.isfinite(arr.imag)):
                raise StateError(f"{name} contains non-finite values")
        if np.any(self.weights < 0.0):
            raise StateError("negative sample weight")
        total = math.fsum(self.weights.tolist())
        if abs(total - 1.0) > 1e-9:
            raise StateError(f"sample weights sum to {total!r}, not 1")

    @property
    def n(self) -> int:
        return int(self.weights.shape[0])


@dataclass(frozen=True)
class AmplitudeEstimate:
    a1_hat: float
    a2_hat: float
    se1: float
    se2: float
    n: int
    seed: int


@dataclass(frozen=True)
class BoundReport:
    """a_k against the 1/2 bound, with 3-sigma statistical slack."""

    within_bound1: bool
    within_bound2: bool
    margin1: float
    margin2: float


def _thermal_field(rng: np.random.Generator, nbar: float, n: int) -> np.ndarray:
    """Circular complex Gaussian with E|z|^2 = nbar."""
    if nbar == 0.0:
        return np.zeros(n, dtype=np.complex128)
    sigma = math.sqrt(nbar / 2.0)
    z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return sigma * z


def _gen_chunks(kind: str, params: dict, n: int, seed: int):
    """Yield (alpha1, alpha2, beta1, beta2) chunk arrays, deterministically."""
    start = 0
    chunk_index = 0
    while start < n:
        size = min(CHUNK, n - start)
        rng = np.random.default_rng([seed, chunk_index])
        if kind == "thermal":
            nbar = params["nbar"]
            a1 = _thermal_field(rng, nbar, size)
            a2 = _thermal_field(rng, nbar, size)
            b1 = _thermal_field(rng, params.get("nbar_lo", nbar), size)
            b2 = _thermal_field(rng, params.get("nbar_lo", nbar), size)
        elif kind == "correlated_lo":
            nbar = params["nbar"]
            a1 = _thermal_field(rng, nbar, size)
            a2 = _thermal_field(rng, nbar, size)
            b1 = a1.copy()
            b2 = a2.copy()
        else:
            raise StateError(f"unknown sampled ensemble kind {kind!r}")
        yield a1, a2, b1, b2
        start += size
        chunk_index += 1


def make_ensemble(kind: str, params: dict, n: int, seed: int) -> ClassicalEnsemble:
    """Draw a weighted field ensemble.

    Kinds:
      delta         one point mass at params["point"] = (a1, a2, b1, b2)
      thermal       independent circular Gaussians, E|z|^2 = params["nbar"]
                    per arm (oscillator arms may override with "nbar_lo")
      correlated_lo thermal signals with beta_k = alpha_k sample by sample
      mixture       params["components"] = [(weight, kind, params), ...]
    """
    if n < 1:
        raise StateError("need n >= 1 samples")
    seed = int(seed)
    if kind == "delta":
        point = params["point"]
        if len(point) != 4:
            raise StateError("delta ensemble needs a 4-amplitude point")
        vals = [np.array([complex(v)]) for v in point]
        return ClassicalEnsemble(
            weights=np.array([1.0]),
            alpha1=vals[0],
            alpha2=vals[1],
            beta1=vals[2],
            beta2=vals[3],
            seed=seed,
            generator_id="delta",
        )
    if kind == "mixture":
        comps = params["components"]
        if not comps:
            raise StateError("mixture needs at least one component")
        wsum = math.fsum(float(w) for w, _, _ in comps)
        if wsum <= 0.0 or any(float(w) < 0.0 for w, _, _ in comps):
            raise StateError("mixture weights must be nonnegative with positive sum")
        parts = []
        for idx, (w, sub_kind, sub_params) in enumerate(comps):
            sub = make_ensemble(sub_kind, sub_params, n, seed + 1000 * (idx + 1))
            parts.append((float(w) / wsum, sub))
        return ClassicalEnsemble(
            weights=np.concatenate([w * e.weights for w, e in parts]),
            alpha1=np.concatenate([e.alpha1 for _, e in parts]),
            alpha2=np.concatenate([e.alpha2 for _, e in parts]),
            beta1=np.concatenate([e.beta1 for _, e in parts]),
            beta2=np.concatenate([e.beta2 for _, e in parts]),
            seed=seed,
            generator_id="mixture(" + ",".join(e.generator_id for _, e in parts) + ")",
        )
    if kind in ("thermal", "correlated_lo"):
        a1s, a2s, b1s, b2s = [], [], [], []
        for a1, a2, b1, b2 in _gen_chunks(kind, params, n, seed):
            a1s.append(a1)
            a2s.append(a2)
            b1s.append(b1)
            b2s.append(b2)
        return ClassicalEnsemble(
            weights=np.full(n, 1.0 / n),
            alpha1=np.concatenate(a1s),
            alpha2=np.concatenate(a2s),
            beta1=np.concatenate(b1s),
            beta2=np.concatenate(b2s),
            seed=seed,
            generator_id=f"{kind}(nbar={params.get('nbar')!r})",
        )
    raise StateError(f"unknown ensemble kind {kind!r}")


def _moment_terms(e: ClassicalEnsemble):
    """Per-sample numerator terms (both conjugations) and the denominator."""
    num1 = np.conj(e.alpha1) * e.beta1 * e.alpha2 * np.conj(e.beta2)
    num2 = np.conj(e.alpha1) * e.beta1 * np.conj(e.alpha2) * e.beta2
    den = (np.abs(e.alpha1) ** 2 + np.abs(e.beta1) ** 2) * (
        np.abs(e.alpha2) ** 2 + np.abs(e.beta2) ** 2
    )
    return num1, num2, den


def _weighted_fsum(weights: np.ndarray, values: np.ndarray) -> float:
    """Order-independent compensated sum of weights * values (real)."""
    parts = []
    start = 0
    prod = weights * values
    while start < prod.shape[0]:
        parts.append(math.fsum(prod[start : start + CHUNK].tolist()))
        start += CHUNK
    return math.fsum(parts)


def _ratio_estimates(weights, num1, num2, den) -> tuple[float, float]:
    d = _weighted_fsum(weights, den)
    if d <= 0.0:
        raise ZeroDenominator(f"intensity-product mean {d!r} is not positive")
    m1 = complex(_weighted_fsum(weights, num1.real), _weighted_fsum(weights, num1.imag))
    m2 = complex(_weighted_fsum(weights, num2.real), _weighted_fsum(weights, num2.imag))
    return 2.0 * abs(m1) / d, 2.0 * abs(m2) / d


def _fast_ratios(num1, num2, den) -> tuple[float, float]:
    """Uniform-weight ratio estimates with plain sums (bootstrap inner loop)."""
    d = float(np.sum(den))
    if d <= 0.0:
        raise ZeroDenominator(f"intensity-product mean {d!r} is not positive")
    return 2.0 * abs(complex(np.sum(num1))) / d, 2.0 * abs(complex(np.sum(num2))) / d


def estimate_amplitudes(e: ClassicalEnsemble) -> AmplitudeEstimate:
    """Moment-ratio estimates with nonparametric bootstrap standard errors.

    The bootstrap (200 resamples) is seeded from the ensemble seed, so the
    whole estimate is reproducible bit for bit.
    """
    num1, num2, den = _moment_terms(e)
    a1_hat, a2_hat = _ratio_estimates(e.weights, num1, num2, den)
    n = e.n
    if n == 1:
        return AmplitudeEstimate(a1_hat, a2_hat, 0.0, 0.0, n, e.seed)
    rng = np.random.default_rng([e.seed, 0xB00])
    uniform = bool(np.allclose(e.weights, 1.0 / n))
    boot1 = np.empty(BOOTSTRAP_RESAMPLES)
    boot2 = np.empty(BOOTSTRAP_RESAMPLES)
    for b in range(BOOTSTRAP_RESAMPLES):
        if uniform:
            idx = rng.integers(0, n, size=n)
        else:
            idx = rng.choice(n, size=n, p=e.weights)
        b1, b2 = _fast_ratios(num1[idx], num2[idx], den[idx])
        boot1[b] = b1
        boot2[b] = b2
    return AmplitudeEstimate(
        a1_hat=a1_hat,
        a2_hat=a2_hat,
        se1=float(np.std(boot1, ddof=1)),
        se2=float(np.std(boot2, ddof=1)),
        n=n,
        seed=e.seed,
    )


def bound_report(est: AmplitudeEstimate) -> BoundReport:
    """Check a_k <= 1/2 with 3 standard errors of slack."""
    return BoundReport(
        within_bound1=est.a1_hat <= 0.5 + 3.0 * est.se1,
        within_bound2=est.a2_hat <= 0.5 + 3.0 * est.se2,
        margin1=0.5 - est.a1_hat,
        margin2=0.5 - est.a2_hat,
    )


def pointwise_margin(e: ClassicalEnsemble) -> float:
    """Worst-case margin of |a|^2 + |b|^2 >= 2|a b| over samples and stations.

    Mathematically the margin is (|a| - |b|)^2 >= 0; the returned value can
    dip an ulp below zero only through rounding.
    """
    margins = []
    for sig, lo in ((e.alpha1, e.beta1), (e.alpha2, e.beta2)):
        lhs = np.abs(sig) ** 2 + np.abs(lo) ** 2
        rhs = 2.0 * np.abs(sig) * np.abs(lo)
        margins.append(float(np.min(lhs - rhs)))
    return min(margins)
