"""BPSK over AWGN and block-Rayleigh channels, LLR generation and
discretization of the Rayleigh SNR distribution.

SNR convention used throughout the package: unit-energy BPSK symbols
(bit 0 -> +1, bit 1 -> -1) and noise variance ``sigma2 = 10**(-snr_db/10)``,
so ``snr = 1/sigma2`` and the channel LLR is ``2*y/sigma2``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

SeedLike = Union[int, np.random.Generator, np.random.SeedSequence, None]


def noise_variance(snr_db: float) -> float:
    return 10.0 ** (-snr_db / 10.0)


def db_to_linear(snr_db):
    return 10.0 ** (np.asarray(snr_db, dtype=float) / 10.0)


def linear_to_db(snr):
    return 10.0 * np.log10(snr)


@dataclass(frozen=True)
class AwgnSpec:
    snr_db: float


@dataclass(frozen=True)
class RayleighSpec:
    """Block Rayleigh fading with average SNR ``avg_snr_db``.

    ``state_snr_db`` / ``state_prob`` hold a discretization of the SNR
    distribution (see :func:`discretize_rayleigh`); the simulator ignores them
    and draws a continuous exponential SNR per frame.
    """
    avg_snr_db: float
    state_snr_db: tuple[float, ...]
    state_prob: tuple[float, ...]

    def __post_init__(self):
        if len(self.state_snr_db) != len(self.state_prob) or not self.state_prob:
            raise ValueError("state lists must be nonempty and of equal length")
        if abs(sum(self.state_prob) - 1.0) > 1e-9:
            raise ValueError("state probabilities must sum to 1")
        if any(b <= a for a, b in zip(self.state_snr_db, self.state_snr_db[1:])):
            raise ValueError("state mean SNRs must be strictly increasing")

    @property
    def states(self) -> int:
        return len(self.state_prob)


ChannelSpec = Union[AwgnSpec, RayleighSpec]


def make_rng(seed: SeedLike, *spawn_key: int) -> np.random.Generator:
    """Generator for ``seed``, optionally on an independent child stream."""
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, np.random.SeedSequence):
        ss = seed
    else:
        ss = np.random.SeedSequence(seed)
    if spawn_key:
        ss = np.random.SeedSequence(ss.entropy, spawn_key=tuple(ss.spawn_key) + tuple(spawn_key))
    return np.random.default_rng(ss)


def bpsk(bits) -> np.ndarray:
    return 1.0 - 2.0 * (np.asarray(bits, dtype=np.float64))


def transmit(bits, spec: ChannelSpec, seed: SeedLike = None) -> tuple[np.ndarray, float]:
    """Send one frame; returns channel LLRs and the realized SNR in dB.

    Rayleigh is block fading: one power gain per call, known at the receiver.
    """
    bits = np.asarray(bits)
    if bits.size == 0:
        raise ValueError("nothing to transmit")
    rng = make_rng(seed)
    if isinstance(spec, AwgnSpec):
        snr_db = spec.snr_db
        amp = 1.0
    else:
        power = rng.exponential(1.0)
        amp = np.sqrt(power)
        snr_db = spec.avg_snr_db + (10 * np.log10(power) if power > 0 else -np.inf)
    sigma2 = noise_variance(spec.snr_db if isinstance(spec, AwgnSpec) else spec.avg_snr_db)
    y = amp * bpsk(bits) + rng.standard_normal(bits.shape) * np.sqrt(sigma2)
    return 2.0 * amp * y / sigma2, float(snr_db)


def discretize_rayleigh(avg_snr_db: float, states: int = 64) -> RayleighSpec:
    """Equiprobable-quantile discretization of the exponential SNR pdf.

    Boundaries are the ``s/S`` quantiles ``-g*log(1 - s/S)``; each state's
    representative SNR is its conditional mean.
    """
    if states < 1:
        raise ValueError("need at least one state")
    g = float(db_to_linear(avg_snr_db))
    q = np.arange(states + 1) / states
    with np.errstate(divide="ignore"):
        edges = -g * np.log1p(-q)
    # integral of x f(x) over [a, b] = (a + g) e^{-a/g} - (b + g) e^{-b/g}
    lo, hi = edges[:-1], edges[1:]
    upper = np.where(np.isinf(hi), 0.0, (hi + g) * np.exp(-np.where(np.isinf(hi), 0.0, hi) / g))
    mass = (lo + g) * np.exp(-lo / g) - upper
    prob = np.full(states, 1.0 / states)
    means = mass / prob
    return RayleighSpec(float(avg_snr_db), tuple(float(v) for v in linear_to_db(means)),
                        tuple(float(p) for p in prob))
