"""BPSK over AWGN: modulation, noise, LLR computation, Eb/N0 conversions.

Conventions: bit 0 maps to +1, bit 1 to -1, so the per-bit LLR is
2*y/sigma^2 and a positive received value demodulates to bit 0. Exactly
zero also demodulates to bit 0 so that runs are reproducible bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ChannelParams:
    """Noise level for one operating point; sigma2 = 1 / (rate * 10^(EbN0/10))."""

    ebn0_db: float
    rate: float
    sigma2: float

    @classmethod
    def from_ebn0(cls, ebn0_db: float, rate: float) -> "ChannelParams":
        return cls(ebn0_db=ebn0_db, rate=rate, sigma2=ebn0_to_sigma2(ebn0_db, rate))


@dataclass
class LlrBlock:
    """One received codeword's soft values, tagged with its stream position."""

    llrs: np.ndarray
    arrival_index: int = 0


def ebn0_to_sigma2(ebn0_db: float, rate: float) -> float:
    """Noise variance for a given Eb/N0 (dB) and code rate."""
    if rate <= 0:
        raise ValueError(f"rate must be positive, got {rate}")
    return 1.0 / (rate * 10.0 ** (ebn0_db / 10.0))


def modulate(codeword: np.ndarray) -> np.ndarray:
    """Map bits to antipodal symbols: 0 -> +1, 1 -> -1."""
    return 1.0 - 2.0 * np.asarray(codeword, dtype=np.float64)


def transmit(symbols: np.ndarray, sigma2: float, rng: np.random.Generator) -> np.ndarray:
    """Add i.i.d. Gaussian noise of variance sigma2; deterministic given rng state."""
    if sigma2 <= 0:
        raise ValueError(f"sigma2 must be positive, got {sigma2}")
    noise = rng.standard_normal(len(symbols)) * np.sqrt(sigma2)
    return symbols + noise


def compute_llrs(received: np.ndarray, sigma2: float, arrival_index: int = 0) -> LlrBlock:
    """Per-bit LLRs 2*y/sigma^2 for BPSK over AWGN."""
    if sigma2 <= 0:
        raise ValueError(f"sigma2 must be positive, got {sigma2}")
    return LlrBlock(llrs=2.0 * np.asarray(received, dtype=np.float64) / sigma2,
                    arrival_index=arrival_index)


def hard_demod(values: np.ndarray) -> np.ndarray:
    """Sign decision: positive (and exact zero) -> 0, negative -> 1."""
    return (np.asarray(values) < 0).astype(np.uint8)


def trial_rng(master_seed: int, arrival_index: int, stream: int = 0) -> np.random.Generator:
    """Independent substream for one codeword.

    Derived from (master seed, arrival index) so trial i sees the same
    noise no matter how trials are batched, paired, or parallelized.
    """
    return np.random.default_rng([master_seed, arrival_index, stream])
