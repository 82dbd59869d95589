"""Quantitative evaluation: BLER curves, operating points, throughput,
latency, and the activity-factor dynamic-power model."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .scheduler import SimOutcome

#: z for a 95% two-sided normal confidence interval.
_Z95 = 1.959963984540054


@dataclass(frozen=True)
class HardwareProfile:
    """Behavioral constants of the decoder hardware being modeled."""

    clock_hz: float = 746e6
    alpha: int = 4
    p_dec_w: float = 0.0861

    def __post_init__(self):
        if self.clock_hz <= 0 or self.alpha <= 0 or self.p_dec_w <= 0:
            raise ValueError("hardware profile fields must be positive")


@dataclass(frozen=True)
class BlerPoint:
    ebn0_db: float
    trials: int
    errors: int

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if not 0 <= self.errors <= self.trials:
            raise ValueError(f"errors {self.errors} outside [0, {self.trials}]")

    @property
    def bler(self) -> float:
        return self.errors / self.trials

    def confidence_interval(self) -> tuple[float, float]:
        """Normal-approximation 95% interval, clipped to [0, 1]."""
        p = self.bler
        half = _Z95 * math.sqrt(p * (1.0 - p) / self.trials)
        return max(0.0, p - half), min(1.0, p + half)


@dataclass
class BlerCurve:
    """BLER measurements over a strictly increasing Eb/N0 grid."""

    points: list[BlerPoint] = field(default_factory=list)

    def add(self, ebn0_db: float, trials: int, errors: int) -> None:
        self.points.append(BlerPoint(ebn0_db, trials, errors))
        self.points.sort(key=lambda p: p.ebn0_db)
        for a, b in zip(self.points, self.points[1:]):
            if a.ebn0_db >= b.ebn0_db:
                raise ValueError(f"duplicate Eb/N0 point {b.ebn0_db}")


class OperatingPointError(ValueError):
    """The target BLER is not bracketed by the curve."""

    def __init__(self, message: str, nearest_ebn0_db: float):
        super().__init__(message)
        self.nearest_ebn0_db = nearest_ebn0_db


def bler(outcome: SimOutcome, info_words: np.ndarray) -> float:
    """Fraction of codewords whose decoded information bits are wrong.

    ``info_words`` holds the transmitted information bits, one row per
    codeword in arrival order; decoded information bits are the first k
    bits of each decoded word (systematic extraction).
    """
    if outcome.decoded is None:
        raise ValueError("outcome carries no decoded words; compare flags instead")
    info_words = np.asarray(info_words, dtype=np.uint8)
    if info_words.ndim != 2 or info_words.shape[0] != outcome.num_codewords:
        raise ValueError(
            f"expected {outcome.num_codewords} reference rows, got {info_words.shape}")
    k = info_words.shape[1]
    wrong = np.any(outcome.decoded[:, :k] != info_words, axis=1)
    return float(wrong.mean())


def operating_point(curve: BlerCurve, target: float = 0.01) -> float:
    """Minimum Eb/N0 achieving the target BLER, by log-linear interpolation.

    Linear in Eb/N0 versus log10(BLER) between the two points bracketing
    the target. Zero-error points are floored at half an error count for
    the interpolation. Raises OperatingPointError when the curve does not
    bracket the target.
    """
    if not curve.points:
        raise ValueError("empty curve")
    if not 0 < target < 1:
        raise ValueError(f"target must be in (0, 1), got {target}")

    def level(point: BlerPoint) -> float:
        return max(point.bler, 0.5 / point.trials)

    for point in curve.points:
        if point.bler == target:
            return point.ebn0_db
    first, last = curve.points[0], curve.points[-1]
    if level(first) < target:
        raise OperatingPointError(
            f"target {target} above all measured BLERs; nearest point "
            f"{first.ebn0_db} dB", first.ebn0_db)
    if level(last) > target:
        raise OperatingPointError(
            f"target {target} below all measured BLERs; nearest point "
            f"{last.ebn0_db} dB", last.ebn0_db)
    for lo, hi in zip(curve.points, curve.points[1:]):
        b_lo, b_hi = level(lo), level(hi)
        if b_lo >= target >= b_hi:
            log_lo, log_hi = math.log10(b_lo), math.log10(b_hi)
            if log_lo == log_hi:
                return lo.ebn0_db
            frac = (math.log10(target) - log_lo) / (log_hi - log_lo)
            return lo.ebn0_db + frac * (hi.ebn0_db - lo.ebn0_db)
    raise OperatingPointError(
        f"BLER curve is not monotone enough to bracket {target}", last.ebn0_db)


def ebn0_loss(constrained_op_db: float, unconstrained_op_db: float) -> float:
    """Extra Eb/N0 the constrained system needs for the same target BLER."""
    if not (math.isfinite(constrained_op_db) and math.isfinite(unconstrained_op_db)):
        raise ValueError("operating points must be finite")
    return constrained_op_db - unconstrained_op_db


def throughput(k: int, clock_hz: float, arrival_interval: int) -> float:
    """Constant throughput k*f/I in bit/s."""
    if k <= 0 or clock_hz <= 0 or arrival_interval <= 0:
        raise ValueError("throughput arguments must be positive")
    return k * clock_hz / arrival_interval


def avg_throughput(alpha: int, k: int, clock_hz: float, beta: float) -> float:
    """Average throughput alpha*k*f/beta of an unconstrained decoder."""
    if beta <= 0:
        raise ValueError(f"beta must be positive, got {beta}")
    return alpha * k * clock_hz / beta


def latency(parallelism: int, arrival_interval: int, clock_hz: float) -> float:
    """Constant input-output latency P*I/f in seconds."""
    if parallelism <= 0 or arrival_interval <= 0 or clock_hz <= 0:
        raise ValueError("latency arguments must be positive")
    return parallelism * arrival_interval / clock_hz


def activity_factor(delta_act_tot: int, parallelism: int, arrival_interval: int,
                    num_codewords: int) -> float:
    """Fraction of the run's clock cycles during which decoders were busy."""
    if num_codewords < 1:
        raise ValueError(f"num_codewords must be >= 1, got {num_codewords}")
    denom = parallelism * arrival_interval + arrival_interval * (num_codewords - 1)
    return delta_act_tot / denom

def dynamic_power(delta_act_tot: int, parallelism: int, arrival_interval: int,
                  num_codewords: int, p_dec_w: float) -> float:
    """Dynamic decoding power: activity factor times per-decoder power."""
    return activity_factor(delta_act_tot, parallelism, arrival_interval,
                           num_codewords) * p_dec_w
