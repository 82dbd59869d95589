"""Fixed-throughput FIFO scheduling for guess-based decoding.

Library layout:

* ``linear_code`` -- random systematic (n, k) codes over GF(2)
* ``channel`` -- BPSK/AWGN pipeline and LLR computation
* ``patterns`` -- logistic-weight-ordered noise-pattern enumeration
* ``orbgrand`` -- the query-based decoder and the per-cycle core model
* ``scheduler`` -- cycle-accurate FIFO -> decoder array -> ROB simulator
* ``metrics`` -- BLER curves, operating points, throughput/latency/power
* ``harness`` -- seeded Monte-Carlo experiment runner and sweeps
"""

from .channel import (ChannelParams, LlrBlock, compute_llrs, ebn0_to_sigma2,
                      hard_demod, modulate, transmit, trial_rng)
from .linear_code import (CodeSpec, DEFAULT_CODE_SEED, encode, export_code,
                          generate_code, import_code, is_codeword)
from .metrics import (BlerCurve, BlerPoint, HardwareProfile, OperatingPointError,
                      avg_throughput, bler, dynamic_power, ebn0_loss, latency,
                      operating_point, throughput)
from .orbgrand import (DecodeResult, DecoderCore, OrbgrandEngine, PatternSearch,
                       decode_unconstrained, rank_positions)
from .patterns import PatternCounts, PatternGenerator, iter_patterns, logistic_weight
from .scheduler import (FixedProfileJob, ScheduleConfig, SimOutcome, TraceEvent,
                        simulate, simulate_jobs)

__version__ = "0.1.0"

__all__ = [
    "BlerCurve", "BlerPoint", "ChannelParams", "CodeSpec", "DecodeResult",
    "DecoderCore", "DEFAULT_CODE_SEED", "FixedProfileJob", "HardwareProfile",
    "LlrBlock", "OperatingPointError", "OrbgrandEngine", "PatternCounts",
    "PatternGenerator", "PatternSearch", "ScheduleConfig", "SimOutcome",
    "TraceEvent", "avg_throughput", "bler", "compute_llrs", "decode_unconstrained",
    "dynamic_power", "ebn0_loss", "ebn0_to_sigma2", "encode", "export_code",
    "generate_code", "hard_demod", "import_code", "is_codeword", "iter_patterns",
    "latency", "logistic_weight", "modulate", "operating_point", "rank_positions",
    "simulate", "simulate_jobs", "throughput", "transmit", "trial_rng",
]
