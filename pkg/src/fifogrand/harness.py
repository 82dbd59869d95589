"""Experiment runner: seeded end-to-end Monte-Carlo pipelines and sweeps.

A trial is one codeword pushed through the full pipeline: random
information bits -> systematic encode -> BPSK -> AWGN -> LLRs -> decode.
Per-trial randomness comes from substreams keyed by (master_seed,
arrival_index), so the same trial sees the same noise in every mode and
every scheduling configuration. On top of that pairing, each trial's
decode is summarized once as a profile (first-hit query index plus
correctness flags) and every mode -- unconstrained, hard query cap, or the
FIFO-scheduling simulator -- is evaluated as a cheap replay of the same
profiles. That is what makes operating-point searches over many
configurations affordable.
"""

from __future__ import annotations

import csv
import json
import sys
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Iterator, Sequence

import numpy as np

from .channel import ChannelParams, compute_llrs, modulate, transmit, trial_rng
from .linear_code import CodeSpec, DEFAULT_CODE_SEED, encode, generate_code
from .metrics import (BlerCurve, BlerPoint, HardwareProfile, OperatingPointError,
                      activity_factor, avg_throughput, latency, operating_point,
                      throughput)
from .orbgrand import DEFAULT_QUERY_CAP, OrbgrandEngine
from .scheduler import (ConfigError, FixedProfileJob, ScheduleConfig, SimOutcome,
                        simulate_jobs)

MODES = ("fifo", "unconstrained", "grandab")

CSV_HEADER = ["n", "k", "code_seed", "ebn0_db", "F", "R", "D", "I", "P", "alpha",
              "f_hz", "trials", "errors", "bler", "bler_ci_lo", "bler_ci_hi",
              "beta", "eta_act", "theta_bps", "latency_s", "p_dyn_w",
              "early_terms", "mode"]


class ExperimentConfigError(ValueError):
    """Invalid experiment configuration; message names the offending field."""


@dataclass(frozen=True)
class ExperimentConfig:
    """Fully resolved description of one sweep (lists) or point (singletons)."""

    n: int = 256
    k: int = 234
    code_seed: int = DEFAULT_CODE_SEED
    ebn0_grid: tuple[float, ...] = ()
    fifo_sizes: tuple[int, ...] = (1,)
    rob_sizes: tuple[int, ...] = (1,)
    decoder_counts: tuple[int, ...] = (1,)
    arrival_intervals: tuple[int, ...] = (1,)
    parallelisms: tuple[int, ...] = (1,)
    alpha: int = 4
    output_due_policy: str = "slot_owner"
    mode: str = "fifo"
    trials: int = 10_000
    master_seed: int = 1
    query_cap: int = DEFAULT_QUERY_CAP
    hardware: HardwareProfile = field(default_factory=HardwareProfile)
    name: str = "sweep"
    #: overrides the cartesian product of the schedule lists when non-empty;
    #: used by presets whose configurations are matched tuples, not products
    explicit_schedules: tuple[ScheduleConfig, ...] = ()

    def validate(self) -> None:
        if self.mode not in MODES:
            raise ExperimentConfigError(f"run.mode: {self.mode!r} not one of {MODES}")
        if not self.ebn0_grid:
            raise ExperimentConfigError("channel.ebn0_db: empty grid")
        if list(self.ebn0_grid) != sorted(set(self.ebn0_grid)):
            raise ExperimentConfigError("channel.ebn0_db: must be strictly increasing")
        if self.trials < 1:
            raise ExperimentConfigError(f"run.trials: must be >= 1, got {self.trials}")
        if self.query_cap < 1:
            raise ExperimentConfigError(f"run.query_cap: must be >= 1, got {self.query_cap}")
        if self.k > self.n or self.n < 1 or self.k < 1:
            raise ExperimentConfigError(f"code: invalid dimensions (n={self.n}, k={self.k})")
        if self.mode == "fifo":
            for _ in self.schedule_combos():
                pass  # raises with a field diagnostic on the first bad combo
        elif self.mode == "grandab":
            for interval in self.arrival_intervals:
                if interval < 1:
                    raise ExperimentConfigError(
                        f"schedule.I: must be >= 1, got {interval}")

    def schedule_combos(self) -> Iterator[ScheduleConfig]:
        if self.explicit_schedules:
            yield from self.explicit_schedules
            return
        for f_size in self.fifo_sizes:
            for r_size in self.rob_sizes:
                for d_count in self.decoder_counts:
                    for interval in self.arrival_intervals:
                        for par in self.parallelisms:
                            try:
                                yield ScheduleConfig(
                                    fifo_size=f_size, rob_size=r_size,
                                    num_decoders=d_count, arrival_interval=interval,
                                    parallelism=par, alpha=self.alpha,
                                    output_due_policy=self.output_due_policy)
                            except ConfigError as exc:
                                raise ExperimentConfigError(f"schedule: {exc}") from exc

    def required_query_cap(self) -> int:
        """Cap large enough to resolve every schedule budget in this sweep."""
        cap = self.query_cap
        if self.mode == "fifo":
            if self.explicit_schedules:
                worst = max(s.parallelism * s.arrival_interval
                            for s in self.explicit_schedules)
            else:
                worst = max(p * i for p in self.parallelisms
                            for i in self.arrival_intervals)
            cap = max(cap, self.alpha * worst)
        elif self.mode == "grandab":
            cap = max(cap, self.alpha * max(self.arrival_intervals))
        return cap


def _as_tuple(value, caster, field_name):
    if isinstance(value, (list, tuple)):
        items = value
    else:
        items = [value]
    try:
        return tuple(caster(v) for v in items)
    except (TypeError, ValueError) as exc:
        raise ExperimentConfigError(f"{field_name}: {exc}") from exc


def _grid_from_spec(spec, field_name) -> tuple[float, ...]:
    if isinstance(spec, dict):
        try:
            start, stop, step = spec["start"], spec["stop"], spec["step"]
        except KeyError as exc:
            raise ExperimentConfigError(
                f"{field_name}: grid dict needs start/stop/step") from exc
        if step <= 0 or stop < start:
            raise ExperimentConfigError(f"{field_name}: bad grid bounds")
        count = int(round((stop - start) / step)) + 1
        return tuple(round(start + i * step, 9) for i in range(count))
    return _as_tuple(spec, float, field_name)


def config_from_dict(raw: dict, name: str = "sweep") -> ExperimentConfig:
    """Build and validate an ExperimentConfig from parsed TOML data."""
    def section(key):
        value = raw.get(key, {})
        if not isinstance(value, dict):
            raise ExperimentConfigError(f"{key}: expected a table/section")
        return value

    code_sec, chan, sched, run, hw = (section(s) for s in
                                      ("code", "channel", "schedule", "run", "hardware"))
    known = {"code", "channel", "schedule", "run", "hardware", "output"}
    for key in raw:
        if key not in known:
            raise ExperimentConfigError(f"{key}: unknown section")
    try:
        hardware = HardwareProfile(
            clock_hz=float(hw.get("clock_hz", 746e6)),
            alpha=int(sched.get("alpha", 4)),
            p_dec_w=float(hw.get("p_dec_w", 0.0861)))
    except ValueError as exc:
        raise ExperimentConfigError(f"hardware: {exc}") from exc
    config = ExperimentConfig(
        n=int(code_sec.get("n", 256)),
        k=int(code_sec.get("k", 234)),
        code_seed=int(code_sec.get("seed", DEFAULT_CODE_SEED)),
        ebn0_grid=_grid_from_spec(chan.get("ebn0_db", []), "channel.ebn0_db"),
        fifo_sizes=_as_tuple(sched.get("F", 1), int, "schedule.F"),
        rob_sizes=_as_tuple(sched.get("R", 1), int, "schedule.R"),
        decoder_counts=_as_tuple(sched.get("D", 1), int, "schedule.D"),
        arrival_intervals=_as_tuple(sched.get("I", 1), int, "schedule.I"),
        parallelisms=_as_tuple(sched.get("P", 1), int, "schedule.P"),
        alpha=int(sched.get("alpha", 4)),
        output_due_policy=str(sched.get("output_due_policy", "slot_owner")),
        mode=str(run.get("mode", "fifo")),
        trials=int(run.get("trials", 10_000)),
        master_seed=int(run.get("master_seed", 1)),
        query_cap=int(run.get("query_cap", DEFAULT_QUERY_CAP)),
        hardware=hardware,
        name=name,
    )
    config.validate()
    return config


def load_config(path: str | Path) -> ExperimentConfig:
    """Parse a TOML experiment file."""
    if sys.version_info >= (3, 11):
        import tomllib
    else:
        import tomli as tomllib
    path = Path(path)
    try:
        raw = tomllib.loads(path.read_text())
    except FileNotFoundError as exc:
        raise ExperimentConfigError(f"{path}: no such config file") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ExperimentConfigError(f"{path}: {exc}") from exc
    return config_from_dict(raw, name=path.stem)


# -- decode profiles ---------------------------------------------------------

@dataclass
class TrialProfiles:
    """Paired decode summaries for one (code, seed, Eb/N0, N) trial set.

    ``q_star[i]`` is the 1-based query index at which trial i first finds a
    codeword, or -1 if none was found within ``query_cap`` queries.
    """

    ebn0_db: float
    trials: int
    query_cap: int
    q_star: np.ndarray
    found_correct: np.ndarray
    hard_correct: np.ndarray

    def jobs(self) -> list[FixedProfileJob]:
        return [FixedProfileJob(int(q) if q > 0 else None) for q in self.q_star]

    def beta(self) -> float:
        """Average queries per codeword for the unconstrained decoder."""
        used = np.where(self.q_star > 0, self.q_star, self.query_cap)
        return float(used.mean())


def compute_profiles(code: CodeSpec, engine: OrbgrandEngine, ebn0_db: float,
                     trials: int, master_seed: int,
                     query_cap: int = DEFAULT_QUERY_CAP) -> TrialProfiles:
    """Run the channel pipeline and resolve every trial's decode profile."""
    params = ChannelParams.from_ebn0(ebn0_db, code.rate)
    q_star = np.empty(trials, dtype=np.int64)
    found_correct = np.zeros(trials, dtype=bool)
    hard_correct = np.zeros(trials, dtype=bool)
    k = code.k
    for i in range(trials):
        info = trial_rng(master_seed, i, stream=0).integers(0, 2, size=k, dtype=np.uint8)
        symbols = modulate(encode(info, code))
        received = transmit(symbols, params.sigma2, trial_rng(master_seed, i, stream=1))
        block = compute_llrs(received, params.sigma2, arrival_index=i)
        search = engine.search(block)
        hard_correct[i] = bool(np.array_equal(search.hard_word[:k], info))
        hit = search.first_hit(query_cap)
        if hit is None:
            q_star[i] = -1
        else:
            q_star[i] = hit
            found_correct[i] = bool(np.array_equal(search.word_at_hit()[:k], info))
    return TrialProfiles(ebn0_db=ebn0_db, trials=trials, query_cap=query_cap,
                         q_star=q_star, found_correct=found_correct,
                         hard_correct=hard_correct)


class ProfileStore:
    """Lazy cache of TrialProfiles per Eb/N0 for one (code, seed, N) context."""

    def __init__(self, code: CodeSpec, trials: int, master_seed: int,
                 query_cap: int = DEFAULT_QUERY_CAP):
        self.code = code
        self.engine = OrbgrandEngine(code)
        self.trials = trials
        self.master_seed = master_seed
        self.query_cap = query_cap
        self._cache: dict[float, TrialProfiles] = {}

    def get(self, ebn0_db: float) -> TrialProfiles:
        key = round(float(ebn0_db), 9)
        profiles = self._cache.get(key)
        if profiles is None:
            profiles = compute_profiles(self.code, self.engine, key, self.trials,
                                        self.master_seed, self.query_cap)
            self._cache[key] = profiles
        return profiles


# -- mode evaluation ---------------------------------------------------------

@dataclass
class ModeStats:
    """What one (mode, configuration, Eb/N0) evaluation produced."""

    errors: int
    trials: int
    beta: float
    eta_act: float | None
    early_terms: int
    delta_act_total: int | None
    outcome: SimOutcome | None = None

    @property
    def bler(self) -> float:
        return self.errors / self.trials


def unconstrained_stats(profiles: TrialProfiles) -> ModeStats:
    found = profiles.q_star > 0
    errors = int((~found | ~profiles.found_correct).sum())
    return ModeStats(errors=errors, trials=profiles.trials, beta=profiles.beta(),
                     eta_act=None, early_terms=int((~found).sum()),
                     delta_act_total=None)


def grandab_stats(profiles: TrialProfiles, budget: int,
                  parallelism: int = 1, arrival_interval: int | None = None,
                  alpha: int = 4) -> ModeStats:
    """Hard per-codeword query cap, the classic abandonment baseline.

    Activity cycles follow the budget = alpha * I reading: a codeword
    occupies its decoder for ceil(q/alpha) cycles, or the full I cycles
    when abandoned.
    """
    if budget > profiles.query_cap:
        raise ValueError(f"budget {budget} exceeds profile cap {profiles.query_cap}")
    q = profiles.q_star
    within = (q > 0) & (q <= budget)
    correct = np.where(within, profiles.found_correct, profiles.hard_correct)
    errors = int((~correct).sum())
    queries = np.where(within, q, budget)
    beta = float(queries.mean())
    eta = None
    delta_total = None
    if arrival_interval is not None:
        cycles = np.where(within, -(-q // alpha), arrival_interval)
        delta_total = int(cycles.sum())
        eta = activity_factor(delta_total, parallelism, arrival_interval,
                              profiles.trials)
    return ModeStats(errors=errors, trials=profiles.trials, beta=beta, eta_act=eta,
                     early_terms=int((~within).sum()), delta_act_total=delta_total)


def fifo_stats(profiles: TrialProfiles, schedule: ScheduleConfig) -> ModeStats:
    max_budget = schedule.alpha * schedule.parallelism * schedule.arrival_interval
    if max_budget > profiles.query_cap:
        raise ValueError(
            f"schedule budget up to {max_budget} queries exceeds profile cap "
            f"{profiles.query_cap}; raise run.query_cap")
    outcome = simulate_jobs(schedule, profiles.jobs())
    correct = np.where(outcome.early_terminated, profiles.hard_correct,
                       profiles.found_correct)
    errors = int((~correct).sum())
    eta = activity_factor(outcome.delta_act_total, schedule.parallelism,
                          schedule.arrival_interval, profiles.trials)
    return ModeStats(errors=errors, trials=profiles.trials,
                     beta=float(outcome.queries_used.mean()), eta_act=eta,
                     early_terms=outcome.early_term_count,
                     delta_act_total=outcome.delta_act_total, outcome=outcome)


# -- single points and sweeps -------------------------------------------------

def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


def point_row(config: ExperimentConfig, store: ProfileStore, ebn0_db: float,
              schedule: ScheduleConfig | None) -> dict:
    """Evaluate one point and assemble the CSV row."""
    started = time.perf_counter()
    profiles = store.get(ebn0_db)
    hw = config.hardware
    if config.mode == "fifo":
        assert schedule is not None
        stats = fifo_stats(profiles, schedule)
        theta = throughput(config.k, hw.clock_hz, schedule.arrival_interval)
        lat = latency(schedule.parallelism, schedule.arrival_interval, hw.clock_hz)
        f_size, r_size = schedule.fifo_size, schedule.rob_size
        d_count, interval, par = (schedule.num_decoders, schedule.arrival_interval,
                                  schedule.parallelism)
    elif config.mode == "grandab":
        assert schedule is not None
        interval = schedule.arrival_interval
        stats = grandab_stats(profiles, config.alpha * interval,
                              arrival_interval=interval, alpha=config.alpha)
        theta = throughput(config.k, hw.clock_hz, interval)
        lat = latency(1, interval, hw.clock_hz)
        f_size = r_size = d_count = par = 1
    else:
        stats = unconstrained_stats(profiles)
        theta = avg_throughput(config.alpha, config.k, hw.clock_hz, stats.beta)
        lat = None
        f_size = r_size = d_count = interval = par = None
    point = BlerPoint(ebn0_db, stats.trials, stats.errors)
    ci_lo, ci_hi = point.confidence_interval()
    p_dyn = None if stats.eta_act is None else stats.eta_act * hw.p_dec_w
    row = {
        "n": config.n, "k": config.k, "code_seed": config.code_seed,
        "ebn0_db": ebn0_db, "F": f_size, "R": r_size, "D": d_count,
        "I": interval, "P": par, "alpha": config.alpha, "f_hz": hw.clock_hz,
        "trials": stats.trials, "errors": stats.errors, "bler": stats.bler,
        "bler_ci_lo": ci_lo, "bler_ci_hi": ci_hi, "beta": stats.beta,
        "eta_act": stats.eta_act, "theta_bps": theta, "latency_s": lat,
        "p_dyn_w": p_dyn, "early_terms": stats.early_terms, "mode": config.mode,
    }
    row["wall_s"] = time.perf_counter() - started
    return row


def iter_point_keys(config: ExperimentConfig) -> Iterator[tuple[float, ScheduleConfig | None]]:
    if config.mode == "unconstrained":
        for ebn0 in config.ebn0_grid:
            yield ebn0, None
        return
    if config.mode == "grandab":
        for ebn0 in config.ebn0_grid:
            for interval in config.arrival_intervals:
                yield ebn0, ScheduleConfig(1, 1, 1, interval, 1, alpha=config.alpha)
        return
    for ebn0 in config.ebn0_grid:
        for schedule in config.schedule_combos():
            yield ebn0, schedule


def run_point(config: ExperimentConfig, store: ProfileStore | None = None) -> dict:
    """Run a config whose sweep lists are all singletons; returns the row."""
    config.validate()
    points = list(iter_point_keys(config))
    if len(points) != 1:
        raise ExperimentConfigError(
            f"run_point needs a single-point config, this one has {len(points)} points")
    if store is None:
        store = make_store(config)
    ebn0, schedule = points[0]
    return point_row(config, store, ebn0, schedule)


def make_store(config: ExperimentConfig) -> ProfileStore:
    code = generate_code(config.n, config.k, config.code_seed)
    return ProfileStore(code, config.trials, config.master_seed,
                        config.required_query_cap())


def _sweep_group(payload: tuple) -> list[dict]:
    """Worker: evaluate every point of one Eb/N0 group (needs one profile set)."""
    config, ebn0, schedules = payload
    store = make_store(config)
    return [point_row(config, store, ebn0, schedule) for schedule in schedules]


def run_sweep(config: ExperimentConfig, out_dir: str | Path,
              progress: Callable[[str], None] | None = None,
              workers: int = 1) -> Path:
    """Evaluate the cartesian product of sweep lists, streaming rows to CSV.

    Writes ``<name>.csv`` plus a ``<name>.meta.json`` sidecar with the
    resolved configuration. While the sweep is incomplete a ``<name>.resume``
    marker exists; re-running with the same output resumes after completed
    rows. With ``workers > 1`` the Eb/N0 groups run in a process pool; row
    order and content are identical to a sequential run.
    """
    config.validate()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"{config.name}.csv"
    marker = out_dir / f"{config.name}.resume"
    meta_path = out_dir / f"{config.name}.meta.json"

    done: set[tuple] = set()
    if csv_path.exists():
        if not marker.exists():
            if progress:
                progress(f"{csv_path} already complete; nothing to do")
            return csv_path
        with csv_path.open() as fh:
            for row in csv.DictReader(fh):
                done.add(_key_from_row(row))

    meta = {
        "config": _config_as_dict(config),
        "csv_header": CSV_HEADER,
        "written_at": time.strftime("%Y-%m-%dT%H:%M:%S"),
    }
    meta_path.write_text(json.dumps(meta, indent=2) + "\n")
    marker.write_text("sweep in progress\n")

    pending: dict[float, list[ScheduleConfig | None]] = {}
    for ebn0, schedule in iter_point_keys(config):
        if _point_key(config.mode, ebn0, schedule) in done:
            continue
        pending.setdefault(ebn0, []).append(schedule)

    new_file = not csv_path.exists()
    with csv_path.open("a", newline="") as fh:
        writer = csv.writer(fh)
        if new_file:
            writer.writerow(CSV_HEADER)
            fh.flush()

        def write_rows(rows: list[dict]) -> None:
            for row in rows:
                writer.writerow([_fmt(row[c]) for c in CSV_HEADER])
                if progress:
                    progress(f"ebn0={row['ebn0_db']:g} bler={row['bler']:.3g} "
                             f"mode={row['mode']} ({row['wall_s']:.1f}s)")
            fh.flush()

        if workers > 1 and len(pending) > 1:
            from concurrent.futures import ProcessPoolExecutor
            payloads = [(config, ebn0, schedules)
                        for ebn0, schedules in pending.items()]
            with ProcessPoolExecutor(max_workers=workers) as pool:
                for rows in pool.map(_sweep_group, payloads):
                    write_rows(rows)
        else:
            store = make_store(config)
            for ebn0, schedules in pending.items():
                for schedule in schedules:
                    write_rows([point_row(config, store, ebn0, schedule)])
    marker.unlink()
    return csv_path


def _describe(schedule: ScheduleConfig | None) -> str:
    if schedule is None:
        return "unconstrained"
    return (f"F={schedule.fifo_size} R={schedule.rob_size} D={schedule.num_decoders} "
            f"I={schedule.arrival_interval} P={schedule.parallelism}")


def _point_key(mode: str, ebn0: float, schedule: ScheduleConfig | None) -> tuple:
    if schedule is None:
        return (mode, format(ebn0, ".12g"), "", "", "", "", "")
    return (mode, format(ebn0, ".12g"), str(schedule.fifo_size), str(schedule.rob_size),
            str(schedule.num_decoders), str(schedule.arrival_interval),
            str(schedule.parallelism))


def _key_from_row(row: dict) -> tuple:
    return (row["mode"], format(float(row["ebn0_db"]), ".12g"),
            row["F"], row["R"], row["D"], row["I"], row["P"])


def _config_as_dict(config: ExperimentConfig) -> dict:
    if config.explicit_schedules:
        schedule = {"configurations": [
            {"F": s.fifo_size, "R": s.rob_size, "D": s.num_decoders,
             "I": s.arrival_interval, "P": s.parallelism}
            for s in config.explicit_schedules],
            "alpha": config.alpha,
            "output_due_policy": config.output_due_policy}
    else:
        schedule = {"F": list(config.fifo_sizes), "R": list(config.rob_sizes),
                    "D": list(config.decoder_counts),
                    "I": list(config.arrival_intervals),
                    "P": list(config.parallelisms), "alpha": config.alpha,
                    "output_due_policy": config.output_due_policy}
    return {
        "code": {"n": config.n, "k": config.k, "seed": config.code_seed},
        "channel": {"ebn0_db": list(config.ebn0_grid)},
        "schedule": schedule,
        "run": {"mode": config.mode, "trials": config.trials,
                "master_seed": config.master_seed, "query_cap": config.query_cap,
                "effective_query_cap": config.required_query_cap()},
        "hardware": {"clock_hz": config.hardware.clock_hz,
                     "alpha": config.hardware.alpha,
                     "p_dec_w": config.hardware.p_dec_w},
        "notes": {"operating_point_interpolation": "log-linear in Eb/N0 vs log10(BLER)"},
    }


# -- operating points ----------------------------------------------------------

@dataclass
class OperatingPointResult:
    ebn0_db: float
    curve: BlerCurve
    target: float


def find_operating_point(measure: Callable[[float], BlerPoint], target: float,
                         lo_db: float, hi_db: float,
                         resolution_db: float = 0.05) -> OperatingPointResult:
    """Bisect [lo_db, hi_db] down to ``resolution_db`` and interpolate.

    ``measure`` maps an Eb/N0 value to a measured BlerPoint; results are
    collected into the returned curve. The bracket must satisfy
    BLER(lo) >= target >= BLER(hi).
    """
    if hi_db <= lo_db:
        raise ValueError(f"bad bracket [{lo_db}, {hi_db}]")
    measured: dict[float, BlerPoint] = {}

    def level(ebn0: float) -> float:
        key = round(ebn0, 9)
        if key not in measured:
            measured[key] = measure(key)
        point = measured[key]
        return max(point.bler, 0.5 / point.trials)

    if level(lo_db) < target:
        raise OperatingPointError(
            f"BLER at {lo_db} dB already below target {target}", lo_db)
    if level(hi_db) > target:
        raise OperatingPointError(
            f"BLER at {hi_db} dB still above target {target}", hi_db)
    lo, hi = lo_db, hi_db
    while hi - lo > resolution_db * 1.5:
        steps = round((hi - lo) / (2 * resolution_db))
        mid = round(lo + steps * resolution_db, 9)
        if not lo < mid < hi:
            break
        if level(mid) >= target:
            lo = mid
        else:
            hi = mid
    curve = BlerCurve()
    for ebn0 in sorted(measured):
        point = measured[ebn0]
        curve.add(point.ebn0_db, point.trials, point.errors)
    # interpolate on the final bracketing pair only; outer points may be noisy
    pair = BlerCurve()
    for ebn0 in (lo, hi):
        point = measured[round(ebn0, 9)]
        pair.add(point.ebn0_db, point.trials, point.errors)
    return OperatingPointResult(ebn0_db=operating_point(pair, target), curve=curve,
                                target=target)


def bler_measure(config: ExperimentConfig, store: ProfileStore,
                 schedule: ScheduleConfig | None) -> Callable[[float], BlerPoint]:
    """Measurement callable for operating-point searches."""
    def measure(ebn0: float) -> BlerPoint:
        profiles = store.get(ebn0)
        if config.mode == "fifo" or schedule is not None:
            stats = fifo_stats(profiles, schedule)
        elif config.mode == "grandab":
            raise ValueError("grandab measurement needs an explicit schedule")
        else:
            stats = unconstrained_stats(profiles)
        return BlerPoint(ebn0, stats.trials, stats.errors)
    return measure


def find_operating_frontier(config: ExperimentConfig, store: ProfileStore,
                            schedule_base: ScheduleConfig,
                            intervals: Sequence[int], target: float,
                            unconstrained_op_db: float,
                            lo_db: float, hi_db: float,
                            resolution_db: float = 0.05,
                            progress: Callable[[str], None] | None = None) -> list[dict]:
    """Operating point, throughput and loss for each arrival interval.

    The unconstrained baseline must come from the same code and master
    seed so losses are paired. Unbracketed intervals are flagged in the
    returned rows rather than dropped.
    """
    hw = config.hardware
    rows = []
    for interval in intervals:
        schedule = replace(schedule_base, arrival_interval=interval)
        measure = bler_measure(config, store, schedule)
        row = {
            "I": interval,
            "theta_bps": throughput(config.k, hw.clock_hz, interval),
            "latency_s": latency(schedule.parallelism, interval, hw.clock_hz),
        }
        try:
            result = find_operating_point(measure, target, lo_db, hi_db,
                                          resolution_db)
            row["op_ebn0_db"] = result.ebn0_db
            row["loss_db"] = result.ebn0_db - unconstrained_op_db
            row["bracketed"] = True
            stats = fifo_stats(store.get(round(result.ebn0_db, 9)), schedule)
            row["eta_act"] = stats.eta_act
            row["p_dyn_w"] = stats.eta_act * hw.p_dec_w
            row["early_terms"] = stats.early_terms
        except OperatingPointError as exc:
            row["op_ebn0_db"] = None
            row["loss_db"] = None
            row["bracketed"] = False
            row["nearest_ebn0_db"] = exc.nearest_ebn0_db
        rows.append(row)
        if progress:
            loss = row.get("loss_db")
            progress(f"I={interval}: loss="
                     f"{'unbracketed' if loss is None else format(loss, '.3f')} dB")
    return rows
