"""Named experiment presets, version-pinned for reproducibility.

Sweep presets produce BLER rows in the standard CSV schema; frontier
presets compute 1% operating points per configuration and arrival
interval and emit (I, throughput, loss) rows plus latency/power at the
operating point. All presets use the canonical code seed and a pinned
Eb/N0 search window around the measured unconstrained operating point of
that code instance (about 7.76 dB at 10^4 trials).
"""

from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Sequence

from .harness import (ExperimentConfig, ProfileStore, find_operating_frontier,
                      find_operating_point, make_store, run_sweep,
                      unconstrained_stats)
from .metrics import BlerPoint, avg_throughput
from .scheduler import ScheduleConfig

#: Search window (dB) that brackets 1% BLER for the canonical (256, 234)
#: code: unconstrained decoding crosses 1% near 7.72 dB and even the most
#: constrained preset configuration crosses below 13.5 dB.
UNCONSTRAINED_WINDOW = (7.4, 8.4)
CONSTRAINED_WINDOW = (7.4, 13.5)
OPERATING_TARGET = 0.01
REFINE_STEP_DB = 0.05

#: Coarse Eb/N0 grid for BLER sweep presets.
SWEEP_GRID = tuple(round(7.0 + 0.25 * i, 2) for i in range(11))  # 7.00 .. 9.50

#: (F=R=P, D) configurations compared in the buffer/decoder trade-off plots.
#: (1, 2) is omitted: one ROB slot cannot keep two decoders busy (R >= D).
CONFIG_FAMILIES = ((1, 1), (2, 1), (4, 1), (2, 2), (4, 2))

FRONTIER_INTERVALS = (1, 3, 10, 30, 100, 300, 1000, 3000, 10_000, 30_000, 100_000)

FRONTIER_HEADER = ["n", "k", "code_seed", "F", "R", "D", "P", "alpha", "f_hz",
                   "trials", "mode", "I", "theta_bps", "op_ebn0_db", "loss_db",
                   "latency_s", "eta_act", "p_dyn_w", "early_terms", "bracketed"]


def _family_schedule(buffers: int, decoders: int, alpha: int = 4) -> ScheduleConfig:
    return ScheduleConfig(fifo_size=buffers, rob_size=buffers, num_decoders=decoders,
                          arrival_interval=1, parallelism=buffers, alpha=alpha)


@dataclass(frozen=True)
class SweepPreset:
    name: str
    description: str
    config: ExperimentConfig

    def run(self, out_dir: str | Path, trials: int | None = None,
            master_seed: int | None = None,
            progress: Callable[[str], None] | None = None) -> Path:
        config = _override(self.config, trials, master_seed)
        config = replace(config, name=self.name)
        return run_sweep(config, out_dir, progress=progress)


@dataclass(frozen=True)
class FrontierPreset:
    name: str
    description: str
    families: tuple[tuple[int, int], ...]
    intervals: tuple[int, ...]
    trials: int = 10_000
    master_seed: int = 1
    loss_targets: tuple[float, ...] = ()

    def run(self, out_dir: str | Path, trials: int | None = None,
            master_seed: int | None = None,
            progress: Callable[[str], None] | None = None) -> Path:
        trials = trials or self.trials
        master_seed = master_seed if master_seed is not None else self.master_seed
        base = ExperimentConfig(ebn0_grid=(7.0,), trials=trials,
                                master_seed=master_seed, name=self.name,
                                arrival_intervals=(max(self.intervals),),
                                parallelisms=(4,), fifo_sizes=(4,), rob_sizes=(4,))
        store = make_store(base)
        if progress:
            progress("searching unconstrained 1% operating point")
        unc = find_operating_point(
            _unconstrained_measure(store), OPERATING_TARGET,
            *UNCONSTRAINED_WINDOW, REFINE_STEP_DB)
        beta = store.get(round(unc.ebn0_db, 9)).beta()
        theta_avg = avg_throughput(base.alpha, base.k, base.hardware.clock_hz, beta)
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        csv_path = out_dir / f"{self.name}.csv"
        rows_out = []
        for buffers, decoders in self.families:
            schedule = _family_schedule(buffers, decoders, base.alpha)
            if progress:
                progress(f"frontier for (F=R=P={buffers}, D={decoders})")
            rows = find_operating_frontier(
                base, store, schedule, self.intervals, OPERATING_TARGET,
                unc.ebn0_db, *CONSTRAINED_WINDOW, REFINE_STEP_DB,
                progress=progress)
            for row in rows:
                rows_out.append({
                    "n": base.n, "k": base.k, "code_seed": base.code_seed,
                    "F": buffers, "R": buffers, "D": decoders, "P": buffers,
                    "alpha": base.alpha, "f_hz": base.hardware.clock_hz,
                    "trials": trials, "mode": "fifo", **row,
                })
        with csv_path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(FRONTIER_HEADER)
            for row in rows_out:
                writer.writerow([_cell(row.get(c)) for c in FRONTIER_HEADER])
        meta = {
            "preset": self.name,
            "unconstrained_op_ebn0_db": unc.ebn0_db,
            "beta_at_op": beta,
            "avg_throughput_bps_at_op": theta_avg,
            "target_bler": OPERATING_TARGET,
            "refine_step_db": REFINE_STEP_DB,
            "loss_targets_db": list(self.loss_targets),
            "operating_point_interpolation": "log-linear in Eb/N0 vs log10(BLER)",
            "written_at": time.strftime("%Y-%m-%dT%H:%M:%S"),
        }
        if self.loss_targets:
            meta["loss_target_picks"] = _loss_target_picks(rows_out, self.loss_targets)
        (out_dir / f"{self.name}.meta.json").write_text(json.dumps(meta, indent=2) + "\n")
        return csv_path


def _loss_target_picks(rows: list[dict], targets: Sequence[float]) -> list[dict]:
    """Smallest arrival interval reaching each loss target, per family."""
    picks = []
    families = sorted({(r["F"], r["D"]) for r in rows})
    for target in targets:
        for buffers, decoders in families:
            ok = [r for r in rows
                  if r["F"] == buffers and r["D"] == decoders
                  and r.get("loss_db") is not None and r["loss_db"] <= target]
            if ok:
                best = min(ok, key=lambda r: r["I"])
                picks.append({"loss_target_db": target, "F": buffers, "D": decoders,
                              "I": best["I"], "theta_bps": best["theta_bps"],
                              "latency_s": best["latency_s"],
                              "p_dyn_w": best.get("p_dyn_w")})
            else:
                picks.append({"loss_target_db": target, "F": buffers, "D": decoders,
                              "I": None})
    return picks


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


def _unconstrained_measure(store: ProfileStore) -> Callable[[float], BlerPoint]:
    def measure(ebn0: float) -> BlerPoint:
        stats = unconstrained_stats(store.get(ebn0))
        return BlerPoint(ebn0, stats.trials, stats.errors)
    return measure


def _override(config: ExperimentConfig, trials: int | None,
              master_seed: int | None) -> ExperimentConfig:
    if trials is not None:
        config = replace(config, trials=trials)
    if master_seed is not None:
        config = replace(config, master_seed=master_seed)
    return config


def _sweep(name, description, mode="fifo", ebn0=SWEEP_GRID, F=(4,), R=(4,), D=(1,),
           I=(10,), P=(4,)) -> SweepPreset:
    return SweepPreset(name, description, ExperimentConfig(
        ebn0_grid=tuple(ebn0), fifo_sizes=tuple(F), rob_sizes=tuple(R),
        decoder_counts=tuple(D), arrival_intervals=tuple(I),
        parallelisms=tuple(P), mode=mode, name=name))


def _fig4c_schedules():
    # matched (F=R=P, D) families at I in {1, 10}
    return tuple(
        ScheduleConfig(buffers, buffers, decoders, interval, buffers, alpha=4)
        for buffers, decoders in CONFIG_FAMILIES
        for interval in (1, 10))


PRESETS: dict[str, SweepPreset | FrontierPreset] = {
    "fig4a": _sweep(
        "fig4a",
        "BLER versus data parallelism P for F=R=4, D=1, I=10; shows the "
        "interior optimum P_opt",
        ebn0=(7.0, 7.25, 7.5, 7.75, 8.0), I=(10,), P=(1, 2, 3, 4, 5, 6, 7, 8)),
    "fig4b": _sweep(
        "fig4b",
        "BLER versus arrival interval I for the (4,1) configuration, "
        "converging to unconstrained decoding",
        I=(1, 10, 100, 1000, 10_000, 100_000)),
    "fig4b_unconstrained": _sweep(
        "fig4b_unconstrained",
        "Unconstrained baseline for the fig4b comparison",
        mode="unconstrained"),
    "fig4c": SweepPreset(
        "fig4c",
        "BLER for the matched (F=R=P, D) configurations at I=1 and I=10",
        ExperimentConfig(ebn0_grid=SWEEP_GRID, mode="fifo", name="fig4c",
                         explicit_schedules=_fig4c_schedules())),
    "fig1": FrontierPreset(
        "fig1",
        "Average-vs-constant throughput trade-off: frontier for the (1,1) "
        "naive-limit equivalent and the (4,1) configuration",
        families=((1, 1), (4, 1)), intervals=FRONTIER_INTERVALS),
    "fig5a": FrontierPreset(
        "fig5a",
        "Constant throughput versus 1% operating-point loss for all "
        "(F=R=P, D) families",
        families=CONFIG_FAMILIES, intervals=FRONTIER_INTERVALS),
    "fig5b": FrontierPreset(
        "fig5b",
        "Latency versus throughput at 0.1 dB and 0.05 dB loss targets",
        families=CONFIG_FAMILIES, intervals=FRONTIER_INTERVALS,
        loss_targets=(0.1, 0.05)),
    "fig5c": FrontierPreset(
        "fig5c",
        "Dynamic power versus throughput at 0.1 dB and 0.05 dB loss targets",
        families=CONFIG_FAMILIES, intervals=FRONTIER_INTERVALS,
        loss_targets=(0.1, 0.05)),
}
