"""Cycle-accurate simulation of the fixed-throughput FIFO-scheduling architecture.

One codeword arrives every I clock cycles into a FIFO of size F; a
distribution unit hands FIFO entries to any of D decoder cores; results
land in a re-order buffer of R slots booked in arrival order, and after a
warm-up of P*I cycles one result is expelled every I cycles, in arrival
order, no matter how long individual decodes took. Whenever the cadence
would be violated (an arrival finds the FIFO full, or an expulsion finds
its slot unfinished) the offending decode is terminated early and its
hard-decision fallback is emitted instead.

Within one clock cycle the phases run in a fixed order: output, dispatch,
arrival (with a post-arrival dispatch), decode. This ordering makes the
F=R=D=P=1 case collapse exactly to GRAND with an abandonment budget of
alpha*I queries per codeword, and lets a codeword be expelled in the same
cycle in which a new one arrives.

The simulator is single-threaded and deterministic. ``run`` skips clock
cycles in which provably nothing can happen (arrivals, expulsions,
completions and post-completion dispatches are all scheduled events);
``advance_cycle`` steps one cycle at a time. Both produce identical
outcomes and the test suite checks that.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Callable, Iterator, NamedTuple, Sequence

import numpy as np

from .linear_code import CodeSpec
from .orbgrand import OrbgrandEngine, QuerySearch
from .channel import LlrBlock

CAUSE_NONE = 0
CAUSE_OVERFLOW = 1
CAUSE_OUTPUT_DUE = 2
CAUSE_NAMES = {CAUSE_NONE: "none", CAUSE_OVERFLOW: "overflow", CAUSE_OUTPUT_DUE: "output_due"}

_FREE, _BOOKED, _FILLED = 0, 1, 2


class ConfigError(ValueError):
    """A schedule configuration violating the architecture's constraints."""


class SimulationInvariantError(RuntimeError):
    """An internal scheduler invariant broke; indicates a bug, never a legal state."""


@dataclass(frozen=True)
class ScheduleConfig:
    """Architecture parameters: FIFO/ROB sizes, decoder count, cadence."""

    fifo_size: int
    rob_size: int
    num_decoders: int
    arrival_interval: int
    parallelism: int
    alpha: int = 4
    output_due_policy: str = "slot_owner"

    def __post_init__(self):
        for name in ("fifo_size", "rob_size", "num_decoders", "arrival_interval",
                     "parallelism", "alpha"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or value < 1:
                raise ConfigError(f"{name} must be an integer >= 1, got {value!r}")
        if self.parallelism > self.fifo_size + self.rob_size:
            raise ConfigError(
                f"parallelism P={self.parallelism} exceeds F+R="
                f"{self.fifo_size + self.rob_size}")
        if self.rob_size < self.num_decoders:
            raise ConfigError(
                f"rob_size R={self.rob_size} below num_decoders D={self.num_decoders}; "
                "decoders could not all stay busy")
        if self.output_due_policy not in ("slot_owner", "longest_running"):
            raise ConfigError(f"unknown output_due_policy {self.output_due_policy!r}")


class TraceEvent(NamedTuple):
    cycle: int
    kind: str
    decoder: int | None
    arrival_index: int | None
    slot: int | None


class SimRecord(NamedTuple):
    arrival_index: int
    decoded: np.ndarray | None
    queries_used: int
    early_terminated: bool
    cause: str
    expel_cycle: int


@dataclass
class SimOutcome:
    """Everything one run produced: per-codeword records plus activity totals."""

    config: ScheduleConfig
    num_codewords: int
    queries_used: np.ndarray
    early_terminated: np.ndarray
    cause: np.ndarray
    expel_cycle: np.ndarray
    decoded: np.ndarray | None
    delta_act: np.ndarray
    total_cycles: int

    @property
    def delta_act_total(self) -> int:
        return int(self.delta_act.sum())

    @property
    def early_term_count(self) -> int:
        return int(self.early_terminated.sum())

    def records(self) -> Iterator[SimRecord]:
        for i in range(self.num_codewords):
            yield SimRecord(
                arrival_index=i,
                decoded=None if self.decoded is None else self.decoded[i],
                queries_used=int(self.queries_used[i]),
                early_terminated=bool(self.early_terminated[i]),
                cause=CAUSE_NAMES[int(self.cause[i])],
                expel_cycle=int(self.expel_cycle[i]),
            )


class FixedProfileJob:
    """Work item whose first-hit query index is known up front.

    Lets schedule behavior be replayed against precomputed decode profiles
    (or synthetic ones in tests) without touching a pattern engine.
    ``q_star=None`` never finds a codeword.
    """

    def __init__(self, q_star: int | None, word: np.ndarray | None = None,
                 fallback: np.ndarray | None = None):
        self.q_star = q_star
        self._word = word
        self._fallback = fallback

    def first_hit(self, within: int) -> int | None:
        if self.q_star is not None and self.q_star <= within:
            return self.q_star
        return None

    def word_at_hit(self) -> np.ndarray | None:
        return self._word

    def fallback_word(self) -> np.ndarray | None:
        return self._fallback


class _Decoder:
    __slots__ = ("index", "active", "job_index", "search", "booked_slot",
                 "activation", "completion", "hit", "queries")

    def __init__(self, index: int):
        self.index = index
        self.active = False
        self.job_index: int | None = None
        self.search: QuerySearch | None = None
        self.booked_slot: int | None = None
        self.activation = 0
        self.completion: int | None = None
        self.hit: int | None = None
        self.queries = 0


class _Slot:
    __slots__ = ("state", "arrival_index", "payload")

    def __init__(self):
        self.state = _FREE
        self.arrival_index: int | None = None
        self.payload: tuple | None = None


class FifoSimulator:
    """One simulation run over a fixed job stream.

    ``jobs`` is a sequence of work items implementing the QuerySearch
    protocol, one per codeword, in arrival order.
    """

    def __init__(self, config: ScheduleConfig, jobs: Sequence[QuerySearch],
                 trace: Callable[[TraceEvent], None] | None = None,
                 event_skip: bool = True):
        self.config = config
        self.jobs = jobs
        self.n_jobs = len(jobs)
        if self.n_jobs == 0:
            raise ValueError("job stream is empty")
        self._trace = trace
        self._event_skip = event_skip
        self._events: list[TraceEvent] | None = None
        self._fifo: deque[int] = deque()
        self._slots = [_Slot() for _ in range(config.rob_size)]
        self._decoders = [_Decoder(i) for i in range(config.num_decoders)]
        self._bookings = 0
        self._next_arrival = 0
        self._next_expel = 0
        self.cycle = -1  # last processed cycle
        n = self.n_jobs
        self._queries = np.zeros(n, dtype=np.int64)
        self._early = np.zeros(n, dtype=bool)
        self._cause = np.zeros(n, dtype=np.uint8)
        self._expel_cycle = np.zeros(n, dtype=np.int64)
        self._decoded: np.ndarray | None = None
        self._decoded_known = False
        self._delta_act = np.zeros(config.num_decoders, dtype=np.int64)

    # -- public drivers ----------------------------------------------------

    @property
    def finished(self) -> bool:
        return self._next_expel >= self.n_jobs

    def advance_cycle(self) -> list[TraceEvent]:
        """Process exactly one clock cycle; returns the events it produced."""
        if self.finished:
            raise RuntimeError("simulation already finished")
        return self._run_cycle(self.cycle + 1)

    def run(self) -> SimOutcome:
        while not self.finished:
            if self._event_skip:
                self._run_cycle(self._next_event_cycle())
            else:
                self._run_cycle(self.cycle + 1)
        return self._outcome()

    # -- event scheduling --------------------------------------------------

    def _next_event_cycle(self) -> int:
        config = self.config
        candidates = [config.parallelism * config.arrival_interval
                      + self._next_expel * config.arrival_interval]
        if self._next_arrival < self.n_jobs:
            candidates.append(self._next_arrival * config.arrival_interval)
        for dec in self._decoders:
            if dec.active and dec.completion is not None:
                candidates.append(dec.completion)
        if self._fifo and self._idle_decoder() is not None and self._free_slot_exists():
            candidates.append(self.cycle + 1)
        nxt = min(candidates)
        if nxt <= self.cycle:
            raise SimulationInvariantError(
                f"event scheduler moved backwards: cycle {self.cycle} -> {nxt}")
        return nxt

    # -- cycle phases ------------------------------------------------------

    def _run_cycle(self, cycle: int) -> list[TraceEvent]:
        events: list[TraceEvent] = []
        self.cycle = cycle
        self._events = events
        self._phase_output(cycle)
        self._dispatch(cycle)
        self._phase_arrival(cycle)
        self._phase_decode(cycle)
        self._check_capacity()
        self._events = None
        return events

    def _phase_output(self, cycle: int) -> None:
        config = self.config
        if self._next_expel >= self.n_jobs:
            return
        due = (config.parallelism + self._next_expel) * config.arrival_interval
        if cycle != due:
            return
        k = self._next_expel
        slot_index = k % config.rob_size
        slot = self._slots[slot_index]
        if slot.state == _FREE:
            raise SimulationInvariantError(
                f"cycle {cycle}: slot {slot_index} due for arrival {k} was never booked")
        if slot.state == _BOOKED:
            self._terminate_for_output(slot_index, cycle)
        assert slot.state == _FILLED
        if slot.arrival_index != k:
            raise SimulationInvariantError(
                f"cycle {cycle}: slot {slot_index} holds arrival {slot.arrival_index}, "
                f"expected {k}")
        word, queries, early, cause = slot.payload
        self._queries[k] = queries
        self._early[k] = early
        self._cause[k] = cause
        self._expel_cycle[k] = cycle
        self._store_word(k, word)
        slot.state = _FREE
        slot.arrival_index = None
        slot.payload = None
        self._next_expel += 1
        self._emit(cycle, "expel", None, k, slot_index)

    def _dispatch(self, cycle: int) -> None:
        while self._fifo and self._free_slot_exists():
            dec = self._idle_decoder()
            if dec is None:
                return
            job_index = self._fifo.popleft()
            slot_index = self._book_slot(job_index)
            search = self.jobs[job_index]
            dec.active = True
            dec.job_index = job_index
            dec.search = search
            dec.booked_slot = slot_index
            dec.activation = cycle
            dec.queries = 0
            dec.hit = None
            dec.completion = None
            if self._event_skip:
                due = ((self.config.parallelism + job_index)
                       * self.config.arrival_interval)
                max_budget = self.config.alpha * (due - cycle)
                if max_budget < 1:
                    raise SimulationInvariantError(
                        f"cycle {cycle}: arrival {job_index} dispatched at/after its "
                        f"due cycle {due}")
                hit = search.first_hit(max_budget)
                if hit is not None:
                    dec.hit = hit
                    dec.completion = cycle + (hit + self.config.alpha - 1) // self.config.alpha - 1
            self._emit(cycle, "dispatch", dec.index, job_index, slot_index)

    def _phase_arrival(self, cycle: int) -> None:
        config = self.config
        if self._next_arrival >= self.n_jobs:
            return
        if cycle != self._next_arrival * config.arrival_interval:
            return
        if len(self._fifo) == config.fifo_size:
            victim = self._longest_running()
            if victim is None:
                raise SimulationInvariantError(
                    f"cycle {cycle}: FIFO full with no active decoder to terminate")
            self._terminate(victim, cycle, CAUSE_OVERFLOW)
            self._dispatch(cycle)
            if len(self._fifo) == config.fifo_size:
                raise SimulationInvariantError(
                    f"cycle {cycle}: FIFO still full after overflow termination")
        job_index = self._next_arrival
        self._fifo.append(job_index)
        self._next_arrival += 1
        self._emit(cycle, "arrival", None, job_index, None)
        self._dispatch(cycle)

    def _phase_decode(self, cycle: int) -> None:
        alpha = self.config.alpha
        for dec in self._decoders:
            if not dec.active:
                continue
            if self._event_skip:
                if dec.completion == cycle:
                    self._finish(dec, cycle)
            else:
                assert dec.search is not None
                budget = dec.queries + alpha
                hit = dec.search.first_hit(budget)
                if hit is None:
                    dec.queries = budget
                else:
                    if not dec.queries < hit <= budget:
                        raise SimulationInvariantError(
                            f"cycle {cycle}: decoder {dec.index} hit at query {hit} "
                            f"outside cycle budget ({dec.queries}, {budget}]")
                    dec.hit = hit
                    self._finish(dec, cycle)

    # -- termination and completion ----------------------------------------

    def _finish(self, dec: _Decoder, cycle: int) -> None:
        assert dec.search is not None and dec.hit is not None
        cycles_active = cycle - dec.activation + 1
        expected = (dec.hit + self.config.alpha - 1) // self.config.alpha
        if cycles_active != expected:
            raise SimulationInvariantError(
                f"decoder {dec.index} finished after {cycles_active} cycles, "
                f"expected ceil({dec.hit}/{self.config.alpha}) = {expected}")
        self._delta_act[dec.index] += cycles_active
        word = dec.search.word_at_hit()
        self._fill_slot(dec, (word, dec.hit, False, CAUSE_NONE))
        self._emit(cycle, "complete", dec.index, dec.job_index, dec.booked_slot)
        self._release(dec)

    def _terminate(self, dec: _Decoder, cycle: int, cause: int) -> None:
        assert dec.search is not None
        cycles_active = cycle - dec.activation
        queries = self.config.alpha * cycles_active
        if not self._event_skip and dec.queries != queries:
            raise SimulationInvariantError(
                f"decoder {dec.index} terminated with {dec.queries} queries, "
                f"expected {queries}")
        self._delta_act[dec.index] += cycles_active
        word = dec.search.fallback_word()
        self._fill_slot(dec, (word, queries, True, cause))
        self._emit(cycle, f"early_term_{CAUSE_NAMES[cause]}", dec.index,
                   dec.job_index, dec.booked_slot)
        self._release(dec)

    def _terminate_for_output(self, slot_index: int, cycle: int) -> None:
        if self.config.output_due_policy == "slot_owner":
            owner = next((d for d in self._decoders if d.active
                          and d.booked_slot == slot_index), None)
            if owner is None:
                raise SimulationInvariantError(
                    f"cycle {cycle}: booked slot {slot_index} has no active owner")
            self._terminate(owner, cycle, CAUSE_OUTPUT_DUE)
            return
        # longest_running: keep terminating until the due slot is filled.
        # Activation order follows arrival order, so the owner is reached
        # after at most D-1 same-cycle ties.
        while self._slots[slot_index].state == _BOOKED:
            victim = self._longest_running()
            if victim is None:
                raise SimulationInvariantError(
                    f"cycle {cycle}: booked slot {slot_index} but no active decoder")
            self._terminate(victim, cycle, CAUSE_OUTPUT_DUE)

    def _longest_running(self) -> _Decoder | None:
        best: _Decoder | None = None
        for dec in self._decoders:
            if dec.active and (best is None or dec.activation < best.activation):
                best = dec
        return best

    def _release(self, dec: _Decoder) -> None:
        dec.active = False
        dec.job_index = None
        dec.search = None
        dec.booked_slot = None
        dec.completion = None
        dec.hit = None
        dec.queries = 0

    # -- bookkeeping helpers -------------------------------------------------

    def _fill_slot(self, dec: _Decoder, payload: tuple) -> None:
        assert dec.booked_slot is not None
        slot = self._slots[dec.booked_slot]
        if slot.state != _BOOKED or slot.arrival_index != dec.job_index:
            raise SimulationInvariantError(
                f"decoder {dec.index} writing to slot {dec.booked_slot} it does not own")
        slot.state = _FILLED
        slot.payload = payload

    def _book_slot(self, job_index: int) -> int:
        slot_index = self._bookings % self.config.rob_size
        slot = self._slots[slot_index]
        if slot.state != _FREE:
            raise SimulationInvariantError(
                f"booking slot {slot_index} for arrival {job_index} but it is occupied")
        if job_index != self._bookings:
            raise SimulationInvariantError(
                f"booking order broken: arrival {job_index} booked as #{self._bookings}")
        slot.state = _BOOKED
        slot.arrival_index = job_index
        self._bookings += 1
        return slot_index

    def _free_slot_exists(self) -> bool:
        return self._slots[self._bookings % self.config.rob_size].state == _FREE

    def _idle_decoder(self) -> _Decoder | None:
        return next((d for d in self._decoders if not d.active), None)

    def _store_word(self, index: int, word: np.ndarray | None) -> None:
        if not self._decoded_known:
            self._decoded_known = True
            if word is not None:
                self._decoded = np.zeros((self.n_jobs, len(word)), dtype=np.uint8)
        if (word is None) != (self._decoded is None):
            raise SimulationInvariantError("job stream mixes word-bearing and bare jobs")
        if self._decoded is not None:
            self._decoded[index] = word

    def _check_capacity(self) -> None:
        if len(self._fifo) > self.config.fifo_size:
            raise SimulationInvariantError("FIFO over capacity")
        in_flight = self._next_arrival - self._next_expel
        if in_flight > self.config.parallelism:
            raise SimulationInvariantError(
                f"{in_flight} codewords in flight exceeds P={self.config.parallelism}")

    def _emit(self, cycle: int, kind: str, decoder: int | None,
              arrival_index: int | None, slot: int | None) -> None:
        event = TraceEvent(cycle, kind, decoder, arrival_index, slot)
        if self._events is not None:
            self._events.append(event)
        if self._trace is not None:
            self._trace(event)

    def _outcome(self) -> SimOutcome:
        config = self.config
        total = (config.parallelism + self.n_jobs - 1) * config.arrival_interval
        return SimOutcome(
            config=config,
            num_codewords=self.n_jobs,
            queries_used=self._queries,
            early_terminated=self._early,
            cause=self._cause,
            expel_cycle=self._expel_cycle,
            decoded=self._decoded,
            delta_act=self._delta_act,
            total_cycles=total,
        )


def simulate(config: ScheduleConfig, code: CodeSpec,
             llr_stream: Sequence[LlrBlock | np.ndarray],
             trace: Callable[[TraceEvent], None] | None = None,
             event_skip: bool = True,
             engine: OrbgrandEngine | None = None) -> SimOutcome:
    """Decode a stream of LLR blocks through the FIFO-scheduling architecture.

    Blocks arrive in stream order, one every ``config.arrival_interval``
    cycles; the outcome holds one record per block, in arrival order.
    """
    if engine is None:
        engine = OrbgrandEngine(code)
    jobs = [engine.search(block) for block in llr_stream]
    return FifoSimulator(config, jobs, trace=trace, event_skip=event_skip).run()


def simulate_jobs(config: ScheduleConfig, jobs: Sequence[QuerySearch],
                  trace: Callable[[TraceEvent], None] | None = None,
                  event_skip: bool = True) -> SimOutcome:
    """Run the scheduler over prebuilt work items (decode profiles)."""
    return FifoSimulator(config, jobs, trace=trace, event_skip=event_skip).run()
