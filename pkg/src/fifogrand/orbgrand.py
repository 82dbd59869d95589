"""ORBGRAND decoding: rank ordering, query search, and the decoder-core model.

Decoding tests putative noise patterns against the hard-demodulated word
until the result is a codeword. Patterns are generated in logistic-weight
order on reliability ranks (see ``patterns``); a hardware decoder core is
modeled behaviorally as testing ``alpha`` patterns per clock cycle.
"""

from __future__ import annotations

from typing import NamedTuple, Protocol

import numpy as np

from .channel import LlrBlock, hard_demod
from .linear_code import CodeSpec, syndrome_packed
from .patterns import NaiveSyndromeScan, PatternCounts, SyndromeScan, pack_column_ints

#: Hard stop for the unconstrained decoder; guarantees termination at very
#: low SNR, essentially never reached at operating points of interest.
DEFAULT_QUERY_CAP = 10_000_000


def rank_positions(llrs: np.ndarray) -> np.ndarray:
    """Bit positions sorted by |llr| ascending; ties keep original order.

    Index 0 of the result is the least reliable position (rank 1).
    """
    return np.argsort(np.abs(np.asarray(llrs)), kind="stable")


class QuerySearch(Protocol):
    """What a decoder core needs from its work item."""

    def first_hit(self, within: int) -> int | None: ...
    def word_at_hit(self) -> np.ndarray | None: ...
    def fallback_word(self) -> np.ndarray | None: ...


class OrbgrandEngine:
    """Shared per-code state for building pattern searches."""

    def __init__(self, code: CodeSpec):
        self.code = code
        self.counts = PatternCounts(code.n)
        self._col_ints: list[int] | None = None
        if code.h_cols is None:
            self._col_ints = pack_column_ints(code.parity_check)

    def search(self, llrs: np.ndarray | LlrBlock) -> "PatternSearch":
        return PatternSearch(self, llrs)


class PatternSearch:
    """Lazy first-codeword search for one received block.

    Monotone and idempotent: repeated ``first_hit`` calls with growing
    budgets extend one cached scan, so the same search can back several
    scheduling configurations in paired experiments.
    """

    def __init__(self, engine: OrbgrandEngine, llrs: np.ndarray | LlrBlock):
        if isinstance(llrs, LlrBlock):
            llrs = llrs.llrs
        llrs = np.asarray(llrs, dtype=np.float64)
        code = engine.code
        if llrs.shape != (code.n,):
            raise ValueError(f"expected {code.n} llrs, got shape {llrs.shape}")
        self.code = code
        self.permutation = rank_positions(llrs)
        self.hard_word = hard_demod(llrs)
        self.hard_word.setflags(write=False)
        if code.h_cols is not None:
            cols = np.zeros(code.n + 1, dtype=np.uint64)
            cols[1:] = code.h_cols[self.permutation]
            target = syndrome_packed(self.hard_word, code)
            self._scan: SyndromeScan | NaiveSyndromeScan = SyndromeScan(
                cols, target, engine.counts)
        else:
            col_ints = engine._col_ints
            assert col_ints is not None
            cols_by_rank = [0] + [col_ints[p] for p in self.permutation]
            target = 0
            for i in np.flatnonzero(self.hard_word):
                target ^= col_ints[i]
            self._scan = NaiveSyndromeScan(cols_by_rank, target, engine.counts)

    @property
    def queries_scanned(self) -> int:
        return self._scan.scanned

    def first_hit(self, within: int) -> int | None:
        """Query index (1-based) of the first codeword, if it is <= within."""
        return self._scan.first_hit(within)

    def word_at_hit(self) -> np.ndarray:
        """The codeword produced by the discovered hit pattern."""
        word = self.hard_word.copy()
        ranks = np.array(self._scan.hit_pattern(), dtype=np.intp)
        if ranks.size:
            word[self.permutation[ranks - 1]] ^= 1
        return word

    def fallback_word(self) -> np.ndarray:
        """Best known candidate without a codeword: the hard decision itself."""
        return self.hard_word


class DecodeResult(NamedTuple):
    word: np.ndarray
    queries_used: int
    found: bool


def decode_unconstrained(llrs: np.ndarray | LlrBlock, code: CodeSpec,
                         query_cap: int = DEFAULT_QUERY_CAP,
                         engine: OrbgrandEngine | None = None) -> DecodeResult:
    """Run the query loop until a codeword is found or the cap is reached.

    With ``query_cap = alpha * budget_cycles`` this is exactly GRAND with
    abandonment. The parity-check matrix has full row rank, so exhausting
    the whole pattern space always finds a codeword; a miss means the cap
    cut the search short and the hard decision is returned instead.
    """
    if query_cap < 1:
        raise ValueError(f"query_cap must be >= 1, got {query_cap}")
    if engine is None:
        engine = OrbgrandEngine(code)
    search = engine.search(llrs)
    hit = search.first_hit(query_cap)
    if hit is None:
        return DecodeResult(search.fallback_word(), query_cap, False)
    return DecodeResult(search.word_at_hit(), hit, True)


class DecoderCore:
    """One decoder instance stepped a clock cycle at a time.

    Each active cycle tests up to ``alpha`` patterns; the cycle that finds
    a codeword stops testing mid-cycle, so queries_used < alpha *
    cycles_active is possible only on the finishing cycle.
    """

    IDLE = "idle"
    ACTIVE = "active"
    DONE = "done"

    def __init__(self, index: int = 0):
        self.index = index
        self.status = DecoderCore.IDLE
        self.search: QuerySearch | None = None
        self.queries_used = 0
        self.cycles_active = 0
        self.booked_slot: int | None = None
        self.result: np.ndarray | None = None

    def assign(self, search: QuerySearch, booked_slot: int | None = None) -> None:
        if self.status != DecoderCore.IDLE:
            raise RuntimeError(f"decoder {self.index} is {self.status}, cannot assign")
        self.search = search
        self.booked_slot = booked_slot
        self.queries_used = 0
        self.cycles_active = 0
        self.result = None
        self.status = DecoderCore.ACTIVE

    def step(self, alpha: int) -> str:
        """Advance one clock cycle; returns the status afterwards."""
        if self.status != DecoderCore.ACTIVE:
            raise RuntimeError(f"cannot step a {self.status} decoder")
        assert self.search is not None
        budget = self.queries_used + alpha
        hit = self.search.first_hit(budget)
        self.cycles_active += 1
        if hit is None:
            self.queries_used = budget
        else:
            assert hit > self.queries_used, "hit should have finished an earlier cycle"
            self.queries_used = hit
            self.result = self.search.word_at_hit()
            self.status = DecoderCore.DONE
        return self.status

    def terminate(self) -> np.ndarray | None:
        """Abort an active decode; returns the fallback word and goes idle.

        queries_used and cycles_active keep their values so the caller can
        record them before the core is reassigned.
        """
        if self.status != DecoderCore.ACTIVE:
            raise RuntimeError(f"cannot terminate a {self.status} decoder")
        assert self.search is not None
        fallback = self.search.fallback_word()
        self.status = DecoderCore.IDLE
        self.search = None
        self.booked_slot = None
        return fallback

    def release(self) -> None:
        """Return a finished core to the idle pool."""
        if self.status != DecoderCore.DONE:
            raise RuntimeError(f"cannot release a {self.status} decoder")
        self.status = DecoderCore.IDLE
        self.search = None
        self.booked_slot = None
