"""Logistic-weight-ordered enumeration of noise patterns.

A pattern is a set of distinct reliability ranks (1-based, rank 1 = least
reliable position); its logistic weight is the sum of its ranks. Patterns
are enumerated in non-decreasing logistic weight. Within one weight w the
order is canonical: partitions of w into distinct parts <= n, largest part
first, descending recursively. For w = 5 that is {5}, {4,1}, {3,2}.

Query indices are 1-based: query 1 is the empty pattern (weight 0), which
tests the hard-demodulated word itself. Over a full run every subset of
{1..n} appears exactly once, so the total number of patterns is 2^n.

Two engines walk this order:

* ``PatternGenerator`` emits patterns one by one in pure Python. It is the
  reference implementation and the oracle the fast engine is tested
  against.
* ``SyndromeScan`` evaluates the syndrome of whole weight blocks at once.
  Each pattern's syndrome is the XOR of per-rank column words, and the
  blocks share structure: the partitions of w with largest part L are L
  prepended to the partitions of w - L with parts < L. Memoizing the
  sub-block arrays makes each pattern cost O(1) vectorized work instead of
  O(parts), which is what makes multi-million-query scans practical.
"""

from __future__ import annotations

import math
from typing import Iterator

import numpy as np


def logistic_weight(parts: tuple[int, ...]) -> int:
    """Sum of the ranks flipped by a pattern."""
    return sum(parts)


def _min_largest_part(s: int) -> int:
    # smallest L with L*(L+1)/2 >= s, i.e. {L, L-1, ...} can still reach s
    if s <= 0:
        return 1
    low = (math.isqrt(8 * s + 1) - 1) // 2
    return low if low * (low + 1) >= 2 * s else low + 1


class PatternCounts:
    """Counting tables for partitions of s into distinct parts <= min(b, n)."""

    def __init__(self, n: int):
        if n <= 0:
            raise ValueError(f"n must be positive, got {n}")
        self.n = n
        self.max_weight = n * (n + 1) // 2
        self._cache: dict[tuple[int, int], int] = {}
        self._cumulative: list[int] = [1]  # through weight 0

    def count(self, s: int, b: int | None = None) -> int:
        """Number of partitions of s into distinct parts each <= min(b, n)."""
        if s < 0:
            return 0
        b = self.n if b is None else min(b, self.n)
        b = min(b, s)
        if s == 0:
            return 1
        if b <= 0:
            return 0
        key = (s, b)
        cached = self._cache.get(key)
        if cached is None:
            cached = sum(self.count(s - part, part - 1)
                         for part in range(b, _min_largest_part(s) - 1, -1))
            self._cache[key] = cached
        return cached

    def weight_count(self, w: int) -> int:
        """Number of patterns with logistic weight exactly w."""
        return self.count(w)

    def cumulative_through(self, w: int) -> int:
        """Number of patterns with logistic weight <= w."""
        if w < 0:
            return 0
        w = min(w, self.max_weight)
        while len(self._cumulative) <= w:
            nxt = len(self._cumulative)
            self._cumulative.append(self._cumulative[-1] + self.weight_count(nxt))
        return self._cumulative[w]

    def weight_of_query(self, query: int) -> int:
        """Logistic weight of the 1-based query index."""
        # extends the cumulative table only as far as the query demands;
        # touching max_weight would force the full 2^n count
        if query < 1:
            raise ValueError(f"query {query} out of range")
        w = 0
        while self.cumulative_through(w) < query:
            w += 1
            if w > self.max_weight:
                raise ValueError(f"query {query} out of range")
        return w


def iter_partitions(s: int, bound: int) -> Iterator[tuple[int, ...]]:
    """Partitions of s into distinct parts <= bound, canonical order."""
    if s == 0:
        yield ()
        return
    for part in range(min(s, bound), _min_largest_part(s) - 1, -1):
        for rest in iter_partitions(s - part, part - 1):
            yield (part,) + rest


def iter_patterns(n: int) -> Iterator[tuple[int, ...]]:
    """All 2^n patterns in canonical order, starting with the empty one."""
    for w in range(n * (n + 1) // 2 + 1):
        yield from iter_partitions(w, n)


class PatternGenerator:
    """Stateful reference enumerator over the canonical pattern order.

    ``next_pattern`` returns rank tuples (largest first) and None once all
    2^n patterns have been emitted.
    """

    def __init__(self, n: int):
        self.n = n
        self.current_weight = 0
        self.queries_emitted = 0
        self.max_weight = n * (n + 1) // 2
        self._within_weight = iter_partitions(0, n)

    def next_pattern(self) -> tuple[int, ...] | None:
        while True:
            pattern = next(self._within_weight, None)
            if pattern is not None:
                self.queries_emitted += 1
                return pattern
            if self.current_weight >= self.max_weight:
                return None
            self.current_weight += 1
            self._within_weight = iter_partitions(self.current_weight, self.n)

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        while (pattern := self.next_pattern()) is not None:
            yield pattern


def unrank_pattern(w: int, index: int, counts: PatternCounts) -> tuple[int, ...]:
    """The index-th (0-based) pattern of weight w in canonical order."""
    if not 0 <= index < counts.weight_count(w):
        raise ValueError(f"index {index} out of range for weight {w}")
    parts: list[int] = []
    s, bound = w, counts.n
    while s > 0:
        for part in range(min(s, bound), _min_largest_part(s) - 1, -1):
            block = counts.count(s - part, part - 1)
            if index < block:
                parts.append(part)
                s -= part
                bound = part - 1
                break
            index -= block
        else:
            raise AssertionError("unrank walked off the partition tree")
    return tuple(parts)


def pattern_query_number(parts: tuple[int, ...], counts: PatternCounts) -> int:
    """1-based global query index of a pattern (inverse of unranking)."""
    parts = tuple(sorted(parts, reverse=True))
    if len(set(parts)) != len(parts) or (parts and (parts[0] > counts.n or parts[-1] < 1)):
        raise ValueError(f"not a valid pattern for n={counts.n}: {parts}")
    w = sum(parts)
    index = 0
    s, bound = w, counts.n
    for part in parts:
        for larger in range(min(s, bound), part, -1):
            index += counts.count(s - larger, larger - 1)
        s -= part
        bound = part - 1
    return counts.cumulative_through(w - 1) + index + 1


def pack_column_ints(parity_check: np.ndarray) -> list[int]:
    """Columns of H as arbitrary-precision integers (bit j = row j)."""
    rows, n = parity_check.shape
    cols = []
    for i in range(n):
        value = 0
        for j in range(rows):
            if parity_check[j, i]:
                value |= 1 << j
        cols.append(value)
    return cols


class SyndromeScan:
    """Vectorized walk over the canonical order, hunting one syndrome value.

    ``cols`` maps rank r (1-based) to the packed parity-check column of the
    position holding that rank; ``target`` is the packed syndrome of the
    hard-demodulated word. The first pattern whose column XOR equals the
    target turns the word into a codeword.

    Scanning is lazy and monotone: blocks of one weight are evaluated at a
    time, results are cached, and repeated ``first_hit`` calls with growing
    budgets never recompute. The scan may overshoot a budget to finish a
    weight block; the hit index reported is exact regardless.
    """

    def __init__(self, cols: np.ndarray, target: int, counts: PatternCounts):
        if cols.shape != (counts.n + 1,):
            raise ValueError(f"cols must have length n+1={counts.n + 1}, got {cols.shape}")
        self._cols = np.ascontiguousarray(cols, dtype=np.uint64)
        self._target = np.uint64(target)
        self.counts = counts
        self._memo: dict[tuple[int, int], np.ndarray] = {}
        self._zero = np.zeros(1, dtype=np.uint64)
        self._next_weight = 0
        self._scanned = 0
        self._hit: int | None = None

    @property
    def scanned(self) -> int:
        """Queries whose syndromes have been evaluated so far."""
        return self._scanned

    def first_hit(self, within: int) -> int | None:
        """1-based query index of the first hit if it is <= within, else None."""
        counts = self.counts
        while self._hit is None and self._scanned < within:
            w = self._next_weight
            if w > counts.max_weight:
                break
            block = self._block(w, min(w, counts.n))
            matches = np.flatnonzero(block == self._target)
            if matches.size:
                self._hit = self._scanned + int(matches[0]) + 1
                self._memo.clear()
            self._scanned += block.size
            self._next_weight += 1
        if self._hit is not None and self._hit <= within:
            return self._hit
        return None

    def hit_pattern(self) -> tuple[int, ...]:
        """Rank pattern of the discovered hit; only valid after a hit."""
        if self._hit is None:
            raise RuntimeError("no hit discovered yet")
        w = self.counts.weight_of_query(self._hit)
        index = self._hit - self.counts.cumulative_through(w - 1) - 1
        return unrank_pattern(w, index, self.counts)

    def _block(self, s: int, b: int) -> np.ndarray:
        b = min(b, s)
        if s == 0:
            return self._zero
        key = (s, b)
        cached = self._memo.get(key)
        if cached is not None:
            return cached
        out = np.empty(self.counts.count(s, b), dtype=np.uint64)
        offset = 0
        for part in range(b, _min_largest_part(s) - 1, -1):
            child = self._block(s - part, part - 1)
            np.bitwise_xor(child, self._cols[part], out=out[offset:offset + child.size])
            offset += child.size
        self._memo[key] = out
        return out


class NaiveSyndromeScan:
    """Pattern-by-pattern scan with arbitrary-precision syndromes.

    Same contract as SyndromeScan; used as the independent oracle in tests
    and as the fallback when the syndrome does not fit one machine word.
    """

    def __init__(self, cols: list[int], target: int, counts: PatternCounts):
        if len(cols) != counts.n + 1:
            raise ValueError(f"cols must have length n+1={counts.n + 1}, got {len(cols)}")
        self._cols = cols
        self._target = target
        self.counts = counts
        self._gen = PatternGenerator(counts.n)
        self._scanned = 0
        self._hit: int | None = None
        self._hit_parts: tuple[int, ...] | None = None

    @property
    def scanned(self) -> int:
        return self._scanned

    def first_hit(self, within: int) -> int | None:
        cols = self._cols
        while self._hit is None and self._scanned < within:
            parts = self._gen.next_pattern()
            if parts is None:
                break
            self._scanned += 1
            value = 0
            for part in parts:
                value ^= cols[part]
            if value == self._target:
                self._hit = self._scanned
                self._hit_parts = parts
        if self._hit is not None and self._hit <= within:
            return self._hit
        return None

    def hit_pattern(self) -> tuple[int, ...]:
        if self._hit_parts is None:
            raise RuntimeError("no hit discovered yet")
        return self._hit_parts
