"""Random systematic (n, k) binary linear block codes over GF(2).

Bit vectors are plain numpy uint8 arrays with entries in {0, 1}. A code is
always systematic: generator = [I_k | P], parity_check = [P^T | I_{n-k}],
so the first k bits of every codeword are the information bits.

For fast membership tests the parity-check columns are packed into machine
words (one uint64 per column, bit j = row j of H). The syndrome of y XOR z
is then the packed syndrome of y XOR'd with the packed columns indexed by
the flipped positions of z, which is what the guessing decoder exploits.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

#: Syndromes wider than this cannot be packed into a single word; the
#: decoder falls back to a plain matrix-vector syndrome in that case.
MAX_PACKED_SYNDROME_BITS = 64

#: Code seed used by all published experiment presets, pinned so that runs
#: are comparable across machines and sessions.
DEFAULT_CODE_SEED = 49374


@dataclass(frozen=True)
class CodeSpec:
    """A systematic (n, k) binary linear block code.

    Immutable after construction and safe to share across workers.
    """

    n: int
    k: int
    seed: int | None
    generator: np.ndarray
    parity_check: np.ndarray

    def __post_init__(self):
        self.generator.setflags(write=False)
        self.parity_check.setflags(write=False)
        object.__setattr__(self, "_h_cols", _pack_columns(self.parity_check))
        if self._h_cols is not None:
            self._h_cols.setflags(write=False)

    @property
    def rate(self) -> float:
        return self.k / self.n

    @property
    def h_cols(self) -> np.ndarray | None:
        """Packed parity-check columns (uint64, length n), or None if n-k > 64."""
        return self._h_cols

    @property
    def parity_part(self) -> np.ndarray:
        """The P block of the generator [I_k | P], shape (k, n-k)."""
        return self.generator[:, self.k:]


def _pack_columns(h: np.ndarray) -> np.ndarray | None:
    rows, n = h.shape
    if rows > MAX_PACKED_SYNDROME_BITS:
        return None
    weights = (np.uint64(1) << np.arange(rows, dtype=np.uint64))
    return (h.astype(np.uint64).T * weights).sum(axis=1, dtype=np.uint64)


def generate_code(n: int, k: int, seed: int) -> CodeSpec:
    """Draw a random systematic (n, k) code; deterministic in (n, k, seed).

    The parity block P is i.i.d. uniform over GF(2). Zero columns in the
    parity-check matrix are possible and tolerated.
    """
    if n <= 0 or k <= 0:
        raise ValueError(f"code dimensions must be positive, got (n={n}, k={k})")
    if k > n:
        raise ValueError(f"information length k={k} exceeds code length n={n}")
    rng = np.random.default_rng(seed)
    p = rng.integers(0, 2, size=(k, n - k), dtype=np.uint8)
    generator = np.hstack([np.eye(k, dtype=np.uint8), p])
    parity_check = np.hstack([p.T.copy(), np.eye(n - k, dtype=np.uint8)])
    return CodeSpec(n=n, k=k, seed=seed, generator=generator, parity_check=parity_check)


def encode(info: np.ndarray, code: CodeSpec) -> np.ndarray:
    """Encode k information bits into an n-bit systematic codeword."""
    info = np.asarray(info, dtype=np.uint8)
    if info.shape != (code.k,):
        raise ValueError(f"expected {code.k} information bits, got shape {info.shape}")
    word = np.empty(code.n, dtype=np.uint8)
    word[: code.k] = info
    if code.n > code.k:
        word[code.k:] = (info @ code.parity_part) & 1
    return word


def syndrome_packed(word: np.ndarray, code: CodeSpec) -> int:
    """Packed syndrome H @ word over GF(2) as a single integer (n-k <= 64)."""
    cols = code.h_cols
    if cols is None:
        raise ValueError("syndrome does not fit a single word; use is_codeword")
    picked = cols[np.asarray(word, dtype=bool)]
    if picked.size == 0:
        return 0
    return int(np.bitwise_xor.reduce(picked))


def is_codeword(word: np.ndarray, code: CodeSpec) -> bool:
    """True iff parity_check @ word = 0 over GF(2)."""
    word = np.asarray(word, dtype=np.uint8)
    if word.shape != (code.n,):
        raise ValueError(f"expected {code.n} bits, got shape {word.shape}")
    if code.h_cols is not None:
        return syndrome_packed(word, code) == 0
    return not np.any((code.parity_check @ word) & 1)


def export_code(code: CodeSpec, path: str | Path) -> None:
    """Write the generator matrix as text, one '0'/'1' row per line."""
    lines = ["".join("1" if b else "0" for b in row) for row in code.generator]
    Path(path).write_text("\n".join(lines) + "\n")


def import_code(path: str | Path) -> CodeSpec:
    """Read a generator matrix written by export_code and rebuild the code.

    The matrix must be systematic [I_k | P]; the seed of an imported code is
    unknown and recorded as None.
    """
    lines = [ln for ln in Path(path).read_text().splitlines() if ln.strip()]
    if not lines:
        raise ValueError(f"{path}: empty code file")
    try:
        generator = np.array([[int(c) for c in ln.strip()] for ln in lines], dtype=np.uint8)
    except ValueError as exc:
        raise ValueError(f"{path}: rows must contain only '0'/'1'") from exc
    if generator.ndim != 2 or np.any(generator > 1):
        raise ValueError(f"{path}: rows must contain only '0'/'1'")
    k, n = generator.shape
    if k > n:
        raise ValueError(f"{path}: {k} rows exceed row length {n}")
    if not np.array_equal(generator[:, :k], np.eye(k, dtype=np.uint8)):
        raise ValueError(f"{path}: generator is not in systematic form [I | P]")
    p = generator[:, k:]
    parity_check = np.hstack([p.T.copy(), np.eye(n - k, dtype=np.uint8)])
    return CodeSpec(n=n, k=k, seed=None, generator=generator, parity_check=parity_check)
