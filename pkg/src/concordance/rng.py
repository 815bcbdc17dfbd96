"""Counter-based keyed 64-bit generator.

Every output word is a pure function of ``(seed, position)``::

    key  = mix64(seed + GAMMA)
    word = mix64(key + (position + 1) * GAMMA)      (mod 2**64)

where ``mix64`` is the SplitMix64 finalizer (Stafford variant 13). This is
SplitMix64 with a hashed starting state, so any block of the stream can be
computed without touching the words before it. The scalar and numpy paths
below produce identical words; golden transcripts depend on this definition
and it must not change.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MASK64 = 0xFFFF_FFFF_FFFF_FFFF
GAMMA = 0x9E37_79B9_7F4A_7C15
_MUL1 = 0xBF58_476D_1CE4_E5B9
_MUL2 = 0x94D0_49BB_1331_11EB

# Largest multiple of 3 not exceeding 2**64; words at or above it are rejected.
TICKET_LIMIT = (2**64 // 3) * 3


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * _MUL1) & MASK64
    z = ((z ^ (z >> 27)) * _MUL2) & MASK64
    return z ^ (z >> 31)


def _mix64_array(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MUL1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MUL2)
    return z ^ (z >> np.uint64(31))


def derive_seed(seed: int, stream: int) -> int:
    """Seed of an independent sub-stream, e.g. strategy randomness vs tickets."""
    return mix64(mix64(seed ^ mix64(stream + 1)) + GAMMA)


@dataclass(frozen=True)
class RngState:
    seed: int
    position: int = 0

    def __post_init__(self) -> None:
        if not 0 <= self.seed <= MASK64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.position < 0:
            raise ValueError(f"position must be non-negative, got {self.position}")

    @property
    def key(self) -> int:
        return mix64(self.seed + GAMMA)

    def word(self) -> tuple[int, RngState]:
        """Next 64-bit word and the advanced state."""
        z = (self.key + (self.position + 1) * GAMMA) & MASK64
        return mix64(z), RngState(self.seed, self.position + 1)

    def words(self, n: int) -> tuple[np.ndarray, RngState]:
        """Next ``n`` words as a uint64 array, identical to ``n`` calls of :meth:`word`."""
        if n < 0:
            raise ValueError("n must be non-negative")
        counters = np.arange(self.position + 1, self.position + n + 1, dtype=np.uint64)
        with np.errstate(over="ignore"):
            z = np.uint64(self.key) + counters * np.uint64(GAMMA)
            out = _mix64_array(z)
        return out, RngState(self.seed, self.position + n)

    def tickets(self, n: int) -> tuple[np.ndarray, RngState]:
        """``n`` values uniform on {1, 2, 3} by rejection sampling.

        Words >= TICKET_LIMIT are skipped (one value in 2**64), so the result
        is exactly uniform. The returned state sits just past the last word
        consumed.
        """
        state = self
        chunks: list[np.ndarray] = []
        need = n
        while need > 0:
            block, after = state.words(need)
            accepted = block < np.uint64(TICKET_LIMIT)
            if accepted.all():
                chunks.append(block)
                state = after
                need = 0
                continue
            # keep words up to the last accepted one we still need
            idx = np.flatnonzero(accepted)[:need]
            chunks.append(block[idx])
            used = int(idx[-1]) + 1 if idx.size == need else block.size
            state = RngState(state.seed, state.position + used)
            need -= idx.size
        words = np.concatenate(chunks) if chunks else np.empty(0, dtype=np.uint64)
        return (words % np.uint64(3) + np.uint64(1)).astype(np.uint8), state

    def ticket(self) -> tuple[int, RngState]:
        state = self
        while True:
            w, state = state.word()
            if w < TICKET_LIMIT:
                return w % 3 + 1, state
