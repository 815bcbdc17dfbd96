"""Domain types shared by the simulator, the detectors and the CLI."""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from functools import cached_property
from typing import TYPE_CHECKING, Iterable, Iterator, Sequence

import numpy as np

if TYPE_CHECKING:
    from concordance.strategies import StrategySpec


class Ticket(IntEnum):
    ONE = 1
    TWO = 2
    THREE = 3


class Answer(IntEnum):
    """A written answer; the integer value is the global bit encoding."""

    NO = 0
    YES = 1

    @classmethod
    def parse(cls, value: str | int | Answer) -> Answer:
        if isinstance(value, str):
            try:
                return cls[value.upper()]
            except KeyError:
                raise ValueError(f"not an answer: {value!r}") from None
        if isinstance(value, bool) or value not in (0, 1):
            raise ValueError(f"not an answer: {value!r}")
        return cls(value)


def _frozen(values: Iterable[int] | np.ndarray, dtype=np.uint8) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True).reshape(-1)
    arr.flags.writeable = False
    return arr


class BitSequence:
    """Immutable finite binary string backed by a read-only uint8 array."""

    __slots__ = ("_bits",)

    def __init__(self, bits: Iterable[int] | np.ndarray = ()):
        arr = _frozen(bits if isinstance(bits, np.ndarray) else list(bits))
        if arr.size and arr.max() > 1:
            raise ValueError("bits must be 0 or 1")
        self._bits = arr

    @classmethod
    def from_str(cls, text: str) -> BitSequence:
        if set(text) - {"0", "1"}:
            raise ValueError(f"not a bit string: {text!r}")
        return cls(np.frombuffer(text.encode("ascii"), dtype=np.uint8) - ord("0"))

    @property
    def bits(self) -> np.ndarray:
        return self._bits

    def __len__(self) -> int:
        return int(self._bits.size)

    def __iter__(self) -> Iterator[int]:
        return iter(self._bits.tolist())

    def __getitem__(self, item):
        if isinstance(item, slice):
            return BitSequence(self._bits[item])
        return int(self._bits[item])

    def __add__(self, other: BitSequence) -> BitSequence:
        return BitSequence(np.concatenate([self._bits, other._bits]))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitSequence):
            return NotImplemented
        return np.array_equal(self._bits, other._bits)

    def __hash__(self) -> int:
        return hash(self._bits.tobytes())

    def __str__(self) -> str:
        return (self._bits + ord("0")).tobytes().decode("ascii")

    def __repr__(self) -> str:
        text = str(self)
        if len(text) > 40:
            text = text[:37] + "..."
        return f"BitSequence({text!r}, m={len(self)})"

    @property
    def ones(self) -> int:
        return int(self._bits.sum(dtype=np.int64))

    def ones_fraction(self) -> float:
        if not len(self):
            raise ValueError("ones_fraction of an empty sequence")
        return self.ones / len(self)


@dataclass(frozen=True)
class Round:
    index: int
    ticket_a: Ticket
    ticket_b: Ticket
    answer_a: Answer
    answer_b: Answer


@dataclass(frozen=True, eq=False)
class Transcript:
    """The full history of one show.

    Rounds are stored column-wise (one read-only array per field) so a
    million-round show stays cheap; :attr:`rounds` materializes
    :class:`Round` objects on demand. Round ``n`` is implicitly the row
    at position ``n``, which makes the index invariant hold by construction.
    """

    strategy: StrategySpec
    seed: int
    tickets_a: np.ndarray
    tickets_b: np.ndarray
    answers_a: np.ndarray
    answers_b: np.ndarray

    def __post_init__(self) -> None:
        cols = {}
        for name in ("tickets_a", "tickets_b", "answers_a", "answers_b"):
            cols[name] = _frozen(getattr(self, name))
            object.__setattr__(self, name, cols[name])
        lengths = {c.size for c in cols.values()}
        if len(lengths) > 1:
            raise ValueError(f"column lengths differ: {sorted(lengths)}")
        for name in ("tickets_a", "tickets_b"):
            c = cols[name]
            if c.size and (c.min() < 1 or c.max() > 3):
                raise ValueError(f"{name}: tickets must lie in {{1,2,3}}")
        for name in ("answers_a", "answers_b"):
            c = cols[name]
            if c.size and c.max() > 1:
                raise ValueError(f"{name}: answers must be 0 or 1")

    @classmethod
    def from_rounds(cls, strategy: StrategySpec, seed: int, rounds: Sequence[Round]) -> Transcript:
        for pos, r in enumerate(rounds):
            if r.index != pos:
                raise ValueError(f"round at position {pos} has index {r.index}")
        return cls(
            strategy,
            seed,
            [int(Ticket(r.ticket_a)) for r in rounds],
            [int(Ticket(r.ticket_b)) for r in rounds],
            [int(Answer(r.answer_a)) for r in rounds],
            [int(Answer(r.answer_b)) for r in rounds],
        )

    @property
    def round_count(self) -> int:
        return int(self.tickets_a.size)

    def __len__(self) -> int:
        return self.round_count

    @cached_property
    def rounds(self) -> tuple[Round, ...]:
        return tuple(
            Round(n, Ticket(ta), Ticket(tb), Answer(aa), Answer(ab))
            for n, (ta, tb, aa, ab) in enumerate(
                zip(
                    self.tickets_a.tolist(),
                    self.tickets_b.tolist(),
                    self.answers_a.tolist(),
                    self.answers_b.tolist(),
                )
            )
        )

    @property
    def meta(self) -> dict:
        from concordance.strategies import spec_to_dict

        return {"strategy": spec_to_dict(self.strategy), "seed": self.seed, "round_count": self.round_count}

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Transcript):
            return NotImplemented
        return (
            self.strategy == other.strategy
            and self.seed == other.seed
            and all(
                np.array_equal(getattr(self, c), getattr(other, c))
                for c in ("tickets_a", "tickets_b", "answers_a", "answers_b")
            )
        )
