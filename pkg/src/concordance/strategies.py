"""Answering rules for the two players.

Deterministic local rules (``FixedMap``, ``ParityCheat``, ``TapeCheat``)
are evaluated one player at a time from that player's ticket and the round
index only; both players hold the same rule. ``Quantum`` and
``IndependentRandom`` are joint samplers that stand in for the genuinely
correlated performance and for the no-agreement control.

Every table rule has perfect concordance by construction, and every
phase of it is itself a fixed map, so its per-round agreement is 5/9 or 1.
A ``TapeCheat`` with a long random table therefore defeats the compression
and prediction proxies but never the frequency test on the concordance
sequence.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import ClassVar, Sequence, Union

import numpy as np

from concordance.core import Answer, Ticket
from concordance.rng import RngState

YES, NO = Answer.YES, Answer.NO


class StrategyError(ValueError):
    """Invalid strategy description; ``field`` names the offending entry."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


def _answers(values: Sequence, field: str) -> tuple[Answer, ...]:
    try:
        return tuple(Answer.parse(v) for v in values)
    except (TypeError, ValueError) as exc:
        raise StrategyError(field, str(exc)) from None


@dataclass(frozen=True)
class FixedMap:
    """Answer depends on the ticket alone: ``mapping[t - 1]``."""

    mapping: tuple[Answer, Answer, Answer]
    kind: ClassVar[str] = "FixedMap"

    def __post_init__(self) -> None:
        mapping = _answers(self.mapping, "map")
        if len(mapping) != 3:
            raise StrategyError("map", f"expected 3 entries, got {len(mapping)}")
        object.__setattr__(self, "mapping", mapping)


@dataclass(frozen=True)
class ParityCheat:
    """YES on ticket 1, NO on ticket 2, and on ticket 3 YES for even rounds, NO for odd."""

    kind: ClassVar[str] = "ParityCheat"


@dataclass(frozen=True)
class TapeCheat:
    """Pre-agreed periodic table: answer is ``table[t - 1][n % period]``.

    ``generator`` is a free-form label recording how the table was made;
    the table itself is the whole shared material.
    """

    table: tuple[tuple[Answer, ...], tuple[Answer, ...], tuple[Answer, ...]]
    generator: str = "explicit"
    kind: ClassVar[str] = "TapeCheat"

    def __post_init__(self) -> None:
        if len(self.table) != 3:
            raise StrategyError("table", f"expected 3 rows (one per ticket), got {len(self.table)}")
        rows = tuple(_answers(row, f"table[{i}]") for i, row in enumerate(self.table))
        period = len(rows[0])
        if period < 1:
            raise StrategyError("period", "must be at least 1")
        for i, row in enumerate(rows):
            if len(row) != period:
                raise StrategyError(f"table[{i}]", f"expected {period} entries, got {len(row)}")
        object.__setattr__(self, "table", rows)

    @property
    def period(self) -> int:
        return len(self.table[0])

    @classmethod
    def from_fixed(cls, mapping: Sequence) -> TapeCheat:
        return cls(tuple((Answer.parse(a),) for a in mapping), generator="fixed")

    @classmethod
    def parity(cls) -> TapeCheat:
        """Period-2 table equal to :class:`ParityCheat` for every ticket and round."""
        return cls(((YES, YES), (NO, NO), (YES, NO)), generator="parity")

    @classmethod
    def period6_fixture(cls) -> TapeCheat:
        """Asymmetric period-6 table used as the standard detector fixture.

        Phase maps (t=1, t=2, t=3): YYY, YNN, NNY, NNN, YNY, NYY, so the
        per-phase agreement is 1, 5/9, 5/9, 1, 5/9, 5/9 and the ticket-3 row
        YNYNYY has least period 6.
        """
        rows = ("YYNNYN", "YNNNNY", "YNYNYY")
        return cls(
            tuple(tuple(YES if c == "Y" else NO for c in row) for row in rows),
            generator="period6-fixture",
        )

    @classmethod
    def keyed(cls, key: int, period: int) -> TapeCheat:
        """Table filled from the keyed generator: a long shared random tape."""
        if period < 1:
            raise StrategyError("period", "must be at least 1")
        words, _ = RngState(key).words(3 * period)
        bits = (words >> np.uint64(63)).astype(np.uint8).reshape(3, period)
        return cls(tuple(tuple(Answer(int(b)) for b in row) for row in bits), generator=f"keyed:{key}")


def _fraction(value, field: str) -> Fraction:
    try:
        if isinstance(value, float):
            # decimal reading keeps 0.3 as 3/10 rather than its binary expansion
            return Fraction(repr(value))
        return Fraction(value)
    except (TypeError, ValueError, ZeroDivisionError):
        raise StrategyError(field, f"not a number: {value!r}") from None


@dataclass(frozen=True)
class Quantum:
    """Joint sampler: equal tickets always agree, different tickets agree with probability q."""

    q: Fraction = Fraction(1, 4)
    kind: ClassVar[str] = "Quantum"

    def __post_init__(self) -> None:
        if isinstance(self.q, bool):
            raise StrategyError("q", f"not a number: {self.q!r}")
        q = _fraction(self.q, "q")
        if not 0 <= q <= 1:
            raise StrategyError("q", f"must lie in [0, 1], got {q}")
        object.__setattr__(self, "q", q)


@dataclass(frozen=True)
class IndependentRandom:
    """Negative control: two independent fair answers, blind to the tickets."""

    kind: ClassVar[str] = "IndependentRandom"


StrategySpec = Union[FixedMap, ParityCheat, TapeCheat, Quantum, IndependentRandom]
KINDS: dict[str, type] = {
    cls.kind: cls for cls in (FixedMap, ParityCheat, TapeCheat, Quantum, IndependentRandom)
}
TABLE_KINDS = (FixedMap, ParityCheat, TapeCheat)


def answer_fixed(mapping: Sequence[Answer], t: int) -> Answer:
    return Answer(mapping[Ticket(t) - 1])


def answer_parity(t: int, n: int) -> Answer:
    t = Ticket(t)
    if t == Ticket.ONE:
        return YES
    if t == Ticket.TWO:
        return NO
    return YES if n % 2 == 0 else NO


def answer_tape(spec: TapeCheat, t: int, n: int) -> Answer:
    return spec.table[Ticket(t) - 1][n % spec.period]


def local_answer(spec: StrategySpec, t: int, n: int) -> Answer:
    """One player's answer under a deterministic local rule."""
    if isinstance(spec, FixedMap):
        return answer_fixed(spec.mapping, t)
    if isinstance(spec, ParityCheat):
        return answer_parity(t, n)
    if isinstance(spec, TapeCheat):
        return answer_tape(spec, t, n)
    raise TypeError(f"{type(spec).__name__} is not a local table strategy")


def answer_table(spec: StrategySpec) -> np.ndarray:
    """The rule as a (3, period) uint8 array: row t-1, column n mod period."""
    if isinstance(spec, FixedMap):
        return np.array([[a] for a in spec.mapping], dtype=np.uint8)
    if isinstance(spec, ParityCheat):
        return np.array(TapeCheat.parity().table, dtype=np.uint8)
    if isinstance(spec, TapeCheat):
        return np.array(spec.table, dtype=np.uint8)
    raise TypeError(f"{type(spec).__name__} is not a local table strategy")


def local_answers(spec: StrategySpec, tickets: np.ndarray, indices: np.ndarray) -> np.ndarray:
    """Vectorized :func:`local_answer` over one player's tickets."""
    table = answer_table(spec)
    return table[tickets.astype(np.intp) - 1, indices % table.shape[1]]


def _agree_threshold(q: Fraction) -> int:
    # agree iff the top 53 bits of a word, read as k / 2**53, fall below q
    scaled = q * 2**53
    return -(-scaled.numerator // scaled.denominator)


def sample_quantum(q, t_a: int, t_b: int, state: RngState) -> tuple[Answer, Answer, RngState]:
    """One round of the correlated sampler; consumes two words."""
    q = Quantum(q).q
    w_alice, state = state.word()
    w_agree, state = state.word()
    alice = Answer(w_alice >> 63)
    if Ticket(t_a) == Ticket(t_b) or (w_agree >> 11) < _agree_threshold(q):
        return alice, alice, state
    return alice, Answer(1 - alice), state


def sample_quantum_many(q, t_a: np.ndarray, t_b: np.ndarray, state: RngState):
    q = Quantum(q).q
    words, state = state.words(2 * t_a.size)
    alice = (words[0::2] >> np.uint64(63)).astype(np.uint8)
    agree = (t_a == t_b) | ((words[1::2] >> np.uint64(11)) < np.uint64(_agree_threshold(q)))
    bob = np.where(agree, alice, 1 - alice).astype(np.uint8)
    return alice, bob, state


def sample_independent(state: RngState) -> tuple[Answer, Answer, RngState]:
    """Two independent fair answers; consumes two words."""
    w_alice, state = state.word()
    w_bob, state = state.word()
    return Answer(w_alice >> 63), Answer(w_bob >> 63), state


def sample_independent_many(n: int, state: RngState):
    words, state = state.words(2 * n)
    bits = (words >> np.uint64(63)).astype(np.uint8)
    return bits[0::2].copy(), bits[1::2].copy(), state


def spec_to_dict(spec: StrategySpec) -> dict:
    if isinstance(spec, FixedMap):
        return {"kind": spec.kind, "map": [a.name for a in spec.mapping]}
    if isinstance(spec, TapeCheat):
        return {
            "kind": spec.kind,
            "generator": spec.generator,
            "period": spec.period,
            "table": [[a.name for a in row] for row in spec.table],
        }
    if isinstance(spec, Quantum):
        return {"kind": spec.kind, "q": f"{spec.q.numerator}/{spec.q.denominator}"}
    if isinstance(spec, (ParityCheat, IndependentRandom)):
        return {"kind": spec.kind}
    raise StrategyError("kind", f"unknown strategy {type(spec).__name__}")


def spec_from_dict(data: dict) -> StrategySpec:
    if not isinstance(data, dict):
        raise StrategyError("strategy", "expected a JSON object")
    kind = data.get("kind")
    if kind not in KINDS:
        raise StrategyError("kind", f"unknown strategy kind {kind!r}; expected one of {sorted(KINDS)}")
    if kind == "FixedMap":
        if "map" not in data:
            raise StrategyError("map", "missing")
        if not isinstance(data["map"], list):
            raise StrategyError("map", "expected a list of 3 answers")
        return FixedMap(tuple(data["map"]))
    if kind == "TapeCheat":
        table = data.get("table")
        if not isinstance(table, list) or not all(isinstance(row, list) for row in table):
            raise StrategyError("table", "expected 3 lists of answers")
        spec = TapeCheat(tuple(tuple(row) for row in table), generator=str(data.get("generator", "explicit")))
        if "period" in data and data["period"] != spec.period:
            raise StrategyError("period", f"declared {data['period']} but table has {spec.period} columns")
        return spec
    if kind == "Quantum":
        return Quantum(data.get("q", Fraction(1, 4)))
    return KINDS[kind]()


def parse_spec(text: str) -> StrategySpec:
    """Read a strategy from inline JSON or from a path to a JSON file."""
    stripped = text.strip()
    if not stripped.startswith("{"):
        try:
            stripped = Path(text).read_text()
        except OSError as exc:
            raise StrategyError("strategy", f"cannot read {text!r}: {exc.strerror}") from None
    try:
        data = json.loads(stripped)
    except json.JSONDecodeError as exc:
        raise StrategyError("strategy", f"invalid JSON: {exc.msg}") from None
    return spec_from_dict(data)


def describe(spec: StrategySpec) -> str:
    """Short human label, e.g. ``FixedMap(YNN)`` or ``Quantum(q=1/4)``."""
    if isinstance(spec, FixedMap):
        return "FixedMap(" + "".join(a.name[0] for a in spec.mapping) + ")"
    if isinstance(spec, TapeCheat):
        return f"TapeCheat(p={spec.period},{spec.generator})"
    if isinstance(spec, Quantum):
        return f"Quantum(q={spec.q})"
    return spec.kind
