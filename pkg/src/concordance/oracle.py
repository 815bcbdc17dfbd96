"""Exact rational analytics for the built-in strategies.

Table strategies are handled by brute force: for every phase of the rule,
all nine equiprobable ticket pairs are enumerated and agreements counted.
Nothing here touches floating point except :func:`theoretical_bit_entropy`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from concordance.core import Answer, Ticket
from concordance.strategies import (
    TABLE_KINDS,
    FixedMap,
    IndependentRandom,
    ParityCheat,
    Quantum,
    StrategySpec,
    local_answer,
)

TICKETS = tuple(Ticket)
INT64_LIMIT = 2**63
HALF = Fraction(1, 2)


class NotOracleEligible(TypeError):
    """The strategy has no exact periodic or closed-form profile."""


def checked(x: Fraction) -> Fraction:
    """Reject rationals whose parts do not fit a signed 64-bit integer."""
    x = Fraction(x)
    if abs(x.numerator) >= INT64_LIMIT or x.denominator >= INT64_LIMIT:
        raise OverflowError(f"rational {x} exceeds 64-bit numerator/denominator")
    return x


def _mean(values: Sequence[Fraction]) -> Fraction:
    return checked(sum(values, Fraction(0)) / len(values))


@dataclass(frozen=True)
class ExactProfile:
    per_phase_agreement: tuple[Fraction, ...]
    average_agreement: Fraction
    yes_probability_a: tuple[Fraction, ...]
    yes_probability_b: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        fields = (self.per_phase_agreement, self.yes_probability_a, self.yes_probability_b)
        for values in fields:
            for v in values:
                checked(v)
                if not 0 <= v <= 1:
                    raise ValueError(f"probability {v} outside [0, 1]")
        if not self.per_phase_agreement:
            raise ValueError("profile needs at least one phase")
        if self.average_agreement != _mean(self.per_phase_agreement):
            raise ValueError("average_agreement must equal the mean of per_phase_agreement")

    @property
    def period(self) -> int:
        return len(self.per_phase_agreement)

    @property
    def per_round_variance(self) -> Fraction:
        """Mean over phases of p(1-p): the variance of one round's concordance bit
        once the phase is averaged out. Var(mean of m rounds) is this over m."""
        return _mean([p * (1 - p) for p in self.per_phase_agreement])


def _period(spec: StrategySpec) -> int:
    if isinstance(spec, FixedMap):
        return 1
    if isinstance(spec, ParityCheat):
        return 2
    return spec.period


def _table_profile(spec: StrategySpec) -> ExactProfile:
    period = _period(spec)
    per_phase, yes = [], []
    for phase in range(period):
        answers = {t: local_answer(spec, t, phase) for t in TICKETS}
        agree = sum(answers[ta] == answers[tb] for ta, tb in itertools.product(TICKETS, TICKETS))
        per_phase.append(Fraction(agree, 9))
        yes.append(Fraction(sum(a == Answer.YES for a in answers.values()), 3))
    return ExactProfile(tuple(per_phase), _mean(per_phase), tuple(yes), tuple(yes))


def exact_agreement_probability(spec: StrategySpec) -> ExactProfile:
    if isinstance(spec, TABLE_KINDS):
        return _table_profile(spec)
    if isinstance(spec, Quantum):
        p = checked(Fraction(1, 3) + Fraction(2, 3) * spec.q)
        return ExactProfile((p,), p, (HALF,), (HALF,))
    if isinstance(spec, IndependentRandom):
        return ExactProfile((HALF,), HALF, (HALF,), (HALF,))
    raise NotOracleEligible(
        f"{type(spec).__name__} has no exact profile; only periodic table rules "
        "and the closed-form samplers are supported"
    )


def off_diagonal_agreement(spec: StrategySpec) -> Fraction:
    """P(agree | t_A != t_B), averaged over phases."""
    if isinstance(spec, Quantum):
        return spec.q
    if isinstance(spec, IndependentRandom):
        return HALF
    if not isinstance(spec, TABLE_KINDS):
        raise NotOracleEligible(f"{type(spec).__name__} has no exact profile")
    period = _period(spec)
    per_phase = []
    for phase in range(period):
        pairs = [(a, b) for a, b in itertools.product(TICKETS, TICKETS) if a != b]
        agree = sum(local_answer(spec, a, phase) == local_answer(spec, b, phase) for a, b in pairs)
        per_phase.append(Fraction(agree, len(pairs)))
    return _mean(per_phase)


@dataclass(frozen=True)
class FixedMapRow:
    mapping: tuple[Answer, Answer, Answer]
    yes_count: int
    agreement: Fraction
    off_diagonal_agreement: Fraction


def enumerate_fixed_maps() -> list[FixedMapRow]:
    """All eight ticket-only rules with their exact agreement figures."""
    rows = []
    for mapping in itertools.product((Answer.YES, Answer.NO), repeat=3):
        spec = FixedMap(mapping)
        rows.append(
            FixedMapRow(
                spec.mapping,
                sum(a == Answer.YES for a in mapping),
                exact_agreement_probability(spec).average_agreement,
                off_diagonal_agreement(spec),
            )
        )
    return rows


def theoretical_bit_entropy(prob) -> float:
    """Binary entropy in bits, with H(0) = H(1) = 0."""
    p = Fraction(prob)
    if not 0 <= p <= 1:
        raise ValueError(f"probability {p} outside [0, 1]")
    if p in (0, 1):
        return 0.0
    x = float(p)
    return -x * math.log2(x) - (1 - x) * math.log2(1 - x)


def fraction_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def parse_fraction(text: str) -> Fraction:
    num, _, den = text.partition("/")
    return checked(Fraction(int(num), int(den or 1)))


def profile_to_dict(profile: ExactProfile) -> dict:
    def render(values):
        return [fraction_str(v) for v in values]

    return {
        "period": profile.period,
        "per_phase_agreement": render(profile.per_phase_agreement),
        "average_agreement": fraction_str(profile.average_agreement),
        "average_agreement_decimal": round(float(profile.average_agreement), 6),
        "yes_probability_a": render(profile.yes_probability_a),
        "yes_probability_b": render(profile.yes_probability_b),
    }


def profile_from_dict(data: dict) -> ExactProfile:
    return ExactProfile(
        tuple(parse_fraction(s) for s in data["per_phase_agreement"]),
        parse_fraction(data["average_agreement"]),
        tuple(parse_fraction(s) for s in data["yes_probability_a"]),
        tuple(parse_fraction(s) for s in data["yes_probability_b"]),
    )


__all__ = [
    "ExactProfile",
    "FixedMapRow",
    "NotOracleEligible",
    "enumerate_fixed_maps",
    "exact_agreement_probability",
    "off_diagonal_agreement",
    "profile_from_dict",
    "profile_to_dict",
    "theoretical_bit_entropy",
]
