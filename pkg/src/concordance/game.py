"""Running the show and extracting bit streams from its transcript.

Stream layout for ``run_show(strategy, m, seed)``:

* tickets come from ``RngState(seed, 0)``, drawn in the order
  t_A(0), t_B(0), t_A(1), t_B(1), ... (one :func:`draw_ticket_pair` per round);
* joint samplers draw from ``RngState(derive_seed(seed, 1), 0)``, two words
  per round.

Round indices start at 0, so the parity rule answers YES on ticket 3 in
rounds 0, 2, 4, ...
"""

from __future__ import annotations

import numpy as np

from concordance.core import BitSequence, Ticket, Transcript
from concordance.rng import MASK64, RngState, derive_seed
from concordance.strategies import (
    TABLE_KINDS,
    IndependentRandom,
    Quantum,
    StrategySpec,
    local_answers,
    sample_independent_many,
    sample_quantum_many,
)

STRATEGY_STREAM = 1


def draw_ticket_pair(state: RngState) -> tuple[Ticket, Ticket, RngState]:
    t_a, state = state.ticket()
    t_b, state = state.ticket()
    return Ticket(t_a), Ticket(t_b), state


def draw_ticket_pairs(state: RngState, m: int) -> tuple[np.ndarray, np.ndarray, RngState]:
    """``m`` successive :func:`draw_ticket_pair` calls, vectorized."""
    tickets, state = state.tickets(2 * m)
    return tickets[0::2].copy(), tickets[1::2].copy(), state


def run_show(strategy: StrategySpec, m: int, seed: int) -> Transcript:
    if m < 0:
        raise ValueError(f"round count must be non-negative, got {m}")
    if not 0 <= seed <= MASK64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    t_a, t_b, _ = draw_ticket_pairs(RngState(seed), m)
    if isinstance(strategy, TABLE_KINDS):
        n = np.arange(m, dtype=np.int64)
        # each player sees only their own ticket and the round index
        a_a = local_answers(strategy, t_a, n)
        a_b = local_answers(strategy, t_b, n)
    elif isinstance(strategy, Quantum):
        a_a, a_b, _ = sample_quantum_many(strategy.q, t_a, t_b, RngState(derive_seed(seed, STRATEGY_STREAM)))
    elif isinstance(strategy, IndependentRandom):
        a_a, a_b, _ = sample_independent_many(m, RngState(derive_seed(seed, STRATEGY_STREAM)))
    else:
        raise TypeError(f"unknown strategy: {strategy!r}")
    return Transcript(strategy, seed, t_a, t_b, a_a, a_b)


def extract_concordance(t: Transcript) -> BitSequence:
    """Bit n is 1 exactly when both players wrote the same answer in round n."""
    return BitSequence((t.answers_a == t.answers_b).astype(np.uint8))


def extract_answer_bits(t: Transcript, party: str) -> BitSequence:
    """One player's answers as bits (YES=1)."""
    party = party.upper()
    if party == "A":
        return BitSequence(t.answers_a)
    if party == "B":
        return BitSequence(t.answers_b)
    raise ValueError(f"party must be 'A' or 'B', got {party!r}")

