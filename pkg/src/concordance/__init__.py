"""Simulator and cheat detectors for the two-player ticket show."""

from concordance.core import Answer, BitSequence, Round, Ticket, Transcript
from concordance.detectors import (
    Classification,
    DetectorConfig,
    TestResult,
    Verdict,
    bell_witness,
    borel_block_test,
    entropy_rate_estimate,
    frequency_test,
    lz78_phrase_count,
    predictor_test,
    randomness_verdict,
    telepathy_check,
)
from concordance.game import draw_ticket_pair, extract_answer_bits, extract_concordance, run_show
from concordance.oracle import (
    ExactProfile,
    enumerate_fixed_maps,
    exact_agreement_probability,
    theoretical_bit_entropy,
)
from concordance.rng import RngState
from concordance.strategies import (
    FixedMap,
    IndependentRandom,
    ParityCheat,
    Quantum,
    StrategySpec,
    TapeCheat,
    answer_fixed,
    answer_parity,
    answer_tape,
    sample_independent,
    sample_quantum,
)

__version__ = "0.1.0"
