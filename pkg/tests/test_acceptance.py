"""Acceptance criteria. Each test carries a ``criterion`` marker; the
terminal summary prints one PASS/FAIL line per criterion."""

import itertools
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from concordance.cli import main
from concordance.core import Answer, BitSequence
from concordance.detectors import (
    Classification,
    bell_witness,
    entropy_rate_estimate,
    frequency_test,
    predictor_test,
    randomness_verdict,
    telepathy_check,
)
from concordance.game import extract_answer_bits, extract_concordance, run_show
from concordance.oracle import exact_agreement_probability
from concordance.report import build_report
from concordance.rng import RngState
from concordance.strategies import FixedMap, IndependentRandom, ParityCheat, Quantum, TapeCheat

YES, NO = Answer.YES, Answer.NO
F = Fraction
ALPHA = 0.01
criterion = pytest.mark.criterion


class Stopwatch:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start


def all_fixed_maps():
    return [FixedMap(m) for m in itertools.product((YES, NO), repeat=3)]


@pytest.fixture(scope="module")
def parity_run():
    with Stopwatch() as sw:
        t = run_show(ParityCheat(), 10**6, 1)
    return t, sw.elapsed


@criterion(1, "fixed-map concordance fails 1-normality for all 8 maps (m=1e5)")
def test_criterion_1_squires_fixed_maps():
    with Stopwatch() as sw:
        for spec in all_fixed_maps():
            c = extract_concordance(run_show(spec, 10**5, 1))
            oracle = exact_agreement_probability(spec).average_agreement
            assert oracle in (F(5, 9), 1)
            assert abs(c.ones_fraction() - float(oracle)) <= 0.01
            assert not frequency_test(c, ALPHA).passed
    assert sw.elapsed < 5


@criterion(2, "parity cheat keeps both answer streams balanced (m=1e6)")
def test_criterion_2_parity_answer_streams_balanced(parity_run):
    t, sim_time = parity_run
    with Stopwatch() as sw:
        for party in "AB":
            bits = extract_answer_bits(t, party)
            assert abs(bits.ones_fraction() - 0.5) <= 0.005
            assert frequency_test(bits, ALPHA).passed
    assert sim_time + sw.elapsed < 5


@criterion(3, "parity cheat concordance is biased to 5/9 and fails the frequency test")
def test_criterion_3_parity_concordance_bias(parity_run):
    t, sim_time = parity_run
    with Stopwatch() as sw:
        c = extract_concordance(t)
        assert abs(c.ones_fraction() - 5 / 9) <= 0.005
        assert exact_agreement_probability(ParityCheat()).average_agreement == F(5, 9)
        assert not frequency_test(c, ALPHA).passed
    assert sim_time + sw.elapsed < 5
    notes = " ".join(build_report(t)["notes"])
    assert "5/9" in notes and "1-normal" in notes


@criterion(4, "entropy floor fails the parity cheat; period-6 tape caught by predictor (w=4)")
def test_criterion_4_entropy_floor_triggers_on_parity_concordance(parity_run):
    t, _ = parity_run
    verdict = randomness_verdict(t)
    entropy = verdict.get("entropy", "concordance")
    assert entropy.details["estimate"] == pytest.approx(entropy_rate_estimate(extract_concordance(t)))
    # known failure: the estimate is about 1.08 here, above the 0.97 floor (see README)
    assert entropy.details["estimate"] <= 0.97
    assert not entropy.passed


@criterion(4, "entropy floor fails the parity cheat; period-6 tape caught by predictor (w=4)")
def test_criterion_4_cheat_verdict_and_tape_predictor(parity_run):
    t, sim_time = parity_run
    with Stopwatch() as sw:
        verdict = randomness_verdict(t)
        assert verdict.classification is Classification.CHEAT_DETECTED
        tape = run_show(TapeCheat.period6_fixture(), 10**6, 1)
        r = predictor_test(extract_concordance(tape), 4, ALPHA)
        assert not r.passed
        assert telepathy_check(tape).passed
    assert sim_time + sw.elapsed < 30


@criterion(5, "quantum control q=1/4 looks random and beats the classical off-diagonal bound")
def test_criterion_5_quantum_control():
    with Stopwatch() as sw:
        t = run_show(Quantum(F(1, 4)), 10**6, 1)
        tele = telepathy_check(t)
        assert tele.passed and tele.statistic == 0
        assert abs(extract_concordance(t).ones_fraction() - 0.5) <= 0.005
        witness = bell_witness(t, ALPHA)
        assert witness.details["upper"] < 1 / 3
        verdict = randomness_verdict(t)
        assert verdict.classification is Classification.CONSISTENT_WITH_RANDOM, [r.label for r in verdict.failed()]
    assert sw.elapsed < 10


@criterion(6, "independent answers violate concordance (m=1e4)")
def test_criterion_6_negative_control():
    m = 10**4
    t = run_show(IndependentRandom(), m, 1)
    tele = telepathy_check(t)
    assert not tele.passed
    # violations ~ Binomial(m, 1/3 * 1/2)
    assert abs(tele.statistic - m / 6) <= 3 * math.sqrt(m * (1 / 6) * (5 / 6))
    assert randomness_verdict(t).classification is Classification.NOT_TELEPATHIC


BUILTIN = all_fixed_maps() + [ParityCheat(), TapeCheat.period6_fixture(), Quantum(F(1, 4)), IndependentRandom()]


@criterion(7, "simulation agrees with the exact oracle within 4 standard errors (m=1e6)")
@pytest.mark.parametrize("spec", BUILTIN, ids=repr)
def test_criterion_7_oracle_simulation_consistency(spec):
    m = 10**6
    profile = exact_agreement_probability(spec)
    empirical = extract_concordance(run_show(spec, m, 1)).ones_fraction()
    se = math.sqrt(profile.per_round_variance / m)
    assert abs(empirical - float(profile.average_agreement)) <= 4 * se


@criterion(7, "simulation agrees with the exact oracle within 4 standard errors (m=1e6)")
def test_criterion_7_oracle_hand_enumeration():
    for letters in itertools.product("YN", repeat=3):
        agree = sum(letters[a] == letters[b] for a in range(3) for b in range(3))
        spec = FixedMap(tuple(YES if c == "Y" else NO for c in letters))
        assert exact_agreement_probability(spec).average_agreement == F(agree, 9)
    # parity phases: even rounds answer (Y, N, Y), odd rounds (Y, N, N)
    phases = [("Y", "N", "Y"), ("Y", "N", "N")]
    expected = tuple(F(sum(p[a] == p[b] for a in range(3) for b in range(3)), 9) for p in phases)
    assert exact_agreement_probability(ParityCheat()).per_phase_agreement == expected == (F(5, 9), F(5, 9))


def _uniform(m, seed):
    words, _ = RngState(seed).words(m)
    return BitSequence((words >> np.uint64(63)).astype(np.uint8))


@criterion(8, "detector false-rejection calibration on uniform bits")
def test_criterion_8_calibration():
    seqs = [_uniform(10**4, seed) for seed in range(1000)]
    freq_rejections = sum(not frequency_test(s, ALPHA).passed for s in seqs)
    pred_rejections = sum(not predictor_test(s, 4, ALPHA).passed for s in seqs)
    assert freq_rejections <= 25
    assert pred_rejections <= 25
    assert 0.9 <= entropy_rate_estimate(_uniform(10**6, 1)) <= 1.1


@criterion(9, "simulate + analyze is byte-for-byte reproducible")
def test_criterion_9_determinism(tmp_path):
    outputs = []
    for run in ("a", "b"):
        transcript = tmp_path / f"{run}.jsonl"
        report = tmp_path / f"{run}.json"
        assert main(["simulate", "--strategy", '{"kind":"ParityCheat"}', "--rounds", "20000", "--seed", "1", "--out", str(transcript)]) == 0
        assert main(["analyze", str(transcript), "--out", str(report)]) == 2
        outputs.append((transcript.read_bytes(), report.read_bytes()))
    assert outputs[0] == outputs[1]
