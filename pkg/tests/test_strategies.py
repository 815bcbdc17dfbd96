import itertools
import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from concordance.core import Answer, Ticket
from concordance.game import extract_concordance, run_show
from concordance.rng import RngState
from concordance.strategies import (
    FixedMap,
    IndependentRandom,
    ParityCheat,
    Quantum,
    StrategyError,
    TapeCheat,
    answer_fixed,
    answer_parity,
    answer_tape,
    local_answers,
    parse_spec,
    sample_independent,
    sample_independent_many,
    sample_quantum,
    sample_quantum_many,
    spec_from_dict,
    spec_to_dict,
)

YES, NO = Answer.YES, Answer.NO
TICKETS = list(Ticket)


def test_answer_fixed_examples():
    assert answer_fixed((YES, NO, YES), 2) is NO
    for t in TICKETS:
        assert answer_fixed((YES, YES, YES), t) is YES


def test_fixed_map_agreement_by_enumeration():
    mapping = (YES, NO, NO)
    agree = [(a, b) for a, b in itertools.product(TICKETS, TICKETS) if answer_fixed(mapping, a) == answer_fixed(mapping, b)]
    assert sorted(agree) == [(1, 1), (2, 2), (2, 3), (3, 2), (3, 3)]


def test_answer_parity_examples():
    assert answer_parity(3, 4) is YES
    assert answer_parity(3, 7) is NO
    for n in (0, 1, 10, 999):
        assert answer_parity(1, n) is YES
        assert answer_parity(2, n) is NO


def test_tape_p1_equals_fixed_map():
    for mapping in itertools.product((YES, NO), repeat=3):
        tape = TapeCheat.from_fixed(mapping)
        assert tape.period == 1
        for t, n in itertools.product(TICKETS, range(3)):
            assert answer_tape(tape, t, n) == answer_fixed(mapping, t)


def test_tape_p2_equals_parity_exhaustively():
    tape = TapeCheat.parity()
    for t, n in itertools.product(TICKETS, range(2)):
        assert answer_tape(tape, t, n) == answer_parity(t, n)
    # and beyond one period
    for t, n in itertools.product(TICKETS, range(50)):
        assert answer_tape(tape, t, n) == answer_parity(t, n)


def test_period6_fixture_cycles_with_period_six():
    tape = TapeCheat.period6_fixture()
    seq = [answer_tape(tape, 3, n) for n in range(24)]
    assert seq[:6] == [YES, NO, YES, NO, YES, YES]
    assert all(seq[n] == seq[n + 6] for n in range(18))
    assert all(any(seq[n] != seq[n + d] for n in range(12)) for d in (1, 2, 3, 4, 5))


def test_fixed_map_independent_of_round():
    spec = FixedMap((NO, YES, NO))
    n = np.arange(1000)
    for t in TICKETS:
        answers = local_answers(spec, np.full(1000, int(t), dtype=np.uint8), n)
        assert (answers == answer_fixed(spec.mapping, t)).all()


@pytest.mark.parametrize("spec", [FixedMap((YES, NO, YES)), ParityCheat(), TapeCheat.period6_fixture(), TapeCheat.keyed(5, 37)])
def test_vector_answers_match_scalar(spec):
    from concordance.strategies import local_answer

    tickets = np.array([1, 2, 3] * 40, dtype=np.uint8)
    n = np.arange(120)
    vec = local_answers(spec, tickets, n)
    assert vec.tolist() == [local_answer(spec, t, i) for t, i in zip(tickets.tolist(), n.tolist())]


@pytest.mark.parametrize(
    "spec", [FixedMap((YES, NO, NO)), FixedMap((NO, NO, NO)), ParityCheat(), TapeCheat.period6_fixture(), TapeCheat.keyed(1, 500)]
)
def test_table_strategies_perfectly_concordant(spec):
    t = run_show(spec, 20_000, 3)
    same = t.tickets_a == t.tickets_b
    assert (t.answers_a[same] == t.answers_b[same]).all()


def test_quantum_equal_tickets_always_agree():
    state = RngState(1)
    for q in (0, Fraction(1, 4), 1):
        for _ in range(200):
            a, b, state = sample_quantum(q, 2, 2, state)
            assert a == b


def test_quantum_q1_always_agrees():
    state = RngState(2)
    for ta, tb in itertools.product(TICKETS, TICKETS):
        for _ in range(50):
            a, b, state = sample_quantum(1, ta, tb, state)
            assert a == b


def test_quantum_q0_always_disagrees_off_diagonal():
    a, b, _ = sample_quantum_many(0, np.full(1000, 1, np.uint8), np.full(1000, 3, np.uint8), RngState(4))
    assert (a != b).all()


def test_quantum_overall_agreement_half():
    # 1/3 * 1 + 2/3 * 1/4 = 1/2
    t = run_show(Quantum(Fraction(1, 4)), 10**6, 6)
    assert abs(extract_concordance(t).ones_fraction() - 0.5) <= 0.005


@pytest.mark.parametrize("q", [0, Fraction(1, 4), Fraction(3, 4), 1])
def test_quantum_marginals_fair(q):
    t = run_show(Quantum(q), 200_000, 9)
    for stream in (t.answers_a, t.answers_b):
        assert abs(stream.mean() - 0.5) <= 4 * 0.5 / np.sqrt(200_000)


def test_quantum_vector_matches_scalar():
    t_a = np.array([1, 2, 3, 1, 3, 2] * 50, dtype=np.uint8)
    t_b = np.array([1, 3, 2, 2, 3, 1] * 50, dtype=np.uint8)
    va, vb, vstate = sample_quantum_many(Fraction(1, 4), t_a, t_b, RngState(12))
    state, sa, sb = RngState(12), [], []
    for x, y in zip(t_a.tolist(), t_b.tolist()):
        a, b, state = sample_quantum(Fraction(1, 4), x, y, state)
        sa.append(a)
        sb.append(b)
    assert va.tolist() == sa and vb.tolist() == sb and vstate == state


def test_quantum_rejects_bad_q():
    for bad in (-0.1, 1.5, "x", True):
        with pytest.raises(StrategyError):
            Quantum(bad)
    with pytest.raises(StrategyError):
        sample_quantum(2, 1, 1, RngState(0))


def test_independent_agreement_half():
    a, b, _ = sample_independent_many(10**6, RngState(13))
    assert abs((a == b).mean() - 0.5) <= 0.005


def test_independent_blind_to_equal_tickets():
    t = run_show(IndependentRandom(), 10**5, 14)
    same = t.tickets_a == t.tickets_b
    assert abs((t.answers_a[same] == t.answers_b[same]).mean() - 0.5) <= 0.01


def test_independent_deterministic_and_matches_scalar():
    va, vb, _ = sample_independent_many(100, RngState(15))
    state, pairs = RngState(15), []
    for _ in range(100):
        a, b, state = sample_independent(state)
        pairs.append((a, b))
    assert list(zip(va.tolist(), vb.tolist())) == pairs


def test_spec_validation_names_field():
    with pytest.raises(StrategyError) as err:
        FixedMap((YES, NO))
    assert err.value.field == "map"
    with pytest.raises(StrategyError) as err:
        TapeCheat(((YES,), (NO, NO), (YES,)))
    assert err.value.field == "table[1]"
    with pytest.raises(StrategyError) as err:
        TapeCheat(((), (), ()))
    assert err.value.field == "period"
    with pytest.raises(StrategyError) as err:
        spec_from_dict({"kind": "Telepathy"})
    assert err.value.field == "kind"
    with pytest.raises(StrategyError) as err:
        spec_from_dict({"kind": "TapeCheat", "period": 3, "table": [["YES"], ["NO"], ["YES"]]})
    assert err.value.field == "period"


answers = st.sampled_from([YES, NO])
specs = st.one_of(
    st.tuples(answers, answers, answers).map(FixedMap),
    st.just(ParityCheat()),
    st.just(IndependentRandom()),
    st.fractions(min_value=0, max_value=1, max_denominator=1000).map(Quantum),
    st.integers(1, 8).flatmap(
        lambda p: st.tuples(*[st.lists(answers, min_size=p, max_size=p).map(tuple)] * 3).map(TapeCheat)
    ),
)


@given(specs)
def test_spec_json_round_trip(spec):
    text = json.dumps(spec_to_dict(spec))
    assert parse_spec(text) == spec


def test_parse_spec_from_file(tmp_path):
    path = tmp_path / "s.json"
    path.write_text('{"kind": "Quantum", "q": 0.25}')
    assert parse_spec(str(path)) == Quantum(Fraction(1, 4))
    with pytest.raises(StrategyError):
        parse_spec(str(tmp_path / "missing.json"))
    with pytest.raises(StrategyError):
        parse_spec("{not json")


def test_quantum_float_q_is_read_as_decimal():
    assert Quantum(0.3).q == Fraction(3, 10)
