"""Randomness and concordance detectors, and the aggregated verdict.

Every detector returns a :class:`TestResult` whose ``passed`` flag is
``statistic <= threshold``; a result fails only on strict exceedance.
Statistics are oriented so that larger means "less random":

=============  =====================================  ===========================
test           statistic                              threshold
=============  =====================================  ===========================
frequency      |ones fraction - 1/2|                  z(alpha) / (2 sqrt(m))
block_k<k>     max_v |freq(v) - 2**-k|                sqrt(log2(m) / m)
predictor      accuracy - 1/2                         z(alpha) / (2 sqrt(m - w))
entropy        1 - entropy rate estimate              1 - floor
telepathy      violations on equal tickets            0
bell_witness   upper confidence bound on P(agree|≠)   1/3
=============  =====================================  ===========================

``z(alpha)`` is the two-sided standard normal quantile.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from enum import Enum
from fractions import Fraction
from statistics import NormalDist

import numpy as np

from concordance.core import BitSequence, Transcript
from concordance.game import extract_answer_bits, extract_concordance

STREAMS = ("concordance", "answers_a", "answers_b")
STREAM_TESTS = ("frequency", "block", "predictor", "entropy")
CLASSICAL_OFF_DIAGONAL_MIN = Fraction(1, 3)


class InsufficientDataError(ValueError):
    def __init__(self, test: str, message: str):
        super().__init__(f"{test}: {message}")
        self.test = test


@dataclass(frozen=True)
class TestResult:
    name: str
    statistic: float
    threshold: float
    passed: bool
    sample_size: int
    stream: str | None = None
    details: dict = field(default_factory=dict, compare=False)

    __test__ = False  # keep pytest from collecting this class

    def __post_init__(self) -> None:
        if self.passed != (self.statistic <= self.threshold):
            raise ValueError(f"{self.name}: passed must equal statistic <= threshold")

    @classmethod
    def judge(cls, name, statistic, threshold, sample_size, stream=None, **details) -> TestResult:
        statistic, threshold = float(statistic), float(threshold)
        return cls(name, statistic, threshold, statistic <= threshold, int(sample_size), stream, details)

    @property
    def label(self) -> str:
        return f"{self.name}[{self.stream}]" if self.stream else self.name


class Classification(str, Enum):
    CONSISTENT_WITH_RANDOM = "CONSISTENT_WITH_RANDOM"
    CHEAT_DETECTED = "CHEAT_DETECTED"
    NOT_TELEPATHIC = "NOT_TELEPATHIC"


@dataclass(frozen=True)
class Verdict:
    telepathy_ok: bool
    tests: tuple[TestResult, ...]
    classification: Classification

    def __post_init__(self) -> None:
        expected = classify(self.telepathy_ok, self.tests)
        if self.classification != expected:
            raise ValueError(f"classification {self.classification} inconsistent with tests ({expected})")

    def failed(self) -> list[TestResult]:
        return [t for t in self.tests if not t.passed]

    def get(self, name: str, stream: str | None = None) -> TestResult:
        for t in self.tests:
            if t.name == name and t.stream == stream:
                return t
        raise KeyError((name, stream))


def classify(telepathy_ok: bool, tests) -> Classification:
    if not telepathy_ok:
        return Classification.NOT_TELEPATHIC
    if any(not t.passed for t in tests):
        return Classification.CHEAT_DETECTED
    return Classification.CONSISTENT_WITH_RANDOM


def z_two_sided(alpha: float) -> float:
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    return NormalDist().inv_cdf(1 - alpha / 2)


def _bits(bits: BitSequence | np.ndarray) -> np.ndarray:
    return bits.bits if isinstance(bits, BitSequence) else np.asarray(bits, dtype=np.uint8)


def frequency_test(bits: BitSequence, alpha: float = 0.01, stream: str | None = None) -> TestResult:
    x = _bits(bits)
    m = x.size
    if m < 100:
        raise InsufficientDataError("frequency", f"needs at least 100 bits, got {m}")
    ones = int(x.sum(dtype=np.int64))
    statistic = abs(ones / m - 0.5)
    return TestResult.judge(
        "frequency", statistic, z_two_sided(alpha) / (2 * math.sqrt(m)), m, stream, ones_fraction=ones / m
    )


def block_frequencies(bits: BitSequence, k: int) -> np.ndarray:
    """Empirical frequency of each k-bit value over non-overlapping blocks (MSB first)."""
    x = _bits(bits)
    n_blocks = x.size // k
    blocks = x[: n_blocks * k].reshape(n_blocks, k).astype(np.int64)
    values = blocks @ (1 << np.arange(k - 1, -1, -1, dtype=np.int64))
    return np.bincount(values, minlength=2**k) / n_blocks


def borel_block_test(bits: BitSequence, k: int, alpha: float = 0.01, stream: str | None = None) -> TestResult:
    """Non-overlapping k-block frequency check.

    ``alpha`` is accepted for a uniform call signature; the threshold
    sqrt(log2(m)/m) does not depend on it.
    """
    x = _bits(bits)
    m = x.size
    if k < 1:
        raise InsufficientDataError(f"block_k{k}", "block order must be at least 1")
    if m < 100 * 2**k:
        raise InsufficientDataError(f"block_k{k}", f"needs at least {100 * 2**k} bits, got {m}")
    freqs = block_frequencies(x, k)
    statistic = float(np.abs(freqs - 2.0**-k).max())
    return TestResult.judge(f"block_k{k}", statistic, math.sqrt(math.log2(m) / m), m, stream, k=k)


def lz78_phrase_count(bits: BitSequence) -> int:
    """Phrases in the incremental (LZ78) parsing; a trailing partial phrase counts."""
    children: dict[int, int] = {}
    node, size, count = 0, 1, 0
    for b in _bits(bits).tolist():
        key = (node << 1) | b
        child = children.get(key)
        if child is None:
            children[key] = size
            size += 1
            count += 1
            node = 0
        else:
            node = child
    return count + (node != 0)


def lz78_code_length(c: int) -> float:
    """Bits needed to encode c LZ78 phrases when phrase j costs log2(j) + 1:
    a pointer to one of the j dictionary entries seen so far, plus one new bit."""
    return (math.lgamma(c + 1) / math.log(2) + c) if c else 0.0


def _require_entropy_size(m: int) -> None:
    if m < 1000:
        raise InsufficientDataError("entropy", f"needs at least 1000 bits, got {m}")


def entropy_rate_estimate(bits: BitSequence) -> float:
    """LZ78 compressed length per input bit; well below 1 means compressible."""
    x = _bits(bits)
    _require_entropy_size(x.size)
    return lz78_code_length(lz78_phrase_count(x)) / x.size


def entropy_test(bits: BitSequence, floor: float = 0.97, stream: str | None = None) -> TestResult:
    x = _bits(bits)
    _require_entropy_size(x.size)
    phrases = lz78_phrase_count(x)
    estimate = lz78_code_length(phrases) / x.size
    return TestResult.judge(
        "entropy", 1 - estimate, 1 - floor, x.size, stream, estimate=estimate, phrase_count=phrases
    )


def predictor_accuracy(bits: BitSequence, w: int) -> float:
    """Accuracy of the online majority predictor with a w-bit context.

    At each position i >= w the prediction is the bit seen more often after
    the context bits[i-w:i] at earlier positions; ties and unseen contexts
    predict 0. Vectorized: positions are grouped by context (stable sort
    keeps time order), and running counts within a group give the tallies
    available at prediction time.
    """
    x = _bits(bits).astype(np.int64)
    m = x.size
    n = m - w
    if n <= 0:
        return 0.0
    ctx = np.zeros(n, dtype=np.int64)
    for j in range(w):
        ctx = (ctx << 1) | x[j : j + n]
    nxt = x[w:]
    order = np.argsort(ctx, kind="stable")
    sctx, sbits = ctx[order], nxt[order]
    starts = np.flatnonzero(np.r_[True, sctx[1:] != sctx[:-1]])
    group = np.repeat(np.arange(starts.size), np.diff(np.r_[starts, n]))
    cum = np.cumsum(sbits)
    before = cum - sbits
    ones_prev = before - (cum[starts] - sbits[starts])[group]
    seen = np.arange(n) - starts[group]
    predict = (ones_prev > seen - ones_prev).astype(np.int64)
    return float((predict == sbits).sum()) / n


def predictor_test(bits: BitSequence, w: int = 4, alpha: float = 0.01, stream: str | None = None) -> TestResult:
    x = _bits(bits)
    m = x.size
    if not 1 <= w <= 16:
        raise InsufficientDataError(f"predictor_w{w}", "context length must lie in [1, 16]")
    if m < 100 * 2**w:
        raise InsufficientDataError(f"predictor_w{w}", f"needs at least {100 * 2**w} bits, got {m}")
    accuracy = predictor_accuracy(x, w)
    threshold = z_two_sided(alpha) / (2 * math.sqrt(m - w))
    return TestResult.judge("predictor", accuracy - 0.5, threshold, m, stream, w=w, accuracy=accuracy)


def telepathy_check(t: Transcript) -> TestResult:
    """Every round with equal tickets must carry equal answers."""
    same = t.tickets_a == t.tickets_b
    violations = int((same & (t.answers_a != t.answers_b)).sum())
    return TestResult.judge("telepathy", violations, 0, t.round_count, equal_ticket_rounds=int(same.sum()))


def bell_witness(t: Transcript, alpha: float = 0.01) -> TestResult:
    """Off-diagonal agreement against the best classical value 1/3.

    ``passed`` means the witness triggered: the upper end of the
    normal-approximation interval for P(agree | t_A != t_B) is at or below
    1/3, which no concordant ticket-only rule can reach.
    """
    off = t.tickets_a != t.tickets_b
    n = int(off.sum())
    if n < 100:
        raise InsufficientDataError("bell_witness", f"needs at least 100 rounds with different tickets, got {n}")
    agree = int((off & (t.answers_a == t.answers_b)).sum())
    p = agree / n
    half_width = z_two_sided(alpha) * math.sqrt(p * (1 - p) / n)
    return TestResult.judge(
        "bell_witness",
        p + half_width,
        CLASSICAL_OFF_DIAGONAL_MIN,
        n,
        estimate=p,
        lower=p - half_width,
        upper=p + half_width,
    )


@dataclass(frozen=True)
class DetectorConfig:
    alpha: float = 0.01
    blocks_k: tuple[int, ...] = (1, 2, 3, 4)
    predictor_w: int = 4
    entropy_floor: float = 0.97
    enabled: tuple[str, ...] = STREAM_TESTS

    def __post_init__(self) -> None:
        z_two_sided(self.alpha)
        unknown = set(self.enabled) - set(STREAM_TESTS)
        if unknown:
            raise ValueError(f"enabled: unknown tests {sorted(unknown)}; choose from {list(STREAM_TESTS)}")
        object.__setattr__(self, "blocks_k", tuple(int(k) for k in self.blocks_k))
        object.__setattr__(self, "enabled", tuple(self.enabled))

    @classmethod
    def from_dict(cls, data: dict) -> DetectorConfig:
        known = {"alpha", "blocks_k", "predictor_w", "entropy_floor", "enabled"}
        extra = set(data) - known
        if extra:
            raise ValueError(f"unknown detector settings {sorted(extra)}")
        return cls(**data)

    def to_dict(self) -> dict:
        d = asdict(self)
        return {k: list(v) if isinstance(v, tuple) else v for k, v in d.items()}


def stream_bits(t: Transcript) -> dict[str, BitSequence]:
    return {
        "concordance": extract_concordance(t),
        "answers_a": extract_answer_bits(t, "A"),
        "answers_b": extract_answer_bits(t, "B"),
    }


def _stream_tests(bits: BitSequence, stream: str, config: DetectorConfig) -> list[TestResult]:
    try:
        return _run_stream_tests(bits, stream, config)
    except InsufficientDataError as exc:
        raise InsufficientDataError(f"{exc.test}[{stream}]", str(exc).split(": ", 1)[1]) from None


def _run_stream_tests(bits: BitSequence, stream: str, config: DetectorConfig) -> list[TestResult]:
    results = []
    if "frequency" in config.enabled:
        results.append(frequency_test(bits, config.alpha, stream))
    if "block" in config.enabled:
        results.extend(borel_block_test(bits, k, config.alpha, stream) for k in config.blocks_k)
    if "predictor" in config.enabled:
        results.append(predictor_test(bits, config.predictor_w, config.alpha, stream))
    if "entropy" in config.enabled:
        results.append(entropy_test(bits, config.entropy_floor, stream))
    return results


def randomness_verdict(t: Transcript, config: DetectorConfig | None = None) -> Verdict:
    """Telepathy check, then every enabled test on the concordance sequence and
    both answer streams. Any failure counts; there is no multiple-testing
    correction."""
    config = config or DetectorConfig()
    telepathy = telepathy_check(t)
    tests = [telepathy]
    for stream, bits in stream_bits(t).items():
        tests.extend(_stream_tests(bits, stream, config))
    tests = tuple(tests)
    return Verdict(telepathy.passed, tests, classify(telepathy.passed, tests))
