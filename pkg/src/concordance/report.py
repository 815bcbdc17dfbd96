"""Analysis reports and the multi-report comparison table."""

from __future__ import annotations

import json
import math
from fractions import Fraction
from pathlib import Path

from concordance.core import Transcript
from concordance.detectors import (
    DetectorConfig,
    InsufficientDataError,
    TestResult,
    Verdict,
    bell_witness,
    lz78_code_length,
    lz78_phrase_count,
    randomness_verdict,
    stream_bits,
)
from concordance.oracle import (
    NotOracleEligible,
    exact_agreement_probability,
    fraction_str,
    off_diagonal_agreement,
    profile_to_dict,
)
from concordance.strategies import TABLE_KINDS, ParityCheat, describe, spec_to_dict

REPORT_VERSION = 1
REQUIRED_KEYS = ("version", "run", "verdict", "tests", "streams")


class ReportSchemaError(ValueError):
    pass


def dumps(obj, indent: int = 2) -> str:
    """JSON with every float written as fixed 6-decimal text, for stable diffs."""

    def render(x, depth: int) -> str:
        pad, inner = " " * (indent * depth), " " * (indent * (depth + 1))
        if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
            return json.dumps(x)
        if isinstance(x, float):
            if not math.isfinite(x):
                raise ValueError(f"cannot render non-finite float {x}")
            text = f"{x:.6f}"
            return "0.000000" if text == "-0.000000" else text
        if isinstance(x, dict):
            if not x:
                return "{}"
            items = [f"{inner}{json.dumps(str(k))}: {render(v, depth + 1)}" for k, v in x.items()]
            return "{\n" + ",\n".join(items) + "\n" + pad + "}"
        if isinstance(x, (list, tuple)):
            if not x:
                return "[]"
            return "[\n" + ",\n".join(inner + render(v, depth + 1) for v in x) + "\n" + pad + "]"
        raise TypeError(f"cannot render {type(x).__name__}")

    return render(obj, 0) + "\n"


def result_to_dict(r: TestResult) -> dict:
    d = {
        "name": r.name,
        "stream": r.stream,
        "statistic": r.statistic,
        "threshold": r.threshold,
        "passed": r.passed,
        "sample_size": r.sample_size,
    }
    d.update({k: v for k, v in r.details.items()})
    return d


def _stream_stats(t: Transcript, verdict: Verdict) -> dict:
    known = {r.stream: r.details["phrase_count"] for r in verdict.tests if r.name == "entropy"}
    stats = {}
    for name, bits in stream_bits(t).items():
        m = len(bits)
        phrases = known[name] if name in known else lz78_phrase_count(bits)
        stats[name] = {
            "ones_fraction": bits.ones_fraction() if m else None,
            "phrase_count": phrases,
            "entropy_estimate": lz78_code_length(phrases) / m if m >= 1000 else None,
        }
    return stats


def _oracle_block(t: Transcript) -> dict | None:
    try:
        profile = exact_agreement_probability(t.strategy)
    except NotOracleEligible:
        return None
    block = profile_to_dict(profile)
    block["off_diagonal_agreement"] = fraction_str(off_diagonal_agreement(t.strategy))
    m = t.round_count
    if m:
        empirical = float((t.answers_a == t.answers_b).mean())
        se = math.sqrt(profile.per_round_variance / m)
        block["empirical_agreement"] = empirical
        block["standard_error"] = se
        block["deviation_in_standard_errors"] = (
            (empirical - float(profile.average_agreement)) / se if se else 0.0
        )
    return block


def _notes(t: Transcript) -> list[str]:
    notes = []
    if isinstance(t.strategy, TABLE_KINDS):
        avg = exact_agreement_probability(t.strategy).average_agreement
        if avg != Fraction(1, 2):
            notes.append(
                f"Every phase of this rule is a ticket-only map, so the concordance "
                f"sequence has exact ones-frequency {fraction_str(avg)}, never 1/2; "
                f"it cannot be 1-normal."
            )
    if isinstance(t.strategy, ParityCheat):
        notes.append(
            "The parity rule keeps each answer stream balanced (YES with probability "
            "2/3 on even rounds and 1/3 on odd rounds, 1/2 on average), but that balance "
            "does not carry over to agreement: the concordance frequency is 5/9 in both "
            "phases. The claim that this rule yields a 1-normal concordance sequence "
            "therefore does not hold; only the answer streams are 1-normal."
        )
    return notes


def build_report(t: Transcript, config: DetectorConfig | None = None, verdict: Verdict | None = None) -> dict:
    config = config or DetectorConfig()
    verdict = verdict or randomness_verdict(t, config)
    try:
        witness = result_to_dict(bell_witness(t, config.alpha))
    except InsufficientDataError:
        witness = None
    report = {
        "version": REPORT_VERSION,
        "run": {
            "strategy": spec_to_dict(t.strategy),
            "strategy_label": describe(t.strategy),
            "seed": t.seed,
            "rounds": t.round_count,
        },
        "config": config.to_dict(),
        "verdict": {
            "classification": verdict.classification.value,
            "telepathy_ok": verdict.telepathy_ok,
            "failed": [r.label for r in verdict.failed()],
        },
        "tests": [result_to_dict(r) for r in verdict.tests],
        "streams": _stream_stats(t, verdict),
        "bell_witness": witness,
    }
    oracle = _oracle_block(t)
    if oracle is not None:
        report["oracle"] = oracle
    report["notes"] = _notes(t)
    return report


def load_report(path: str | Path) -> dict:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ReportSchemaError(f"{path}: not valid JSON ({exc.msg})") from None
    if not isinstance(data, dict):
        raise ReportSchemaError(f"{path}: report must be a JSON object")
    missing = [k for k in REQUIRED_KEYS if k not in data]
    if missing:
        raise ReportSchemaError(f"{path}: missing keys {missing}")
    if data["version"] != REPORT_VERSION:
        raise ReportSchemaError(f"{path}: report version {data['version']!r}, expected {REPORT_VERSION}")
    return data


def _label(test: dict) -> str:
    return f"{test['name']}[{test['stream']}]" if test.get("stream") else test["name"]


def comparison(reports: dict[str, dict]) -> dict:
    """Strategies x tests matrix from loaded reports keyed by file name."""
    if not reports:
        raise ValueError("need at least one report")
    columns: list[str] = []
    rows = []
    for path, rep in reports.items():
        outcome = {}
        for test in rep["tests"]:
            label = _label(test)
            if label not in columns:
                columns.append(label)
            outcome[label] = test["passed"]
        conc = rep["streams"].get("concordance", {})
        rows.append(
            {
                "file": path,
                "strategy": rep["run"].get("strategy_label", rep["run"]["strategy"].get("kind")),
                "seed": rep["run"]["seed"],
                "rounds": rep["run"]["rounds"],
                "classification": rep["verdict"]["classification"],
                "concordance_ones_fraction": conc.get("ones_fraction"),
                "concordance_entropy": conc.get("entropy_estimate"),
                "tests": outcome,
            }
        )
    return {"version": REPORT_VERSION, "columns": columns, "rows": rows}


def render_table(table: dict) -> str:
    def fmt(x):
        return "-" if x is None else f"{x:.6f}"

    header = ["strategy", "rounds", "classification", "C ones", "C entropy"]
    body = []
    for row in table["rows"]:
        body.append(
            [
                row["strategy"],
                str(row["rounds"]),
                row["classification"],
                fmt(row["concordance_ones_fraction"]),
                fmt(row["concordance_entropy"]),
            ]
        )
    widths = [max(len(r[i]) for r in [header] + body) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(header, widths)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    lines += ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in body]

    # per-test pass/fail matrix, one column per report
    names = [row["strategy"] for row in table["rows"]]
    label_w = max(len(c) for c in table["columns"] + ["test"])
    col_w = [max(len(n), 4) for n in names]
    lines.append("")
    lines.append("  ".join(["test".ljust(label_w)] + [n.ljust(w) for n, w in zip(names, col_w)]).rstrip())
    lines.append("  ".join(["-" * label_w] + ["-" * w for w in col_w]))
    for col in table["columns"]:
        cells = []
        for row, w in zip(table["rows"], col_w):
            v = row["tests"].get(col)
            cells.append(("-" if v is None else "pass" if v else "FAIL").ljust(w))
        lines.append("  ".join([col.ljust(label_w)] + cells).rstrip())
    return "\n".join(lines) + "\n"
