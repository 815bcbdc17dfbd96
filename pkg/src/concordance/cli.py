"""Command-line front end: simulate, analyze, oracle, report.

Exit codes
  0   analyze: CONSISTENT_WITH_RANDOM (other commands: success)
  2   analyze: CHEAT_DETECTED
  3   analyze: NOT_TELEPATHIC
  64  bad command-line usage
  65  invalid input: strategy, detector settings, malformed transcript or report,
      too few rounds for an enabled test, strategy without an exact profile
  66  transcript version mismatch
  74  file cannot be read or written
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from concordance import report as reporting
from concordance.detectors import Classification, DetectorConfig, InsufficientDataError, randomness_verdict
from concordance.game import run_show
from concordance.oracle import (
    NotOracleEligible,
    enumerate_fixed_maps,
    exact_agreement_probability,
    fraction_str,
    off_diagonal_agreement,
    profile_to_dict,
)
from concordance.rng import MASK64
from concordance.strategies import FixedMap, StrategyError, parse_spec, spec_to_dict
from concordance.transcript_io import (
    TranscriptFormatError,
    TranscriptVersionError,
    read_transcript,
    write_transcript,
)

EXIT_OK = 0
EXIT_CODES = {
    Classification.CONSISTENT_WITH_RANDOM: 0,
    Classification.CHEAT_DETECTED: 2,
    Classification.NOT_TELEPATHIC: 3,
}
EXIT_USAGE = 64
EXIT_INVALID = 65
EXIT_VERSION = 66
EXIT_IO = 74


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors, which would collide with CHEAT_DETECTED
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _seed(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value <= MASK64:
        raise argparse.ArgumentTypeError(f"seed must be a 64-bit unsigned integer, got {text}")
    return value


def _rounds(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"rounds must be non-negative, got {text}")
    return value


def _blocks(text: str) -> tuple[int, ...]:
    try:
        ks = tuple(int(k) for k in text.split(",") if k.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated block orders, got {text!r}") from None
    if not ks or min(ks) < 1:
        raise argparse.ArgumentTypeError("block orders must be positive integers")
    return ks


def _add_detector_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="detector settings as inline JSON or a path to a JSON file")
    p.add_argument("--alpha", type=float, help="significance level (default 0.01)")
    p.add_argument("--blocks", type=_blocks, help="block orders for the Borel block test, e.g. 1,2,3,4")
    p.add_argument("--predictor-w", type=int, help="context length of the next-bit predictor (default 4)")
    p.add_argument("--entropy-floor", type=float, help="minimum LZ78 entropy rate in bits/symbol (default 0.97)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="concordance", description="Simulate the two-player ticket show and test for cheating.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sim = sub.add_parser(
        "simulate",
        help="run a show and write its JSONL transcript",
        description="Run a show and write its JSONL transcript. Round indices start at 0, "
        "so the parity rule answers YES to ticket 3 in rounds 0, 2, 4, ...",
    )
    sim.add_argument("--strategy", required=True, help="strategy as inline JSON or a path to a JSON file")
    sim.add_argument("--rounds", type=_rounds, required=True, help="number of rounds m")
    sim.add_argument("--seed", type=_seed, required=True, help="64-bit unsigned seed (mandatory)")
    sim.add_argument("--out", required=True, help="transcript output path")

    ana = sub.add_parser("analyze", help="run the detector battery on a transcript")
    ana.add_argument("transcript", help="JSONL transcript written by 'simulate'")
    ana.add_argument("--out", help="write the report here instead of standard output")
    _add_detector_flags(ana)

    ora = sub.add_parser("oracle", help="exact agreement analytics for a strategy")
    ora.add_argument("--strategy", required=True, help="strategy as inline JSON or a path to a JSON file")

    rep = sub.add_parser("report", help="compare several analysis reports")
    rep.add_argument("reports", nargs="+", help="report JSON files written by 'analyze'")
    rep.add_argument("--out", help="also write the comparison as JSON to this path")
    rep.add_argument("--json", action="store_true", help="print JSON instead of the plain-text table")
    return parser


def _load_json_arg(text: str, what: str) -> dict:
    raw = text
    if not text.strip().startswith("{"):
        try:
            raw = Path(text).read_text()
        except OSError as exc:
            raise CliError(f"cannot read {what} {text!r}: {exc.strerror}", EXIT_IO) from None
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise CliError(f"{what}: invalid JSON ({exc.msg})", EXIT_INVALID) from None
    if not isinstance(data, dict):
        raise CliError(f"{what}: expected a JSON object", EXIT_INVALID)
    return data


def _strategy(text: str):
    try:
        return parse_spec(text)
    except StrategyError as exc:
        raise CliError(f"invalid strategy: {exc}", EXIT_INVALID) from None


def detector_config(args: argparse.Namespace) -> DetectorConfig:
    settings = _load_json_arg(args.config, "detector config") if args.config else {}
    overrides = {
        "alpha": args.alpha,
        "blocks_k": args.blocks,
        "predictor_w": args.predictor_w,
        "entropy_floor": args.entropy_floor,
    }
    settings.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return DetectorConfig.from_dict(settings)
    except (TypeError, ValueError) as exc:
        raise CliError(f"invalid detector settings: {exc}", EXIT_INVALID) from None


def _write(path: str, text: str) -> None:
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc.strerror}", EXIT_IO) from None


def cmd_simulate(args: argparse.Namespace) -> int:
    strategy = _strategy(args.strategy)
    transcript = run_show(strategy, args.rounds, args.seed)
    try:
        write_transcript(args.out, transcript)
    except OSError as exc:
        raise CliError(f"cannot write {args.out}: {exc.strerror}", EXIT_IO) from None
    print(f"{args.out}: {transcript.round_count} rounds")
    return EXIT_OK


def cmd_analyze(args: argparse.Namespace) -> int:
    config = detector_config(args)
    try:
        transcript = read_transcript(args.transcript)
    except OSError as exc:
        raise CliError(f"cannot read {args.transcript}: {exc.strerror}", EXIT_IO) from None
    except TranscriptVersionError as exc:
        raise CliError(f"{args.transcript}: {exc}", EXIT_VERSION) from None
    except TranscriptFormatError as exc:
        raise CliError(f"{args.transcript}: {exc}", EXIT_INVALID) from None
    try:
        verdict = randomness_verdict(transcript, config)
    except InsufficientDataError as exc:
        raise CliError(f"{args.transcript}: {exc}", EXIT_INVALID) from None
    text = reporting.dumps(reporting.build_report(transcript, config, verdict))
    if args.out:
        _write(args.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_CODES[verdict.classification]


def cmd_oracle(args: argparse.Namespace) -> int:
    strategy = _strategy(args.strategy)
    try:
        profile = exact_agreement_probability(strategy)
    except NotOracleEligible as exc:
        raise CliError(str(exc), EXIT_INVALID) from None
    out = {"strategy": spec_to_dict(strategy), "profile": profile_to_dict(profile)}
    out["off_diagonal_agreement"] = fraction_str(off_diagonal_agreement(strategy))
    if isinstance(strategy, FixedMap):
        row = next(r for r in enumerate_fixed_maps() if r.mapping == strategy.mapping)
        out["fixed_map_row"] = {
            "map": [a.name for a in row.mapping],
            "yes_count": row.yes_count,
            "agreement": fraction_str(row.agreement),
            "off_diagonal_agreement": fraction_str(row.off_diagonal_agreement),
        }
    sys.stdout.write(reporting.dumps(out))
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    loaded = {}
    for path in args.reports:
        try:
            loaded[path] = reporting.load_report(path)
        except OSError as exc:
            raise CliError(f"cannot read {path}: {exc.strerror}", EXIT_IO) from None
        except reporting.ReportSchemaError as exc:
            raise CliError(f"schema mismatch: {exc}", EXIT_INVALID) from None
    table = reporting.comparison(loaded)
    text = reporting.dumps(table)
    if args.out:
        _write(args.out, text)
    sys.stdout.write(text if args.json else reporting.render_table(table))
    return EXIT_OK


COMMANDS = {"simulate": cmd_simulate, "analyze": cmd_analyze, "oracle": cmd_oracle, "report": cmd_report}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except CliError as exc:
        print(f"concordance {args.command}: error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
