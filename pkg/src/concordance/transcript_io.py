"""JSON Lines transcript files.

Line 1 is a header ``{"strategy": {...}, "seed": s, "rounds": m, "version": 1}``;
each following line is one round ``{"n": .., "tA": .., "tB": .., "aA": 0|1, "aB": 0|1}``.
The header alone is enough to regenerate the rounds bit for bit.
"""

from __future__ import annotations

import json
import re
from pathlib import Path

from concordance.core import Transcript
from concordance.game import run_show
from concordance.strategies import StrategyError, spec_from_dict, spec_to_dict

FORMAT_VERSION = 1
ROUND_KEYS = ("n", "tA", "tB", "aA", "aB")
# lines exactly as written by iter_lines; anything else goes through json
_CANONICAL = re.compile(r'\{"n":(\d+),"tA":([123]),"tB":([123]),"aA":([01]),"aB":([01])\}\s*\Z')


class TranscriptFormatError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class TranscriptVersionError(ValueError):
    pass


def header_line(t: Transcript) -> str:
    header = {"strategy": spec_to_dict(t.strategy), "seed": t.seed, "rounds": t.round_count, "version": FORMAT_VERSION}
    return json.dumps(header, separators=(",", ":"))


def iter_lines(t: Transcript):
    yield header_line(t)
    cols = zip(t.tickets_a.tolist(), t.tickets_b.tolist(), t.answers_a.tolist(), t.answers_b.tolist())
    for n, (ta, tb, aa, ab) in enumerate(cols):
        yield f'{{"n":{n},"tA":{ta},"tB":{tb},"aA":{aa},"aB":{ab}}}'


def write_transcript(path: str | Path, t: Transcript) -> Path:
    path = Path(path)
    with path.open("w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(iter_lines(t)))
        fh.write("\n")
    return path


def _parse_header(line: str) -> dict:
    try:
        header = json.loads(line)
    except json.JSONDecodeError as exc:
        raise TranscriptFormatError(1, f"header is not valid JSON ({exc.msg})") from None
    if not isinstance(header, dict):
        raise TranscriptFormatError(1, "header must be a JSON object")
    if "version" not in header:
        raise TranscriptFormatError(1, "header has no 'version'")
    if header["version"] != FORMAT_VERSION:
        raise TranscriptVersionError(
            f"unsupported transcript version {header['version']!r}; this reader handles version {FORMAT_VERSION}"
        )
    for key in ("strategy", "seed", "rounds"):
        if key not in header:
            raise TranscriptFormatError(1, f"header has no {key!r}")
    if not isinstance(header["rounds"], int) or header["rounds"] < 0:
        raise TranscriptFormatError(1, "'rounds' must be a non-negative integer")
    if not isinstance(header["seed"], int) or not 0 <= header["seed"] < 2**64:
        raise TranscriptFormatError(1, "'seed' must be a 64-bit unsigned integer")
    return header


def _parse_round(line: str, lineno: int, n: int) -> tuple[int, ...]:
    try:
        rec = json.loads(line)
    except json.JSONDecodeError as exc:
        raise TranscriptFormatError(lineno, f"invalid JSON ({exc.msg})") from None
    if not isinstance(rec, dict) or set(rec) != set(ROUND_KEYS):
        raise TranscriptFormatError(lineno, f"round must have exactly the keys {list(ROUND_KEYS)}")
    if type(rec["n"]) is not int or rec["n"] != n:
        raise TranscriptFormatError(lineno, f"expected round n={n}, got {rec['n']!r}")
    for key in ("tA", "tB"):
        if type(rec[key]) is not int or rec[key] not in (1, 2, 3):
            raise TranscriptFormatError(lineno, f"{key} must be 1, 2 or 3, got {rec[key]!r}")
    for key in ("aA", "aB"):
        if type(rec[key]) is not int or rec[key] not in (0, 1):
            raise TranscriptFormatError(lineno, f"{key} must be 0 or 1, got {rec[key]!r}")
    return tuple(rec[k] for k in ROUND_KEYS)


def read_header(path: str | Path) -> dict:
    with Path(path).open(encoding="utf-8") as fh:
        return _parse_header(fh.readline())


def read_transcript(path: str | Path) -> Transcript:
    with Path(path).open(encoding="utf-8") as fh:
        header = _parse_header(fh.readline())
        try:
            strategy = spec_from_dict(header["strategy"])
        except StrategyError as exc:
            raise TranscriptFormatError(1, f"strategy {exc}") from None
        m = header["rounds"]
        cols: tuple[list[int], ...] = ([], [], [], [])
        n = 0
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            if n >= m:
                raise TranscriptFormatError(lineno, f"more rounds than the {m} declared in the header")
            fast = _CANONICAL.match(line)
            if fast:
                values = tuple(map(int, fast.groups()))
                if values[0] != n:
                    raise TranscriptFormatError(lineno, f"expected round n={n}, got {values[0]}")
            else:
                values = _parse_round(line, lineno, n)
            for col, v in zip(cols, values[1:]):
                col.append(v)
            n += 1
        if n < m:
            raise TranscriptFormatError(n + 2, f"file ends after {n} of {m} declared rounds")
    return Transcript(strategy, header["seed"], *cols)


def replay(path: str | Path) -> Transcript:
    """Regenerate a transcript from its header alone."""
    header = read_header(path)
    try:
        strategy = spec_from_dict(header["strategy"])
    except StrategyError as exc:
        raise TranscriptFormatError(1, f"strategy {exc}") from None
    return run_show(strategy, header["rounds"], header["seed"])
