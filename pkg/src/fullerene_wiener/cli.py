"""Command-line entry point: generate, analyze, survey, verify.

Exit codes: 0 success, 2 unsupported vertex count, 3 decode or validation
failure, 4 mismatch against expected values or a refuted clause.
"""

from __future__ import annotations

import argparse
import io
import json
import logging
import os
import sys
from pathlib import Path
from typing import Sequence

from . import __version__
from .codec import CodecError, read_planar_code, read_spirals, write_planar_code, write_spirals
from .graph import GraphError, is_ipr
from .metrics import DEFAULT_PAIRS, all_pairs_distances, complexities, index_report
from .spiral import (
    DEFAULT_PARTITION_DEPTH,
    UnsupportedN,
    canonical_spiral,
    check_n,
    default_workers,
    iter_spirals,
    partition_prefixes,
    wind_up,
)
from .survey import (
    DEFAULT_CAP,
    DEFAULT_SAMPLE_RATE,
    REFUTED,
    Checkpoint,
    IrregularityFrontier,
    emit_results,
    load_results,
    survey_range,
    verify_propositions,
)

logger = logging.getLogger("fullerene_wiener")

EXIT_OK = 0
EXIT_UNSUPPORTED = 2
EXIT_DECODE = 3
EXIT_MISMATCH = 4
CHECKPOINT_ENV = "FULLERENE_WIENER_CHECKPOINT_DIR"


def parse_pair(text: str) -> tuple[int, int]:
    try:
        r, s = (int(x) for x in text.replace(":", ",").split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected r,s but got {text!r}") from None
    if r < 1 or s < r:
        raise argparse.ArgumentTypeError(f"need 1 <= r <= s, got {text!r}")
    return r, s


def parse_range(text: str) -> list[int]:
    """``a..b`` inclusive; odd values and 22 are skipped."""
    lo, sep, hi = text.partition("..")
    try:
        a = int(lo)
        b = int(hi) if sep else a
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected n or a..b, got {text!r}") from None
    if not sep:
        return [a]
    return [n for n in range(a, b + 1) if n % 2 == 0 and n != 22]


def _pairs(args) -> list[tuple[int, int]]:
    pairs = args.pairs or list(DEFAULT_PAIRS)
    for r, s in pairs:
        if s > 3:
            logger.warning("pair (%d,%d) has s > 3; no reference values exist for it", r, s)
    return pairs


def _open_binary_input(path: str):
    return sys.stdin.buffer if path == "-" else open(path, "rb")


def cmd_generate(args) -> int:
    try:
        check_n(args.n)
    except UnsupportedN as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    if args.list_partitions:
        for p in partition_prefixes(args.n, args.ipr, args.partition_depth):
            print("".join(map(str, p)))
        return EXIT_OK
    if args.prefix:
        prefixes = [tuple(int(c) for c in args.prefix)]
    else:
        prefixes = partition_prefixes(args.n, args.ipr, args.partition_depth)
    spirals = iter_spirals(args.n, args.ipr, workers=args.workers, prefixes=prefixes)
    out = sys.stdout.buffer if args.output == "-" else open(args.output, "wb")
    try:
        if args.format == "spiral":
            text = io.TextIOWrapper(out, encoding="ascii", line_buffering=True, write_through=True)
            write_spirals(spirals, text, positions=True)
            text.detach()
        else:
            write_planar_code((wind_up(s, ident=i) for i, s in enumerate(spirals)), out)
        out.flush()
    finally:
        if out is not sys.stdout.buffer:
            out.close()
    return EXIT_OK


def _read_graphs(path: str):
    """Planar code or spiral text, told apart by the header."""
    fh = _open_binary_input(path)
    data = fh.read()
    if fh is not sys.stdin.buffer:
        fh.close()
    if data.startswith(b">>planar_code<<"):
        return read_planar_code(data, strict=False)
    lines = data.decode("ascii", errors="replace").splitlines()
    return (wind_up(s, ident=i) for i, s in enumerate(read_spirals(lines)))


def _fraction(x) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def cmd_analyze(args) -> int:
    pairs = _pairs(args)
    index = 0
    try:
        for index, graph in enumerate(_read_graphs(args.input)):
            dist = all_pairs_distances(graph)
            comp = complexities(dist, pairs)
            rep = index_report(dist, moments=args.moments, pairs=pairs)
            record = {
                "index": index,
                "n": graph.vertex_count,
                "W": rep.W,
                "WW": _fraction(rep.WW),
                "TSZ": _fraction(rep.TSZ),
                "moments": {str(k): v for k, v in rep.moments.items()},
                "complexity": {f"{r},{s}": comp[(r, s)] for r, s in pairs},
                "irregular": {f"{r},{s}": comp[(r, s)] == graph.vertex_count for r, s in pairs},
            }
            if all(f.size in (5, 6) for f in graph.faces):
                record["ipr"] = is_ipr(graph)
                record["spiral"] = str(canonical_spiral(graph))
            if args.pretty:
                cols = "  ".join(f"C{r}{s}={comp[(r, s)]}" for r, s in pairs)
                print(f"#{index:<6d} n={graph.vertex_count:<4d} W={rep.W:<8d} {cols}")
            else:
                print(json.dumps(record, sort_keys=True))
    except (CodecError, GraphError, ValueError) as exc:
        where = getattr(exc, "index", index)
        print(f"error: record {where}: {exc}", file=sys.stderr)
        return EXIT_DECODE
    return EXIT_OK


def _default_checkpoint(ns: Sequence[int], ipr: bool) -> Path | None:
    base = os.environ.get(CHECKPOINT_ENV)
    if not base:
        return None
    return Path(base) / f"survey-{'ipr' if ipr else 'all'}-{ns[0]}-{ns[-1]}.json"


def cmd_survey(args) -> int:
    ns = args.n
    if not ns:
        print("error: empty n range", file=sys.stderr)
        return EXIT_UNSUPPORTED
    try:
        for n in ns:
            check_n(n)
    except UnsupportedN as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    pairs = _pairs(args)
    cp_path = args.checkpoint or _default_checkpoint(ns, args.ipr)
    checkpoint = Checkpoint(cp_path, pairs, args.cap) if cp_path else None
    for row in survey_range(ns, args.ipr, pairs, cap=args.cap, workers=args.workers,
                            checkpoint=checkpoint, sample_rate=args.sample_rate):
        emit_results([row], args.out, timing=not args.no_timing)
        if args.pretty:
            cols = "  ".join(f"{row.c_max(p):4d} {row.count(p):<5d}" for p in pairs)
            print(f"{row.n:4d} {row.isomer_count:7d}  {cols}")
        else:
            print(json.dumps({"n": row.n, "ipr": row.ipr, "isomer_count": row.isomer_count,
                              "C_max": [row.c_max(p) for p in pairs],
                              "N": [row.count(p) for p in pairs]}))
    return EXIT_OK


def compare_fixture(rows, fixture: dict) -> list[str]:
    """Mismatches between survey rows and an expected-values fixture.

    Fixture layout: ``{"ipr": bool, "pairs": [[r, s], ...],
    "rows": {"<n>": [[C, N], ...]}}`` with one ``[C, N]`` per pair.
    """
    ipr = bool(fixture["ipr"])
    pairs = [tuple(p) for p in fixture["pairs"]]
    by_n = {r.n: r for r in rows if r.ipr == ipr}
    problems = []
    for key, expected in fixture["rows"].items():
        n = int(key)
        row = by_n.get(n)
        if row is None:
            continue
        for pair, (c, count) in zip(pairs, expected):
            if pair not in row.stats:
                continue
            got = (row.c_max(pair), row.count(pair))
            if got != (c, count):
                problems.append(f"n={n} ipr={ipr} pair={pair}: expected C={c} N={count}, got C={got[0]} N={got[1]}")
    return problems


def cmd_verify(args) -> int:
    try:
        rows = load_results(args.results)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: cannot read {args.results}: {exc}", file=sys.stderr)
        return EXIT_DECODE
    status = EXIT_OK
    for result in verify_propositions(IrregularityFrontier.from_rows(rows)):
        print(result.line())
        if result.status == REFUTED:
            status = EXIT_MISMATCH
    for path in args.fixtures or []:
        fixture = json.loads(Path(path).read_text(encoding="utf-8"))
        problems = compare_fixture(rows, fixture)
        for p in problems:
            print(f"MISMATCH     {p}")
        if problems:
            status = EXIT_MISMATCH
        else:
            print(f"MATCH        {path}")
    return status


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fullerene-wiener", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="enumerate fullerene isomers")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--ipr", action="store_true")
    g.add_argument("--format", choices=("planar_code", "spiral"), default="planar_code")
    g.add_argument("--output", "-o", default="-")
    g.add_argument("--workers", type=int, default=1)
    g.add_argument("--prefix", help="only the partition with this face-size prefix, e.g. 556")
    g.add_argument("--partition-depth", type=int, default=DEFAULT_PARTITION_DEPTH)
    g.add_argument("--list-partitions", action="store_true")
    g.set_defaults(func=cmd_generate)

    a = sub.add_parser("analyze", help="distance indices and complexities per graph")
    a.add_argument("input", help="planar_code or spiral text file, '-' for stdin")
    a.add_argument("--pairs", nargs="+", type=parse_pair)
    a.add_argument("--moments", nargs="*", type=int, default=[1, 2, 3])
    a.add_argument("--pretty", action="store_true")
    a.set_defaults(func=cmd_analyze)

    s = sub.add_parser("survey", help="maximal complexity per vertex count")
    s.add_argument("--n", type=parse_range, required=True, help="n or a..b (even values)")
    s.add_argument("--ipr", action="store_true")
    s.add_argument("--pairs", nargs="+", type=parse_pair)
    s.add_argument("--workers", type=int, default=default_workers())
    s.add_argument("--cap", type=int, default=DEFAULT_CAP, help="representatives kept per pair")
    s.add_argument("--checkpoint", type=Path)
    s.add_argument("--out", type=Path, default=Path("results.jsonl"))
    s.add_argument("--sample-rate", type=int, default=DEFAULT_SAMPLE_RATE)
    s.add_argument("--no-timing", action="store_true", help="write runtime_ms as null")
    s.add_argument("--pretty", action="store_true")
    s.set_defaults(func=cmd_survey)

    v = sub.add_parser("verify", help="check results against the existence clauses")
    v.add_argument("results", type=Path)
    v.add_argument("--fixtures", nargs="*", type=Path)
    v.set_defaults(func=cmd_verify)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * args.verbose, format="%(levelname)s %(message)s")
    if hasattr(sys.stdout, "reconfigure"):
        sys.stdout.reconfigure(line_buffering=True)
    try:
        return args.func(args)
    except BrokenPipeError:
        # downstream closed early (e.g. piped into head)
        devnull = os.open(os.devnull, os.O_WRONLY)
        os.dup2(devnull, sys.stdout.fileno())
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
