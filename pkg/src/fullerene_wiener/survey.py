"""Exhaustive per-n scans of maximal Wiener (r,s)-complexity.

A scan walks every isomorphism class for one vertex count, keeping per
``(r, s)`` pair only the running maximum, the number of classes attaining
it, and the lexicographically least canonical spirals among them.  These
partial states merge associatively, so generator partitions can run in any
order or in parallel and the merged row is the same.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from . import __version__, _kernels
from .codec import parse_spiral
from .graph import build_graph
from .metrics import DEFAULT_PAIRS, DistanceMatrix, _bfs_all_pairs, complexities, transmissions, wiener_rs
from .spiral import SpiralSequence, _rotation_from_triangles, check_n, partition_prefixes

logger = logging.getLogger(__name__)

Pair = tuple[int, int]

CHECKPOINT_FORMAT = "fullerene-wiener-checkpoint"
CHECKPOINT_VERSION = 1
DEFAULT_CAP = 10
DEFAULT_SAMPLE_RATE = 1000


class SinkUnavailable(OSError):
    pass


@dataclass(frozen=True)
class PairStat:
    c_max: int = 0
    count: int = 0
    representatives: tuple[SpiralSequence, ...] = ()

    def add(self, c: int, spiral: SpiralSequence, cap: int) -> "PairStat":
        if c > self.c_max:
            return PairStat(c, 1, (spiral,) if cap > 0 else ())
        if c == self.c_max:
            reps = self.representatives
            if len(reps) < cap:
                reps = tuple(sorted(reps + (spiral,)))
            elif reps and spiral < reps[-1]:
                reps = tuple(sorted(reps[:-1] + (spiral,)))
            return PairStat(c, self.count + 1, reps)
        return self

    def merge(self, other: "PairStat", cap: int) -> "PairStat":
        if other.c_max > self.c_max or not self.count:
            hi, lo = other, self
        else:
            hi, lo = self, other
        if lo.c_max != hi.c_max or not lo.count:
            return hi
        reps = tuple(sorted(set(hi.representatives) | set(lo.representatives)))[:cap]
        return PairStat(hi.c_max, hi.count + lo.count, reps)

    def to_json(self) -> dict:
        return {"C_max": self.c_max, "N": self.count,
                "representatives": [str(s) for s in self.representatives]}

    @classmethod
    def from_json(cls, data: Mapping) -> "PairStat":
        return cls(int(data["C_max"]), int(data["N"]),
                   tuple(parse_spiral(s) for s in data["representatives"]))


@dataclass(frozen=True)
class PartialState:
    """Merged scan state for some set of partitions of one (n, ipr)."""

    isomer_count: int
    stats: Mapping[Pair, PairStat]

    @classmethod
    def empty(cls, pairs: Sequence[Pair]) -> "PartialState":
        return cls(0, {p: PairStat() for p in pairs})

    def merge(self, other: "PartialState", cap: int) -> "PartialState":
        return PartialState(
            self.isomer_count + other.isomer_count,
            {p: self.stats[p].merge(other.stats[p], cap) for p in self.stats},
        )

    def to_json(self) -> dict:
        return {"isomer_count": self.isomer_count,
                "stats": [[r, s, st.to_json()] for (r, s), st in self.stats.items()]}

    @classmethod
    def from_json(cls, data: Mapping) -> "PartialState":
        return cls(int(data["isomer_count"]),
                   {(int(r), int(s)): PairStat.from_json(st) for r, s, st in data["stats"]})


@dataclass(frozen=True)
class SurveyRow:
    n: int
    ipr: bool
    isomer_count: int
    stats: Mapping[Pair, PairStat]
    runtime_ms: int | None = field(default=None, compare=False)

    @property
    def pairs(self) -> list[Pair]:
        return list(self.stats)

    def c_max(self, pair: Pair) -> int:
        return self.stats[pair].c_max

    def count(self, pair: Pair) -> int:
        return self.stats[pair].count

    def irregular(self, pair: Pair) -> bool:
        return self.isomer_count > 0 and self.stats[pair].c_max == self.n


def _adjacency_from_spiral(spiral: SpiralSequence) -> np.ndarray:
    tris = _kernels.windup(np.asarray(spiral.sizes, dtype=np.int64))
    if tris.shape[0] == 0:
        raise RuntimeError(f"generated spiral {spiral} does not wind up")
    return np.asarray(_rotation_from_triangles(tris, spiral.face_count), dtype=np.int64)


def _distances_from_adjacency(adj: np.ndarray) -> DistanceMatrix:
    n = adj.shape[0]
    indptr = np.arange(0, 3 * n + 1, 3, dtype=np.int64)
    d, ok = _bfs_all_pairs(indptr, adj.reshape(-1), n)
    if not ok:
        raise RuntimeError("wound-up graph is disconnected")
    return DistanceMatrix(d)


def _self_check(spiral: SpiralSequence, adj: np.ndarray, dist: DistanceMatrix, pairs: Sequence[Pair]) -> None:
    build_graph(adj.tolist())
    for r, s in pairs:
        if int(transmissions(dist, r, s).sum()) != 2 * wiener_rs(dist, r, s):
            raise AssertionError(f"sum of transmissions != 2 W_{r},{s} for {spiral}")


def scan_spirals(
    spirals: Iterable[SpiralSequence],
    pairs: Sequence[Pair] = DEFAULT_PAIRS,
    cap: int = DEFAULT_CAP,
    sample_rate: int = DEFAULT_SAMPLE_RATE,
) -> PartialState:
    """Fold a stream of canonical spirals into a partial state."""
    count = 0
    stats = {p: PairStat() for p in pairs}
    for spiral in spirals:
        adj = _adjacency_from_spiral(spiral)
        dist = _distances_from_adjacency(adj)
        if sample_rate and count % sample_rate == 0:
            _self_check(spiral, adj, dist, pairs)
        for p, c in complexities(dist, pairs).items():
            stats[p] = stats[p].add(c, spiral, cap)
        count += 1
    return PartialState(count, stats)


def _scan_job(args) -> PartialState:
    n, ipr, prefix, pairs, cap, sample_rate = args
    from .spiral import enumerate_partition

    return scan_spirals(enumerate_partition(n, ipr, prefix), pairs, cap, sample_rate)


def partition_key(n: int, ipr: bool, prefix: Sequence[int]) -> str:
    return f"{'ipr' if ipr else 'all'}:{n}:{''.join(map(str, prefix))}"


class Checkpoint:
    """Completed partitions and their partial states, persisted as JSON.

    File layout::

        {"format": "fullerene-wiener-checkpoint", "version": 1,
         "pairs": [[r, s], ...], "cap": 10,
         "partitions": {"all:60:55656566": <partial state>, ...}}
    """

    def __init__(self, path: str | os.PathLike | None, pairs: Sequence[Pair], cap: int):
        self.path = Path(path) if path is not None else None
        self.pairs = [tuple(p) for p in pairs]
        self.cap = cap
        self.partitions: dict[str, PartialState] = {}
        if self.path is not None and self.path.exists():
            self._load()

    def _load(self) -> None:
        data = json.loads(self.path.read_text(encoding="utf-8"))
        if data.get("format") != CHECKPOINT_FORMAT or data.get("version") != CHECKPOINT_VERSION:
            raise ValueError(f"{self.path} is not a version {CHECKPOINT_VERSION} checkpoint")
        if [tuple(p) for p in data["pairs"]] != self.pairs or data["cap"] != self.cap:
            raise ValueError(f"{self.path} was written for different pairs or representative cap")
        self.partitions = {k: PartialState.from_json(v) for k, v in data["partitions"].items()}

    def get(self, key: str) -> PartialState | None:
        return self.partitions.get(key)

    def record(self, key: str, state: PartialState) -> None:
        self.partitions[key] = state
        if self.path is None:
            return
        payload = {
            "format": CHECKPOINT_FORMAT,
            "version": CHECKPOINT_VERSION,
            "pairs": [list(p) for p in self.pairs],
            "cap": self.cap,
            "partitions": {k: v.to_json() for k, v in sorted(self.partitions.items())},
        }
        _atomic_write(self.path, json.dumps(payload, sort_keys=True))


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    with os.fdopen(fd, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)


def survey_row(
    n: int,
    ipr: bool = False,
    pairs: Sequence[Pair] = DEFAULT_PAIRS,
    *,
    cap: int = DEFAULT_CAP,
    workers: int = 1,
    checkpoint: Checkpoint | None = None,
    sample_rate: int = DEFAULT_SAMPLE_RATE,
    pool: ProcessPoolExecutor | None = None,
) -> SurveyRow:
    """Maximal complexity per pair, with attaining counts, over all classes of size n."""
    check_n(n)
    pairs = [tuple(p) for p in pairs]
    if not pairs:
        raise ValueError("at least one (r, s) pair is required")
    start = time.perf_counter()
    prefixes = partition_prefixes(n, ipr)
    state = PartialState.empty(pairs)
    todo = []
    for prefix in prefixes:
        key = partition_key(n, ipr, prefix)
        done = checkpoint.get(key) if checkpoint else None
        if done is not None:
            state = state.merge(done, cap)
        else:
            todo.append((key, (n, ipr, prefix, pairs, cap, sample_rate)))
    if todo:
        if pool is None and workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as own:
                results = own.map(_scan_job, [job for _, job in todo])
                state = _collect(todo, results, state, cap, checkpoint)
        elif pool is not None:
            results = pool.map(_scan_job, [job for _, job in todo])
            state = _collect(todo, results, state, cap, checkpoint)
        else:
            results = (_scan_job(job) for _, job in todo)
            state = _collect(todo, results, state, cap, checkpoint)
    elapsed = int(round((time.perf_counter() - start) * 1000))
    logger.info("n=%d ipr=%s: %d classes in %d ms", n, ipr, state.isomer_count, elapsed)
    return SurveyRow(n, ipr, state.isomer_count, dict(state.stats), elapsed)


def _collect(todo, results, state, cap, checkpoint):
    for (key, _), part in zip(todo, results):
        if checkpoint is not None:
            checkpoint.record(key, part)
        state = state.merge(part, cap)
    return state


def survey_range(
    ns: Iterable[int],
    ipr: bool = False,
    pairs: Sequence[Pair] = DEFAULT_PAIRS,
    *,
    cap: int = DEFAULT_CAP,
    workers: int = 1,
    checkpoint: Checkpoint | None = None,
    sample_rate: int = DEFAULT_SAMPLE_RATE,
) -> Iterator[SurveyRow]:
    """Rows for each n in order, sharing one worker pool."""
    ns = list(ns)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for n in ns:
                yield survey_row(n, ipr, pairs, cap=cap, checkpoint=checkpoint,
                                 sample_rate=sample_rate, pool=pool)
    else:
        for n in ns:
            yield survey_row(n, ipr, pairs, cap=cap, checkpoint=checkpoint, sample_rate=sample_rate)


# -- irregularity frontier -------------------------------------------------

@dataclass(frozen=True)
class FrontierEntry:
    pair: Pair
    ipr: bool
    scanned: tuple[int, ...]
    irregular: tuple[int, ...]
    counts: Mapping[int, int]

    @property
    def minimal(self) -> int | None:
        return self.irregular[0] if self.irregular else None

    @property
    def n_max(self) -> int:
        return max(self.scanned) if self.scanned else 0


@dataclass(frozen=True)
class IrregularityFrontier:
    entries: Mapping[tuple[Pair, bool], FrontierEntry]

    @classmethod
    def from_rows(cls, rows: Iterable[SurveyRow]) -> "IrregularityFrontier":
        grouped: dict[tuple[Pair, bool], list[SurveyRow]] = {}
        for row in rows:
            for pair in row.pairs:
                grouped.setdefault((pair, row.ipr), []).append(row)
        entries = {}
        for (pair, ipr), rs in grouped.items():
            rs = sorted(rs, key=lambda r: r.n)
            scanned = tuple(r.n for r in rs if r.isomer_count > 0)
            irr = [r for r in rs if r.irregular(pair)]
            entries[(pair, ipr)] = FrontierEntry(
                pair, ipr, scanned, tuple(r.n for r in irr), {r.n: r.count(pair) for r in irr}
            )
        return cls(entries)

    def get(self, pair: Pair, ipr: bool) -> FrontierEntry | None:
        return self.entries.get((tuple(pair), ipr))


def find_minimal_irregular(
    pair: Pair,
    ipr: bool,
    n_max: int,
    *,
    rows: Iterable[SurveyRow] | None = None,
    workers: int = 1,
    n_min: int = 20,
) -> FrontierEntry:
    """Smallest n <= n_max with an irregular graph for ``pair``.

    Scans upward and stops at the first hit unless ``rows`` are supplied.
    """
    pair = tuple(pair)
    if rows is not None:
        rows = [r for r in rows if r.ipr == ipr and r.n <= n_max]
        return IrregularityFrontier.from_rows(rows).get(pair, ipr) or FrontierEntry(pair, ipr, (), (), {})
    scanned: list[SurveyRow] = []
    for n in range(n_min, n_max + 1, 2):
        if n == 22:
            continue
        row = survey_row(n, ipr, [pair], workers=workers)
        scanned.append(row)
        if row.irregular(pair):
            break
    return IrregularityFrontier.from_rows(scanned).get(pair, ipr) or FrontierEntry(pair, ipr, (), (), {})


CONFIRMED = "CONFIRMED"
REFUTED = "REFUTED"
OUT_OF_RANGE = "OUT_OF_RANGE"


@dataclass(frozen=True)
class Clause:
    name: str
    ipr: bool
    pairs: tuple[Pair, ...]
    threshold: int
    isolated: int | None = None
    """A single irregular size below the continuous range (and the true minimum)."""


GENERAL_CLAUSES = (
    Clause("n = 64 isolated, n >= 72 if r=s=2", False, ((2, 2),), 72, isolated=64),
    Clause("n >= 76 if r=1, s=2", False, ((1, 2),), 76),
    Clause("n >= 62 if r=1,2,3, s=3", False, ((3, 3), (2, 3), (1, 3)), 62),
)
IPR_CLAUSES = (
    Clause("n >= 124 if r=s=2 (IPR)", True, ((2, 2),), 124),
    Clause("n >= 130 if r=1, s=2 (IPR)", True, ((1, 2),), 130),
    Clause("n >= 110 if r=1,2,3, s=3 (IPR)", True, ((3, 3), (2, 3), (1, 3)), 110),
)


@dataclass(frozen=True)
class ClauseResult:
    clause: Clause
    status: str
    minimal: Mapping[Pair, int | None]
    irregular: Mapping[Pair, tuple[int, ...]]
    detail: str

    def line(self) -> str:
        mins = ", ".join(f"({r},{s}): {self.minimal[(r, s)]}" for r, s in self.clause.pairs)
        return f"{self.status:12s} {self.clause.name} | minimal {mins} | {self.detail}"


def _check_clause(clause: Clause, frontier: IrregularityFrontier) -> ClauseResult:
    problems: list[str] = []
    in_range = True
    minimal: dict[Pair, int | None] = {}
    irregular: dict[Pair, tuple[int, ...]] = {}
    for pair in clause.pairs:
        entry = frontier.get(pair, clause.ipr)
        scanned = entry.scanned if entry else ()
        irr = set(entry.irregular) if entry else set()
        minimal[pair] = min(irr) if irr else None
        irregular[pair] = tuple(sorted(irr))
        early = sorted(k for k in irr if k < clause.threshold and k != clause.isolated)
        if early:
            problems.append(f"{pair}: irregular at n={early[0]}, outside the claimed sizes")
        if clause.isolated is not None:
            if clause.isolated in scanned and clause.isolated not in irr:
                problems.append(f"{pair}: n={clause.isolated} not irregular")
            if clause.isolated not in scanned:
                in_range = False
        missing = [k for k in scanned if k >= clause.threshold and k not in irr]
        if missing:
            problems.append(f"{pair}: n={missing[0]} not irregular")
        if not any(k >= clause.threshold for k in scanned):
            in_range = False
    if problems:
        return ClauseResult(clause, REFUTED, minimal, irregular, "; ".join(problems))
    if not in_range:
        top = max((frontier.get(p, clause.ipr).n_max if frontier.get(p, clause.ipr) else 0)
                  for p in clause.pairs)
        return ClauseResult(clause, OUT_OF_RANGE, minimal, irregular,
                            f"scanned up to n={top}, claim starts at n={clause.threshold}")
    return ClauseResult(clause, CONFIRMED, minimal, irregular, "consistent with all scanned n")


def verify_propositions(frontier: IrregularityFrontier, clauses: Sequence[Clause] | None = None) -> list[ClauseResult]:
    """Check each existence clause against the scanned rows.

    A clause is REFUTED when an irregular graph appears below its first
    claimed size or a scanned size in its range has none, OUT_OF_RANGE when
    the scan does not reach the claimed sizes, and CONFIRMED otherwise.
    """
    if clauses is None:
        ipr_flags = {ipr for (_, ipr) in frontier.entries}
        clauses = [c for c in GENERAL_CLAUSES + IPR_CLAUSES if c.ipr in ipr_flags]
    return [_check_clause(c, frontier) for c in clauses]


# -- results file -------------------------------------------------------------

def _record_key(rec: Mapping) -> str:
    content = {k: rec[k] for k in ("n", "ipr", "r", "s", "isomer_count", "C_max", "N", "representatives")}
    return hashlib.sha256(json.dumps(content, sort_keys=True).encode()).hexdigest()[:16]


def row_records(row: SurveyRow) -> list[dict]:
    out = []
    for (r, s), st in row.stats.items():
        rec = {"n": row.n, "ipr": row.ipr, "r": r, "s": s, "isomer_count": row.isomer_count,
               **st.to_json(), "runtime_ms": row.runtime_ms, "toolkit_version": __version__}
        rec["key"] = _record_key(rec)
        out.append(rec)
    return out


def _sort_key(rec: Mapping) -> tuple:
    return (rec["ipr"], rec["n"], rec["r"], rec["s"])


def emit_results(rows: Iterable[SurveyRow], sink: str | os.PathLike, *, timing: bool = True) -> int:
    """Merge rows into the JSON-lines results file; returns records added.

    Records already present (same content key) are not repeated.  The file
    is rewritten atomically, sorted by (ipr, n, r, s).
    """
    path = Path(sink)
    existing = load_records(path) if path.exists() else []
    seen = {rec["key"] for rec in existing}
    added = 0
    for row in rows:
        if not timing:
            row = SurveyRow(row.n, row.ipr, row.isomer_count, row.stats, None)
        for rec in row_records(row):
            if rec["key"] not in seen:
                seen.add(rec["key"])
                existing.append(rec)
                added += 1
    existing.sort(key=_sort_key)
    text = "".join(json.dumps(rec, sort_keys=True) + "\n" for rec in existing)
    try:
        _atomic_write(path, text)
    except OSError as exc:
        raise SinkUnavailable(f"cannot write results to {path}: {exc}") from exc
    return added


def load_records(path: str | os.PathLike) -> list[dict]:
    with open(path, encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]


def load_results(path: str | os.PathLike) -> list[SurveyRow]:
    """Group records back into rows (pair order as written)."""
    grouped: dict[tuple[bool, int], list[dict]] = {}
    for rec in load_records(path):
        grouped.setdefault((rec["ipr"], rec["n"]), []).append(rec)
    rows = []
    for (ipr, n), recs in sorted(grouped.items()):
        stats = {(rec["r"], rec["s"]): PairStat.from_json(rec) for rec in recs}
        rows.append(SurveyRow(n, ipr, recs[0]["isomer_count"], stats, recs[0].get("runtime_ms")))
    return rows
