"""Ring-spiral wind-up, canonical spirals and exhaustive isomer generation.

A spiral lists face sizes in the order faces are added around a growing
patch: each face touches the previous one and the oldest face that is still
open.  The canonical spiral of a graph is the lexicographically least face
sequence (5 < 6) over every start face, second face and orientation.  Below
380 vertices every fullerene has a spiral, so canonical spirals identify
isomorphism classes and double as compact identifiers.

Generation walks all face sequences with twelve pentagons in lexicographic
order, pruning as soon as the partial patch cannot continue, and emits a
sequence only if it is the canonical spiral of the graph it winds into.  The
search splits into partitions by fixed sequence prefixes; concatenating
partition outputs in prefix order reproduces the sequential order.
"""

from __future__ import annotations

import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from . import _kernels
from .graph import PENTAGONS, FullereneGraph, WrongPentagonCount, build_graph

logger = logging.getLogger(__name__)

MAX_VERTICES = 380
DEFAULT_PARTITION_DEPTH = 8


class Unwindable(ValueError):
    """The face sequence does not close into a fullerene."""


class NoSpiralFound(RuntimeError):
    pass


class UnsupportedN(ValueError):
    pass


class BadSpiral(ValueError):
    pass


@dataclass(frozen=True, order=True)
class SpiralSequence:
    """Face sizes along a spiral; ordering is lexicographic on ``sizes``."""

    sizes: tuple[int, ...]

    def __post_init__(self) -> None:
        sizes = tuple(int(s) for s in self.sizes)
        object.__setattr__(self, "sizes", sizes)
        if any(s not in (5, 6) for s in sizes):
            raise BadSpiral(f"face sizes must be 5 or 6, got {sorted(set(sizes))}")
        fives = sizes.count(5)
        if fives != PENTAGONS:
            raise WrongPentagonCount(f"spiral has {fives} pentagons, expected {PENTAGONS}")

    @classmethod
    def from_pentagons(cls, n: int, positions: Iterable[int]) -> "SpiralSequence":
        """Build from 1-based pentagon positions for an ``n``-vertex graph."""
        m = n // 2 + 2
        sizes = [6] * m
        for p in positions:
            if not 1 <= p <= m:
                raise BadSpiral(f"pentagon position {p} outside 1..{m}")
            sizes[p - 1] = 5
        return cls(tuple(sizes))

    @property
    def face_count(self) -> int:
        return len(self.sizes)

    @property
    def vertex_count(self) -> int:
        return 2 * len(self.sizes) - 4

    @property
    def pentagon_positions(self) -> tuple[int, ...]:
        """1-based positions of the twelve pentagons."""
        return tuple(i + 1 for i, s in enumerate(self.sizes) if s == 5)

    def __str__(self) -> str:
        return f"{self.vertex_count}: " + " ".join(map(str, self.pentagon_positions))


def check_n(n: int) -> None:
    if n % 2 or n < 20 or n == 22:
        raise UnsupportedN(
            f"no fullerene has {n} vertices (they exist for n = 20 and every even n >= 24)"
        )
    if n >= MAX_VERTICES:
        raise UnsupportedN(f"n = {n}: spiral generation is only complete below {MAX_VERTICES}")


def _rotation_from_triangles(tris: np.ndarray, m: int) -> list[tuple[int, int, int]]:
    owner = np.full((m, m), -1, dtype=np.int64)
    a, b, c = tris[:, 0], tris[:, 1], tris[:, 2]
    idx = np.arange(len(tris))
    owner[a, b] = idx
    owner[b, c] = idx
    owner[c, a] = idx
    rot = np.stack([owner[b, a], owner[c, b], owner[a, c]], axis=1)
    return [tuple(row) for row in rot.tolist()]


def wind_up(spiral: SpiralSequence | Sequence[int], ident=None) -> FullereneGraph:
    """Reconstruct the fullerene whose spiral reads ``spiral``."""
    if not isinstance(spiral, SpiralSequence):
        spiral = SpiralSequence(tuple(spiral))
    sizes = np.asarray(spiral.sizes, dtype=np.int64)
    tris = _kernels.windup(sizes)
    if tris.shape[0] == 0:
        raise Unwindable(f"spiral {spiral} does not close")
    return build_graph(_rotation_from_triangles(tris, len(sizes)), ident=ident)


def _dual(graph: FullereneGraph) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    owner = graph.face_of_edge
    tris = np.array(
        [[owner[(v, u)] for u in nbrs] for v, nbrs in enumerate(graph.rotation)],
        dtype=np.int64,
    )
    m = len(graph.faces)
    nxt, adj, deg, ok = _kernels.dual_from_triangles(tris, m)
    if not ok:
        raise NoSpiralFound("face of degree above 6 in dual")
    fsize = np.array(graph.face_sizes(), dtype=np.int32)
    return nxt, fsize, adj, deg


def canonical_spiral(graph: FullereneGraph) -> SpiralSequence:
    """Least spiral over all starts and both orientations."""
    if graph.vertex_count >= MAX_VERTICES:
        raise UnsupportedN(f"canonical spirals are only complete below {MAX_VERTICES}")
    nxt, fsize, adj, deg = _dual(graph)
    best = np.full(len(fsize), 7, dtype=np.int32)
    if not _kernels.canonical(nxt, fsize, adj, deg, best, False):
        raise NoSpiralFound(f"{graph!r} has no face spiral")
    return SpiralSequence(tuple(best.tolist()))


def has_spiral(graph: FullereneGraph, spiral: SpiralSequence) -> bool:
    """Whether ``spiral`` can be read off ``graph`` from some start."""
    nxt, fsize, adj, deg = _dual(graph)
    if len(fsize) != spiral.face_count:
        return False
    target = np.array(spiral.sizes, dtype=np.int32)
    return _kernels.spiral_exists(nxt, fsize, adj, deg, target)


def partition_prefixes(
    n: int, ipr_only: bool = False, depth: int = DEFAULT_PARTITION_DEPTH
) -> list[tuple[int, ...]]:
    """Surviving face-size prefixes of length ``depth`` in lexicographic order."""
    check_n(n)
    m = n // 2 + 2
    depth = min(depth, m)
    rows, _, _ = _kernels.enumerate_spirals(m, ipr_only, np.zeros(0, np.int8), depth, 64)
    return [tuple(int(x) for x in row) for row in rows]


def enumerate_partition(
    n: int, ipr_only: bool = False, prefix: Sequence[int] = ()
) -> list[SpiralSequence]:
    """Canonical spirals of all classes whose canonical spiral starts with ``prefix``."""
    check_n(n)
    m = n // 2 + 2
    pre = np.asarray(prefix, dtype=np.int8)
    rows, _, _ = _kernels.enumerate_spirals(m, ipr_only, pre, m, 64)
    return [SpiralSequence(tuple(int(x) for x in row)) for row in rows]


def _enumerate_job(args: tuple[int, bool, tuple[int, ...]]) -> list[SpiralSequence]:
    return enumerate_partition(*args)


def default_workers() -> int:
    return len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else os.cpu_count() or 1


def iter_spirals(
    n: int,
    ipr_only: bool = False,
    *,
    workers: int = 1,
    prefixes: Sequence[Sequence[int]] | None = None,
) -> Iterator[SpiralSequence]:
    """Canonical spirals of every class, sorted, one partition at a time."""
    check_n(n)
    if prefixes is None:
        prefixes = partition_prefixes(n, ipr_only)
    jobs = [(n, ipr_only, tuple(p)) for p in prefixes]
    if workers <= 1 or len(jobs) <= 1:
        for job in jobs:
            yield from _enumerate_job(job)
        return
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for chunk in pool.map(_enumerate_job, jobs):
            yield from chunk


def generate(n: int, ipr_only: bool = False, *, workers: int = 1) -> Iterator[FullereneGraph]:
    """One graph per isomorphism class, ordered by canonical spiral.

    Graph ids are 0-based generation indices.
    """
    for index, spiral in enumerate(iter_spirals(n, ipr_only, workers=workers)):
        yield wind_up(spiral, ident=index)
