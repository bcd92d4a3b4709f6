"""Distance-based vertex and graph invariants with exact integer arithmetic.

``tr_{r,s}(v)`` is the sum over all vertices ``u`` of ``d(v,u)**i`` for
``i = r..s``; ``W_{r,s}`` is half the sum of these over ``v``.  The Wiener
``(r,s)``-complexity counts distinct ``tr_{r,s}`` values, and a graph is
irregular for ``(r,s)`` when all of them differ.

Any connected graph is accepted, either as a :class:`FullereneGraph` or as
plain neighbour lists.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

import numpy as np
from numba import njit

from .graph import FullereneGraph

GraphLike = Union[FullereneGraph, Sequence[Sequence[int]]]

DEFAULT_PAIRS: tuple[tuple[int, int], ...] = ((1, 1), (2, 2), (1, 2), (3, 3), (2, 3), (1, 3))

_INT64_SAFE = 2**62


class Disconnected(ValueError):
    pass


class BadExponentRange(ValueError):
    pass


@njit(cache=True)
def _bfs_all_pairs(indptr, indices, n):
    dist = np.full((n, n), -1, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    for s in range(n):
        row = dist[s]
        row[s] = 0
        queue[0] = s
        head, tail = 0, 1
        while head < tail:
            v = queue[head]
            head += 1
            dv = row[v] + 1
            for j in range(indptr[v], indptr[v + 1]):
                u = indices[j]
                if row[u] < 0:
                    row[u] = dv
                    queue[tail] = u
                    tail += 1
        if tail != n:
            return dist, False
    return dist, True


def _csr(graph: GraphLike) -> tuple[np.ndarray, np.ndarray, int]:
    nbrs = graph.rotation if isinstance(graph, FullereneGraph) else graph
    n = len(nbrs)
    lengths = np.fromiter((len(x) for x in nbrs), dtype=np.int64, count=n)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(lengths, out=indptr[1:])
    indices = np.fromiter((u for x in nbrs for u in x), dtype=np.int64, count=int(indptr[-1]))
    return indptr, indices, n


@dataclass(frozen=True)
class DistanceMatrix:
    d: np.ndarray

    @property
    def n(self) -> int:
        return self.d.shape[0]

    @property
    def diameter(self) -> int:
        return int(self.d.max()) if self.n else 0

    def row_sums(self) -> np.ndarray:
        return self.d.sum(axis=1)


def all_pairs_distances(graph: GraphLike) -> DistanceMatrix:
    """Breadth-first search from every vertex."""
    indptr, indices, n = _csr(graph)
    if n == 0:
        raise Disconnected("empty graph")
    d, connected = _bfs_all_pairs(indptr, indices, n)
    if not connected:
        raise Disconnected("graph is not connected")
    d.setflags(write=False)
    return DistanceMatrix(d)


def _check_range(r: int, s: int) -> None:
    if r < 1 or s < r:
        raise BadExponentRange(f"need 1 <= r <= s, got r={r}, s={s}")


def _distances(graph_or_dist: GraphLike | DistanceMatrix) -> DistanceMatrix:
    if isinstance(graph_or_dist, DistanceMatrix):
        return graph_or_dist
    return all_pairs_distances(graph_or_dist)


def transmissions(dist: DistanceMatrix, r: int, s: int) -> np.ndarray:
    """``tr_{r,s}(v)`` for every vertex as exact integers.

    Uses int64 when ``n * sum(diam**i)`` provably fits, Python integers
    otherwise.
    """
    _check_range(r, s)
    n, diam = dist.n, dist.diameter
    bound = n * sum(diam**i for i in range(r, s + 1))
    d = dist.d if bound < _INT64_SAFE else dist.d.astype(object)
    total = np.zeros(n, dtype=d.dtype)
    power = d**r
    for i in range(r, s + 1):
        total = total + power.sum(axis=1)
        if i < s:
            power = power * d
    return total


@dataclass(frozen=True)
class TransmissionProfile:
    r: int
    s: int
    values: tuple[int, ...]

    def complexity(self) -> int:
        return len(set(self.values))


def transmission_profile(graph_or_dist: GraphLike | DistanceMatrix, r: int, s: int) -> TransmissionProfile:
    tr = transmissions(_distances(graph_or_dist), r, s)
    return TransmissionProfile(r, s, tuple(int(x) for x in tr))


def transmission(dist: DistanceMatrix, v: int, r: int, s: int) -> int:
    _check_range(r, s)
    row = [int(x) for x in dist.d[v]]
    return sum(x**i for x in row for i in range(r, s + 1))


def wiener_rs(dist: DistanceMatrix, r: int, s: int) -> int:
    """Sum over unordered pairs of ``d**i`` for ``i = r..s``."""
    _check_range(r, s)
    iu = np.triu_indices(dist.n, k=1)
    pair = dist.d[iu]
    if dist.n * dist.n * sum(dist.diameter**i for i in range(r, s + 1)) >= _INT64_SAFE:
        pair = pair.astype(object)
    return int(sum(int((pair**i).sum()) for i in range(r, s + 1)))


def complexity(dist: DistanceMatrix, r: int, s: int) -> int:
    """Number of distinct ``tr_{r,s}`` values."""
    return len(np.unique(transmissions(dist, r, s)))


def complexities(dist: DistanceMatrix, pairs: Iterable[tuple[int, int]] = DEFAULT_PAIRS) -> dict[tuple[int, int], int]:
    """Complexities for several pairs, sharing the per-moment row sums."""
    pairs = list(pairs)
    top = max(s for _, s in pairs)
    moments = {}
    n, diam = dist.n, dist.diameter
    d = dist.d if n * top * diam**top < _INT64_SAFE else dist.d.astype(object)
    power = d
    for i in range(1, top + 1):
        moments[i] = power.sum(axis=1)
        power = power * d
    out = {}
    for r, s in pairs:
        _check_range(r, s)
        tr = moments[r]
        for i in range(r + 1, s + 1):
            tr = tr + moments[i]
        out[(r, s)] = len(set(tr.tolist()))
    return out


def is_irregular(graph_or_dist: GraphLike | DistanceMatrix, r: int, s: int) -> bool:
    dist = _distances(graph_or_dist)
    return complexity(dist, r, s) == dist.n


@dataclass(frozen=True)
class IndexReport:
    W: int
    W_rs: Mapping[tuple[int, int], int]
    WW: Fraction
    TSZ: Fraction
    moments: Mapping[int, int] = field(default_factory=dict)


def index_report(graph_or_dist: GraphLike | DistanceMatrix, moments: Iterable[int] = (1, 2, 3),
                 pairs: Iterable[tuple[int, int]] = DEFAULT_PAIRS) -> IndexReport:
    dist = _distances(graph_or_dist)
    w_rs = {(r, s): wiener_rs(dist, r, s) for r, s in set(pairs) | {(1, 1), (1, 2), (2, 3)}}
    return IndexReport(
        W=w_rs[(1, 1)],
        W_rs=w_rs,
        WW=Fraction(w_rs[(1, 2)], 2),
        TSZ=Fraction(2 * w_rs[(1, 2)] + w_rs[(2, 3)], 6),
        moments={k: wiener_rs(dist, k, k) for k in moments},
    )
