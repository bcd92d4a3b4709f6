"""Fullerene graph representation and structural validation.

A graph is stored as a rotation system: for every vertex the cyclic order of
its three neighbours.  Faces are traced with a single fixed rule: after
traversing the directed edge ``u -> v`` the walk continues along
``v -> w`` where ``w`` follows ``u`` in the rotation of ``v``.  Every directed
edge lies on exactly one face traced this way.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Hashable, Iterable, Sequence

import numpy as np

PENTAGONS = 12


class GraphError(ValueError):
    """Base class for rejected rotation systems."""


class AsymmetricAdjacency(GraphError):
    pass


class NotCubic(GraphError):
    pass


class NotConnected(GraphError):
    pass


class NonClosingFace(GraphError):
    pass


class BadFaceSize(GraphError):
    pass


class WrongPentagonCount(GraphError):
    pass


class NotSpherical(GraphError):
    """Face count disagrees with Euler's formula for a cubic plane graph."""


class BadVertexCount(GraphError):
    pass


@dataclass(frozen=True)
class Face:
    vertices: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.vertices)

    def directed_edges(self) -> list[tuple[int, int]]:
        vs = self.vertices
        return [(vs[i], vs[(i + 1) % len(vs)]) for i in range(len(vs))]


@dataclass(frozen=True, eq=False)
class FullereneGraph:
    """Immutable cubic plane graph with its traced faces.

    Equality compares rotation systems only; ``id`` is informational.
    """

    rotation: tuple[tuple[int, int, int], ...]
    faces: tuple[Face, ...]
    id: Hashable = field(default=None, compare=False)

    @property
    def vertex_count(self) -> int:
        return len(self.rotation)

    n = vertex_count

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FullereneGraph):
            return NotImplemented
        return self.rotation == other.rotation

    def __hash__(self) -> int:
        return hash(self.rotation)

    def __repr__(self) -> str:
        return f"FullereneGraph(n={self.vertex_count}, id={self.id!r})"

    @cached_property
    def adjacency(self) -> np.ndarray:
        """``(n, 3)`` int array of neighbours in rotation order."""
        arr = np.array(self.rotation, dtype=np.int64).reshape(-1, 3)
        arr.setflags(write=False)
        return arr

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u, nbrs in enumerate(self.rotation) for v in nbrs if u < v]

    @cached_property
    def face_of_edge(self) -> dict[tuple[int, int], int]:
        return {e: i for i, f in enumerate(self.faces) for e in f.directed_edges()}

    def face_sizes(self) -> list[int]:
        return [f.size for f in self.faces]

    def face_adjacency(self) -> list[list[int]]:
        """Neighbouring faces of each face, in boundary order."""
        owner = self.face_of_edge
        return [[owner[(v, u)] for u, v in f.directed_edges()] for f in self.faces]

    def with_id(self, ident: Hashable) -> "FullereneGraph":
        return FullereneGraph(self.rotation, self.faces, ident)

    def relabel(self, perm: Sequence[int]) -> "FullereneGraph":
        """Graph with vertex ``v`` renamed ``perm[v]`` (rotations preserved)."""
        n = self.vertex_count
        rot: list[tuple[int, int, int] | None] = [None] * n
        for v, nbrs in enumerate(self.rotation):
            rot[perm[v]] = tuple(perm[u] for u in nbrs)  # type: ignore[assignment]
        return build_graph(rot, ident=self.id)  # type: ignore[arg-type]


def _check_rotation(rotation: Sequence[Sequence[int]]) -> tuple[tuple[int, ...], ...]:
    n = len(rotation)
    rot = tuple(tuple(int(u) for u in nbrs) for nbrs in rotation)
    for v, nbrs in enumerate(rot):
        if len(nbrs) != 3 or len(set(nbrs)) != 3:
            raise NotCubic(f"vertex {v} has neighbour list {list(nbrs)}; need 3 distinct")
        for u in nbrs:
            if not 0 <= u < n or u == v:
                raise AsymmetricAdjacency(f"vertex {v} lists invalid neighbour {u}")
    for v, nbrs in enumerate(rot):
        for u in nbrs:
            if v not in rot[u]:
                raise AsymmetricAdjacency(f"edge {v}->{u} has no reverse edge")
    return rot


def _check_connected(rot: Sequence[Sequence[int]]) -> None:
    n = len(rot)
    if n == 0:
        raise NotConnected("empty graph")
    seen = [False] * n
    seen[0] = True
    queue = deque([0])
    count = 1
    while queue:
        v = queue.popleft()
        for u in rot[v]:
            if not seen[u]:
                seen[u] = True
                count += 1
                queue.append(u)
    if count != n:
        raise NotConnected(f"only {count} of {n} vertices reachable from vertex 0")


def extract_faces(
    rotation: Sequence[Sequence[int]], max_face_size: int | None = 6
) -> list[Face]:
    """Trace all faces of the embedding given by ``rotation``.

    Raises NonClosingFace when a walk exceeds ``max_face_size`` edges, which
    signals a corrupt embedding.  ``None`` disables the bound.
    """
    rot = [tuple(nbrs) for nbrs in rotation]
    pos = [{u: i for i, u in enumerate(nbrs)} for nbrs in rot]
    limit = max_face_size if max_face_size is not None else sum(map(len, rot))
    used: set[tuple[int, int]] = set()
    faces: list[Face] = []
    for v0, nbrs in enumerate(rot):
        for u0 in nbrs:
            if (v0, u0) in used:
                continue
            cycle = []
            u, v = v0, u0
            while True:
                used.add((u, v))
                cycle.append(u)
                if len(cycle) > limit:
                    raise NonClosingFace(
                        f"face through edge {v0}->{u0} exceeds {limit} edges"
                    )
                nv = rot[v]
                w = nv[(pos[v][u] + 1) % len(nv)]
                u, v = v, w
                if (u, v) == (v0, u0):
                    break
            faces.append(Face(tuple(cycle)))
    return faces


def build_graph(
    rotation: Sequence[Sequence[int]],
    *,
    ident: Hashable = None,
    strict: bool = True,
) -> FullereneGraph:
    """Validate a rotation system and return the graph with its faces.

    ``strict=False`` accepts any connected cubic plane graph (face sizes,
    pentagon count and vertex count unchecked); it exists for exercising the
    metrics on non-fullerene inputs.
    """
    rot = _check_rotation(rotation)
    _check_connected(rot)
    n = len(rot)
    if strict:
        faces = extract_faces(rot, max_face_size=6)
        for f in faces:
            if f.size not in (5, 6):
                raise BadFaceSize(f"face {list(f.vertices)} has size {f.size}")
    else:
        faces = extract_faces(rot, max_face_size=None)
    if len(faces) != n // 2 + 2 or n % 2:
        raise NotSpherical(f"{len(faces)} faces for {n} vertices, expected {n // 2 + 2}")
    if strict:
        pent = sum(1 for f in faces if f.size == 5)
        if pent != PENTAGONS:
            raise WrongPentagonCount(f"{pent} pentagons, expected {PENTAGONS}")
        if n < 20 or n == 22:
            raise BadVertexCount(f"no fullerene has {n} vertices")
    return FullereneGraph(rot, tuple(faces), ident)  # type: ignore[arg-type]


def is_ipr(graph: FullereneGraph) -> bool:
    """True when no two pentagonal faces share an edge."""
    owner = graph.face_of_edge
    faces = graph.faces
    for f in faces:
        if f.size != 5:
            continue
        for u, v in f.directed_edges():
            if faces[owner[(v, u)]].size == 5:
                return False
    return True


def from_edges(n: int, edges: Iterable[tuple[int, int]]) -> list[list[int]]:
    """Plain adjacency lists (no embedding) for non-planar metric inputs."""
    adj: list[list[int]] = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    return adj
