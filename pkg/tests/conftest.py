import gzip
import itertools
from pathlib import Path

import numpy as np
import pytest

from fullerene_wiener.graph import build_graph

DATA = Path(__file__).parent / "data"
FIXTURES = Path(__file__).parent / "fixtures"
CORPUS = DATA / "buckygen"

PHI = (1 + 5**0.5) / 2


def _cyclic_perms(p):
    x, y, z = p
    return [(x, y, z), (y, z, x), (z, x, y)]


def _signed(points):
    out = set()
    for p in points:
        for signs in itertools.product((1, -1), repeat=3):
            out.add(tuple(round(s * c, 9) for s, c in zip(signs, p)))
    return sorted(out)


def rotation_from_coordinates(points):
    """Cubic polyhedron: 3 nearest neighbours, ordered counter-clockwise seen from outside."""
    pts = np.asarray(points, dtype=float)
    d = np.linalg.norm(pts[:, None] - pts[None], axis=2)
    np.fill_diagonal(d, np.inf)
    edge = d.min()
    rotation = []
    for v, p in enumerate(pts):
        nbrs = np.flatnonzero(np.isclose(d[v], edge))
        assert len(nbrs) == 3
        normal = p / np.linalg.norm(p)
        e1 = pts[nbrs[0]] - p
        e1 -= normal * (e1 @ normal)
        e2 = np.cross(normal, e1)
        ang = [np.arctan2((pts[u] - p) @ e2, (pts[u] - p) @ e1) for u in nbrs]
        rotation.append([int(nbrs[i]) for i in np.argsort(ang)])
    return rotation


def dodecahedron_points():
    pts = [(1, 1, 1)]
    pts += _cyclic_perms((0, 1 / PHI, PHI))
    return _signed(pts)


def truncated_icosahedron_points():
    ico = _signed(_cyclic_perms((0, 1, PHI)))
    ico = np.asarray(ico)
    d = np.linalg.norm(ico[:, None] - ico[None], axis=2)
    out = []
    for a, b in zip(*np.nonzero(np.isclose(d, 2.0))):
        out.append(ico[a] + (ico[b] - ico[a]) / 3)
    return out


@pytest.fixture(scope="session")
def dodecahedron():
    return build_graph(rotation_from_coordinates(dodecahedron_points()), ident="C20")


@pytest.fixture(scope="session")
def c60():
    return build_graph(rotation_from_coordinates(truncated_icosahedron_points()), ident="C60-Ih")


def corpus_bytes(name):
    return gzip.decompress((CORPUS / name).read_bytes())


def random_connected_graph(rng, n, extra):
    """Adjacency lists of a random spanning tree plus ``extra`` random edges."""
    order = rng.permutation(n)
    edges = set()
    for i in range(1, n):
        u, v = int(order[i]), int(order[rng.integers(i)])
        edges.add((min(u, v), max(u, v)))
    while extra > 0 and len(edges) < n * (n - 1) // 2:
        u, v = (int(x) for x in rng.choice(n, 2, replace=False))
        e = (min(u, v), max(u, v))
        if e not in edges:
            edges.add(e)
            extra -= 1
    adj = [[] for _ in range(n)]
    for u, v in sorted(edges):
        adj[u].append(v)
        adj[v].append(u)
    return adj


# -- acceptance summary -------------------------------------------------------

_ACCEPTANCE: list[tuple[str, str]] = []


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        outcome = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[report.outcome]
        _ACCEPTANCE.append((outcome, report.nodeid.split("::")[-1]))


def _criterion(name):
    parts = name.split("_")
    return int(parts[2]) if len(parts) > 2 and parts[1] == "criterion" and parts[2].isdigit() else None


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    verdict: dict[int, list[str]] = {}
    for outcome, name in _ACCEPTANCE:
        terminalreporter.write_line(f"  {outcome}  {name}")
        k = _criterion(name.split("[")[0])
        if k is not None and outcome != "SKIP":
            verdict.setdefault(k, []).append(outcome)
    for k in sorted(verdict):
        status = "PASS" if all(o == "PASS" for o in verdict[k]) else "FAIL"
        terminalreporter.write_line(f"criterion {k}: {status} ({len(verdict[k])} checks)")
