"""planar_code streams and spiral text.

planar_code layout: the 15 ASCII bytes ``>>planar_code<<`` once at the start,
then one record per graph.  A record is the vertex count as one byte (or a
zero byte followed by a little-endian 16-bit count when it exceeds 255), then
for every vertex its neighbours in rotation order, 1-based, each list closed
by a zero (one byte per entry, or 16-bit little-endian entries in the wide
form).

Spiral text holds one spiral per line, either as face sizes
(``5 6 5 ...`` or ``5,6,5,...``) or as pentagon positions
(``n: p1 ... p12``, 1-based).  Lines starting with ``#`` are comments.
"""

from __future__ import annotations

import io
import re
import struct
from typing import BinaryIO, Iterable, Iterator, TextIO

from .graph import FullereneGraph, GraphError, WrongPentagonCount, build_graph
from .spiral import BadSpiral, SpiralSequence

HEADER = b">>planar_code<<"


class CodecError(ValueError):
    pass


class BadHeader(CodecError):
    pass


class TruncatedRecord(CodecError):
    def __init__(self, index: int, detail: str):
        super().__init__(f"record {index}: {detail}")
        self.index = index


class ValidationFailed(CodecError):
    def __init__(self, index: int, cause: GraphError):
        super().__init__(f"record {index}: {cause}")
        self.index = index
        self.cause = cause


class BadToken(CodecError):
    pass


class LengthMismatch(CodecError):
    pass


def _as_stream(data: bytes | BinaryIO) -> BinaryIO:
    return io.BytesIO(data) if isinstance(data, (bytes, bytearray, memoryview)) else data


def _read_exact(stream: BinaryIO, size: int, index: int, what: str) -> bytes:
    chunk = stream.read(size)
    if len(chunk) != size:
        raise TruncatedRecord(index, f"stream ended inside {what}")
    return chunk


def iter_rotations(data: bytes | BinaryIO) -> Iterator[list[list[int]]]:
    """Decode raw 0-based rotation systems without validating them."""
    stream = _as_stream(data)
    header = stream.read(len(HEADER))
    if header != HEADER:
        raise BadHeader(f"expected {HEADER!r} at offset 0, got {header!r}")
    index = 0
    while True:
        first = stream.read(1)
        if not first:
            return
        n = first[0]
        wide = n == 0
        if wide:
            (n,) = struct.unpack("<H", _read_exact(stream, 2, index, "vertex count"))
        width = 2 if wide else 1
        fmt = "<H" if wide else "<B"
        rotation: list[list[int]] = []
        for v in range(n):
            nbrs: list[int] = []
            while True:
                (x,) = struct.unpack(fmt, _read_exact(stream, width, index, f"vertex {v + 1}"))
                if x == 0:
                    break
                if x > n:
                    raise TruncatedRecord(index, f"vertex {v + 1} lists neighbour {x} > {n}")
                nbrs.append(x - 1)
            rotation.append(nbrs)
        yield rotation
        index += 1


def read_planar_code(data: bytes | BinaryIO, *, strict: bool = True) -> Iterator[FullereneGraph]:
    """Yield validated graphs in stream order; ids are 0-based record indices."""
    for index, rotation in enumerate(iter_rotations(data)):
        try:
            yield build_graph(rotation, ident=index, strict=strict)
        except GraphError as exc:
            raise ValidationFailed(index, exc) from exc


def encode_graph(graph: FullereneGraph) -> bytes:
    n = graph.vertex_count
    if n <= 255:
        out = bytearray([n])
        for nbrs in graph.rotation:
            out.extend(u + 1 for u in nbrs)
            out.append(0)
        return bytes(out)
    parts = [b"\x00", struct.pack("<H", n)]
    for nbrs in graph.rotation:
        parts.append(struct.pack(f"<{len(nbrs) + 1}H", *(u + 1 for u in nbrs), 0))
    return b"".join(parts)


def write_planar_code(graphs: Iterable[FullereneGraph], sink: BinaryIO | None = None) -> bytes | None:
    """Encode ``graphs``; returns the bytes, or streams them into ``sink``."""
    if sink is None:
        return HEADER + b"".join(encode_graph(g) for g in graphs)
    sink.write(HEADER)
    for g in graphs:
        sink.write(encode_graph(g))
    return None


_SPLIT = re.compile(r"[,\s]+")


def parse_spiral(text: str) -> SpiralSequence:
    text = text.strip()
    if ":" in text:
        head, _, tail = text.partition(":")
        try:
            n = int(head)
            positions = [int(t) for t in _SPLIT.split(tail.strip()) if t]
        except ValueError as exc:
            raise BadToken(f"cannot parse {text!r}") from exc
        if n % 2 or n < 20:
            raise LengthMismatch(f"{n} is not a fullerene vertex count")
        if len(positions) != 12:
            raise WrongPentagonCount(f"{len(positions)} pentagon positions, expected 12")
        if len(set(positions)) != 12:
            raise BadToken(f"repeated pentagon position in {text!r}")
        try:
            return SpiralSequence.from_pentagons(n, positions)
        except BadSpiral as exc:
            raise LengthMismatch(str(exc)) from exc
    tokens = [t for t in _SPLIT.split(text) if t]
    if any(t not in ("5", "6") for t in tokens):
        bad = next(t for t in tokens if t not in ("5", "6"))
        raise BadToken(f"face size token {bad!r} is not 5 or 6")
    if len(tokens) < 12:
        raise LengthMismatch(f"{len(tokens)} faces; a fullerene has at least 12")
    return SpiralSequence(tuple(int(t) for t in tokens))


def format_spiral(spiral: SpiralSequence, *, positions: bool = False) -> str:
    if positions:
        return str(spiral)
    return " ".join(map(str, spiral.sizes))


def read_spirals(lines: Iterable[str] | TextIO) -> Iterator[SpiralSequence]:
    for line in lines:
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        yield parse_spiral(line)


def write_spirals(spirals: Iterable[SpiralSequence], sink: TextIO, *, positions: bool = True) -> None:
    for s in spirals:
        sink.write(format_spiral(s, positions=positions) + "\n")
