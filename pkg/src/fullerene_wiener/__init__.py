"""Fullerene enumeration and Wiener (r,s)-complexity surveys."""

__version__ = "0.1.0"

from .graph import Face, FullereneGraph, build_graph, extract_faces, is_ipr  # noqa: E402
from .metrics import (  # noqa: E402
    DEFAULT_PAIRS,
    DistanceMatrix,
    IndexReport,
    TransmissionProfile,
    all_pairs_distances,
    complexity,
    index_report,
    is_irregular,
    transmission,
    transmission_profile,
    wiener_rs,
)
from .spiral import SpiralSequence, canonical_spiral, generate, wind_up  # noqa: E402

__all__ = [
    "DEFAULT_PAIRS",
    "DistanceMatrix",
    "Face",
    "FullereneGraph",
    "IndexReport",
    "SpiralSequence",
    "TransmissionProfile",
    "all_pairs_distances",
    "build_graph",
    "canonical_spiral",
    "complexity",
    "extract_faces",
    "generate",
    "index_report",
    "is_ipr",
    "is_irregular",
    "transmission",
    "transmission_profile",
    "wiener_rs",
    "wind_up",
]
