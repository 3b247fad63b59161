"""
Polar Reading

Polar coding for quantum reading: synthesized classical-quantum channels over binary quantum
memory cells, code construction, quantum successive-cancellation decoding and probe optimization.
"""

import os

from polar_reading.cell import MemoryCell, ProbeState, ad_cell, cq_view, rate, reliability
from polar_reading.errors import PolarReadingError
from polar_reading.polar import SourceKind, SourceModel, polar_transform

__version__ = "0.1.0"

__all__ = [
    "MemoryCell",
    "PolarReadingError",
    "ProbeState",
    "SourceKind",
    "SourceModel",
    "__version__",
    "ad_cell",
    "cq_view",
    "get_template_path",
    "polar_transform",
    "rate",
    "reliability",
]


def get_template_path():
    """Get the path to the templates directory."""
    return os.path.join(os.path.dirname(__file__), "templates")
