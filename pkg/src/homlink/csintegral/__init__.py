"""Configuration space integrals over piecewise-linear string links."""

from .mc import (
    IntegralEstimate,
    edge_form_factor,
    integrate_cocycle,
    integrate_diagram,
    kernel_backend,
)
from .polylink import PolyLink, Strand, exact_linking, from_braid, split_link

__all__ = [
    "IntegralEstimate",
    "PolyLink",
    "Strand",
    "edge_form_factor",
    "exact_linking",
    "from_braid",
    "integrate_cocycle",
    "integrate_diagram",
    "kernel_backend",
    "split_link",
]
