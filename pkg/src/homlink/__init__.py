"""Exact workbench for the graph complex of homotopy link diagrams,
Milnor invariants of pure-braid string links, and Monte Carlo
configuration space integrals tying the two together."""

__version__ = "0.1.0"

SCHEMA_VERSIONS = {
    "diagram": 1,
    "basis": 1,
    "polylink": 1,
    "estimate": 1,
}

from . import csintegral, dgalgebra, diagrams, exactla, milnor, relations

__all__ = [
    "SCHEMA_VERSIONS",
    "csintegral",
    "dgalgebra",
    "diagrams",
    "exactla",
    "milnor",
    "relations",
]
