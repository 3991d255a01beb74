"""Discrete Hodge theory on surfaces stretched along the edges of a graph."""

__version__ = "0.1.0"

from .graph import Graph, HalfEdge, build_graph
from .cech import CochainSystem, cohomology, predicted_betti, rho_matrix
from .cross_section import CrossSectionSpectrum, discrete_cross_section, spectral_gap

__all__ = [
    "Graph",
    "HalfEdge",
    "build_graph",
    "CochainSystem",
    "cohomology",
    "predicted_betti",
    "rho_matrix",
    "CrossSectionSpectrum",
    "discrete_cross_section",
    "spectral_gap",
    "__version__",
]
