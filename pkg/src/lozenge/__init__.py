"""Lozenge tilings, non-intersecting particles and their spectral curves."""
from .lattice import (
    DefectGeometry,
    DomainError,
    HalfInt,
    Partition,
    RhombusDomain,
    build_from_boundaries,
    build_hexagon,
    defect_geometry,
)
from .qpoly import HalfQPolynomial, macmahon_series

__version__ = "0.1.0"
