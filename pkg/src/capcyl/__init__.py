"""Jacobi spectra, Morse indices and bifurcation periods of capillary Killing cylinders in H^3."""
from .errors import (
    ConvergenceError,
    DegenerateConfigurationError,
    DomainError,
    NoIntersectionError,
    NoKernelError,
)
from .geometry import (
    Ball,
    CylinderGeometry,
    Dirichlet,
    Equidistant,
    GeodesicSpheres,
    HalfGeodesicPlane,
    HalfHorosphere,
    Horospheres,
    SlabHorosphere,
    ball_geometry,
    critical_length,
    cylinder_geometry,
    cylinder_geometry_from_r,
)
from .spectra import EigenvalueEntry, IndexReport, index_report, spectrum

__version__ = "0.1.0"
