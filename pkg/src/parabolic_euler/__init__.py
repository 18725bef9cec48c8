"""Exact Euler characteristics of vector bundles on moduli of parabolic bundles."""
from .root_system import CoVector, Root, WallSpec, lattice_point
from .diagonal_trees import enumerate_diagonal, is_diagonal
from .characters import character, weyl_dimension
from .formulas import (EulerQuery, chi_line, chi_multi, chi_vector, chi_vector_explicit, chi_wedge2,
                       rank2_closed, rank2_two_point, wallcross_residue)

__version__ = "0.1.0"

__all__ = [
    "CoVector", "Root", "WallSpec", "lattice_point", "enumerate_diagonal", "is_diagonal", "character",
    "weyl_dimension", "EulerQuery", "chi_line", "chi_multi", "chi_vector", "chi_vector_explicit", "chi_wedge2",
    "rank2_closed", "rank2_two_point", "wallcross_residue",
]
