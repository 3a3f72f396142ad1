"""Exact reconstruction of a weak Hopf algebra from sl2 fusion data at level r.

The pipeline runs from the dimension graph through the path weak bialgebra,
the braiding R-matrix from Temperley-Lieb calculus, the FRT quotient, and
finally the quotient by a central group-like.  All arithmetic is exact in a
cyclotomic field.
"""

from .cyclo import CycloField, CycloNumber, LevelField, field_for_level, quantum_integer
from .graph import DimensionGraph, Edge, Path, sl2_dimension_graph
from .path_wba import DegreeOverflowError, PathWba, WbaElement
from .temperley_lieb import RMatrix, closed_form_r, derive_r_matrix, jones_wenzl
from .frt_quotient import Quotient, check_star_triangular, frt_quotient, universal_r_form
from .wha_assembly import (
    AssembledWha,
    assemble_wha,
    fusion_oracle,
    grouplike_g2,
    grouplike_solve,
    solve_antipode,
    verify_grouplike,
)

__all__ = [
    "AssembledWha",
    "CycloField",
    "CycloNumber",
    "DegreeOverflowError",
    "DimensionGraph",
    "Edge",
    "LevelField",
    "Path",
    "PathWba",
    "Quotient",
    "RMatrix",
    "WbaElement",
    "assemble_wha",
    "check_star_triangular",
    "closed_form_r",
    "derive_r_matrix",
    "field_for_level",
    "frt_quotient",
    "fusion_oracle",
    "grouplike_g2",
    "grouplike_solve",
    "jones_wenzl",
    "quantum_integer",
    "sl2_dimension_graph",
    "solve_antipode",
    "universal_r_form",
    "verify_grouplike",
]

__version__ = "0.1.0"
