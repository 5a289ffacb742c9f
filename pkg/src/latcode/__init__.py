"""Classification of linear codes with restricted weights.

Codes are handled as point multisets in PG(k-1, q); extension steps are
bounded integer equality systems whose lattice points are enumerated
exhaustively, pre-screened by feasibility search, filtered combinatorially
and deduplicated by canonical forms.
"""

__version__ = "0.1.0"

from .codemodel import (CodeStats, PointMultiset, WeightDistribution,
                        code_stats, generator_from_multiset, griesmer_bound,
                        multiset_from_generator, read_generator, residual,
                        weight_distribution, write_generator)
from .extsys import (ExtensionSystem, WeightSpectrum, apply_gap_reformulation,
                     build_extension_system, linearize_min_extension,
                     preprocess_line_feasibility)
from .geometry import Geometry, geometry_make, incident, project_multiset
from .gf import FieldSpec, field_make, field_op
from .solver import (Limits, SearchStats, Solution, check_feasible,
                     enumerate_solutions, export_lp)

__all__ = [
    "CodeStats", "ExtensionSystem", "FieldSpec", "Geometry", "Limits",
    "PointMultiset", "SearchStats", "Solution", "WeightDistribution",
    "WeightSpectrum", "apply_gap_reformulation", "build_extension_system",
    "check_feasible", "code_stats", "enumerate_solutions", "export_lp",
    "field_make", "field_op", "generator_from_multiset", "geometry_make",
    "griesmer_bound", "incident", "linearize_min_extension",
    "multiset_from_generator", "preprocess_line_feasibility",
    "project_multiset", "read_generator", "residual", "weight_distribution",
    "write_generator",
]
