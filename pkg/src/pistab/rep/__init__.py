"""Quiver representations: construction, relations, Hom, direct sums, subreps."""

from .core import (QuiverRep, change_basis, check_relations, direct_sum, generic_rep,
                   hom_space)
from .finite_field import DegenerateReduction, subrep_dimvectors_mod_p
from .subreps import (DEFAULT_MAX_TOTAL, DEFAULT_SEARCH_VECTORS, arrow_closure,
                      enumerate_subrep_dimvectors, interior, is_subrep, subrep_family)

__all__ = [
    "QuiverRep", "change_basis", "check_relations", "direct_sum", "generic_rep", "hom_space",
    "DegenerateReduction", "subrep_dimvectors_mod_p", "DEFAULT_MAX_TOTAL",
    "DEFAULT_SEARCH_VECTORS", "arrow_closure", "enumerate_subrep_dimvectors", "interior",
    "is_subrep", "subrep_family",
]
