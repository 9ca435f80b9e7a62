"""Terminal-only vertex flow/cut sparsifiers for trees and quasi-bipartite graphs."""

from .model import CapacitatedGraph, Demand, MergePlan, convex_combine, phi_merge
from .quasibip import exact_qb_sparsifier, qb_sparsifier
from .zeroext import expected_sparsifier

__all__ = [
    "CapacitatedGraph",
    "Demand",
    "MergePlan",
    "convex_combine",
    "exact_qb_sparsifier",
    "expected_sparsifier",
    "phi_merge",
    "qb_sparsifier",
]
