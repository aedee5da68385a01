"""Finite median algebras and their intrinsic uniform and topological structure."""
from .algebra import (
    AxiomViolation,
    FiniteMedianAlgebra,
    MedianAlgebraError,
    NotConvexError,
    NotMedianGraph,
    SizeBoundError,
    automorphisms,
    from_median_table,
    from_points,
    gate,
    interval,
    is_convex,
    make_chain,
    make_grid,
    make_hypercube,
    make_product,
    make_starlet,
    median_graph_from_edges,
    verify_axioms,
)
from .walls import dilworth_colouring, interval_chain_embedding, rank, walls
from .uniformity import branch, chain_subbase, is_hausdorff_Um, shadow, t2m_check
from .topology import min_isolating_branches, tau_m, wall_metric
from .roller import consistent_orientations, parse_symbolic, periodic_square_witness

__version__ = "0.1.0"

__all__ = [
    "AxiomViolation", "FiniteMedianAlgebra", "MedianAlgebraError", "NotConvexError",
    "NotMedianGraph", "SizeBoundError", "automorphisms", "from_median_table", "from_points",
    "gate", "interval", "is_convex", "make_chain", "make_grid", "make_hypercube",
    "make_product", "make_starlet", "median_graph_from_edges", "verify_axioms",
    "dilworth_colouring", "interval_chain_embedding", "rank", "walls",
    "branch", "chain_subbase", "is_hausdorff_Um", "shadow", "t2m_check",
    "min_isolating_branches", "tau_m", "wall_metric",
    "consistent_orientations", "parse_symbolic", "periodic_square_witness",
]
