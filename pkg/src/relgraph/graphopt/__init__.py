"""Pattern-aware optimizer: canonical forms, cardinality catalog,
decomposition-tree search, rewrite rules, and the converged planner."""

from .canon import canonical_key, canonical_order, isomorphic_bruteforce
from .decompose import (
    DTree,
    enumerate_trees,
    search_graph_plan,
    star_parts,
    star_pattern,
    tree_cost,
    validate_tree,
)
from .pipeline import lower_tree, plan_converged
from .rules import apply_filter_into_match, apply_trim_and_fuse
from .stats import PatternCatalog, build_catalog, estimate_cardinality

__all__ = [
    "DTree",
    "PatternCatalog",
    "apply_filter_into_match",
    "apply_trim_and_fuse",
    "build_catalog",
    "canonical_key",
    "canonical_order",
    "enumerate_trees",
    "estimate_cardinality",
    "isomorphic_bruteforce",
    "lower_tree",
    "plan_converged",
    "search_graph_plan",
    "star_parts",
    "star_pattern",
    "tree_cost",
    "validate_tree",
]
