"""relgraph: an in-memory relational-graph query engine.

SQL queries with an embedded GRAPH_TABLE/MATCH clause run against
property-graph views defined over plain relations. Two optimizers share
one execution engine: a relational baseline that rewrites the match into
joins, and a graph-aware optimizer that searches decomposition trees
against a pattern-cardinality catalog. A brute-force matcher serves as
the ground truth for both.
"""

from .errors import RelgraphError
from .mapping import ElementId, GraphDecl, GraphView, create_graph
from .pattern import Constraint, Pattern, PatternEdge
from .storage import Catalog, Column, Relation, TableSchema

__all__ = [
    "RelgraphError",
    "ElementId",
    "GraphDecl",
    "GraphView",
    "create_graph",
    "Constraint",
    "Pattern",
    "PatternEdge",
    "Catalog",
    "Column",
    "Relation",
    "TableSchema",
]

__version__ = "0.1.0"
