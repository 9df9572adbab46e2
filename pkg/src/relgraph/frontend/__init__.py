"""Query frontend: tokenizer, recursive-descent parser, validator and
pretty-printer for the SQL-with-MATCH dialect."""

from .ast import (
    BaseTableRef,
    ColRef,
    ColumnItem,
    Comparison,
    Const,
    CreatePropertyGraph,
    EdgeTerm,
    GraphTableClause,
    JoinSpec,
    MatchClause,
    PathExpr,
    SelectItem,
    SelectQuery,
    VertexTerm,
)
from .parser import parse_query, parse_statement, parse_ddl
from .printer import pretty
from .validator import ResolvedColRef, ResolvedPred, ResolvedQuery, validate

__all__ = [
    "BaseTableRef", "ColRef", "ColumnItem", "Comparison", "Const",
    "CreatePropertyGraph", "EdgeTerm", "GraphTableClause", "JoinSpec",
    "MatchClause", "PathExpr", "SelectItem", "SelectQuery", "VertexTerm",
    "parse_query", "parse_statement", "parse_ddl", "pretty",
    "ResolvedColRef", "ResolvedPred", "ResolvedQuery", "validate",
]
