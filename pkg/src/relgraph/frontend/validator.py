"""Semantic validation: resolve a parsed query against a catalog and its
graph views, producing the planner-facing intermediate form.

The output HybridQuery has exactly one graph component (the MATCH) plus
any number of base tables, a conjunctive predicate list (ON and WHERE
merged; they mean the same thing here) and a projection. All column
references are resolved and type-checked.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Union

from ..errors import (
    AmbiguousColumnError,
    DisconnectedPatternError,
    DuplicateAliasError,
    TypeMismatchError,
    UnknownAttributeError,
    UnknownColumnError,
    UnknownGraphError,
    UnknownLabelError,
    UnknownVariableError,
    UnsupportedQueryError,
    ValidationError,
)
from ..mapping import GraphView
from ..pattern import Constraint, Pattern, PatternEdge
from ..storage import Catalog
from .ast import (
    BaseTableRef,
    ColRef,
    Comparison,
    Const,
    GraphTableClause,
    SelectQuery,
)

PSEUDO_ATTRS = ("ID", "LABEL")


@dataclass(frozen=True)
class ResolvedColRef:
    alias: str          # FROM-item alias
    column: str         # output column (graph) or relation column (base)
    kind: str           # int64 | string
    source: str         # "graph" | "base"


@dataclass(frozen=True)
class ResolvedPred:
    left: ResolvedColRef
    op: str
    right: Union[ResolvedColRef, Const]


@dataclass(frozen=True)
class OutputColumn:
    var: str
    attr: str  # attribute, or pseudo ID/LABEL
    alias: str
    kind: str


@dataclass
class ResolvedQuery:
    graph_name: str
    graph_alias: str
    pattern: Pattern
    columns: tuple[OutputColumn, ...]          # GRAPH_TABLE output schema
    tables: tuple[tuple[str, str], ...]        # (alias, relation)
    preds: tuple[ResolvedPred, ...]            # conjunctive, ON + WHERE
    select: tuple[tuple[ResolvedColRef, str], ...]  # (ref, output name)

    def column_binding(self, column: str) -> OutputColumn:
        for c in self.columns:
            if c.alias == column:
                return c
        raise KeyError(column)

    def with_pattern(self, pattern: Pattern,
                     preds: tuple[ResolvedPred, ...]) -> "ResolvedQuery":
        return replace(self, pattern=pattern, preds=preds)


def _attr_kind(catalog: Catalog, label: str, attr: str) -> str:
    rel = catalog.get_relation(label)
    if not rel.schema.has_column(attr):
        raise UnknownAttributeError(f"label {label!r} has no attribute {attr!r}")
    return rel.schema.column(attr).value_kind


def build_pattern(clause: GraphTableClause, view: GraphView,
                  catalog: Catalog) -> Pattern:
    """Desugar the MATCH clause into the shared pattern model."""
    vertices: dict[str, str] = {}
    order: list[str] = []
    edges: list[PatternEdge] = []
    constraints: list[Constraint] = []
    anon = 0
    taken: set[str] = set()

    def add_vertex(term) -> str:
        nonlocal constraints
        if term.var in vertices:
            if term.label is not None and term.label != vertices[term.var]:
                raise TypeMismatchError(
                    f"vertex {term.var!r} re-declared with label {term.label!r}, "
                    f"was {vertices[term.var]!r}")
        else:
            if term.label is None:
                raise UnknownLabelError(
                    f"first use of vertex {term.var!r} needs a label")
            if term.label not in view.vertex_labels:
                raise UnknownLabelError(
                    f"{term.label!r} is not a vertex label of graph {view.name!r}")
            if term.var in taken:
                raise DuplicateAliasError(
                    f"variable {term.var!r} already used for an edge")
            vertices[term.var] = term.label
            order.append(term.var)
            taken.add(term.var)
        for attr, const in term.props:
            kind = _attr_kind(catalog, vertices[term.var], attr)
            if const.kind != kind:
                raise TypeMismatchError(
                    f"{term.var}.{attr} is {kind}, literal {const.value!r} is not")
            constraints.append(Constraint(term.var, attr, "=", const.value))
        return term.var

    for path in clause.match.paths:
        prev = add_vertex(path.first)
        for edge_term, vterm in path.steps:
            cur = add_vertex(vterm)
            if edge_term.label not in view.edge_labels:
                raise UnknownLabelError(
                    f"{edge_term.label!r} is not an edge label of graph {view.name!r}")
            var = edge_term.var
            if var is None:
                while f"_e{anon}" in taken:
                    anon += 1
                var = f"_e{anon}"
                anon += 1
            if var in taken:
                raise DuplicateAliasError(f"variable {var!r} declared twice")
            taken.add(var)
            if edge_term.arrow == "right":
                src, dst, directed = prev, cur, True
            elif edge_term.arrow == "left":
                src, dst, directed = cur, prev, True
            else:
                src, dst, directed = prev, cur, False
            info = view.edge_info[edge_term.label]
            if directed:
                want = ((vertices[src], info.src_label), (vertices[dst], info.dst_label))
            else:
                # undirected: endpoints must fit one orientation or the other
                fits_fwd = (vertices[src] == info.src_label
                            and vertices[dst] == info.dst_label)
                fits_bwd = (vertices[src] == info.dst_label
                            and vertices[dst] == info.src_label)
                if not (fits_fwd or fits_bwd):
                    raise TypeMismatchError(
                        f"edge {var!r} ({edge_term.label}) cannot connect "
                        f"{vertices[src]!r} and {vertices[dst]!r}")
                want = ()
            for have, need in want:
                if have != need:
                    raise TypeMismatchError(
                        f"edge {var!r} ({edge_term.label}) expects {need!r} "
                        f"endpoint, got {have!r}")
            edges.append(PatternEdge(var, edge_term.label, src, dst, directed))
            for attr, const in edge_term.props:
                kind = _attr_kind(catalog, edge_term.label, attr)
                if const.kind != kind:
                    raise TypeMismatchError(
                        f"{var}.{attr} is {kind}, literal {const.value!r} is not")
                constraints.append(Constraint(var, attr, "=", const.value))
            prev = cur

    pattern = Pattern(
        tuple((v, vertices[v]) for v in order),
        tuple(edges),
        tuple(constraints),
        clause.match.distinct,
    )
    if not pattern.is_connected():
        raise DisconnectedPatternError(
            f"match pattern is disconnected: {pattern.describe()}")
    return pattern


def validate(query: SelectQuery, catalog: Catalog,
             graphs: dict[str, GraphView]) -> ResolvedQuery:
    graph_clauses = [f for f in query.from_items if isinstance(f, GraphTableClause)]
    if len(graph_clauses) != 1:
        raise UnsupportedQueryError(
            f"query must contain exactly one GRAPH_TABLE, found {len(graph_clauses)}")
    gclause = graph_clauses[0]
    if gclause.graph not in graphs:
        raise UnknownGraphError(f"unknown graph {gclause.graph!r}")
    view = graphs[gclause.graph]

    pattern = build_pattern(gclause, view, catalog)

    # graph output columns
    out_cols: list[OutputColumn] = []
    seen_aliases: set[str] = set()
    all_vars = set(pattern.vertex_vars) | set(pattern.edge_vars)
    for item in gclause.columns:
        if item.var not in all_vars:
            raise UnknownVariableError(
                f"COLUMNS references unknown variable {item.var!r}")
        if item.attr in PSEUDO_ATTRS:
            kind = "string"
        else:
            kind = _attr_kind(catalog, pattern.var_label(item.var), item.attr)
        if item.alias in seen_aliases:
            raise DuplicateAliasError(f"duplicate output column {item.alias!r}")
        seen_aliases.add(item.alias)
        out_cols.append(OutputColumn(item.var, item.attr, item.alias, kind))

    # FROM aliases
    tables: list[tuple[str, str]] = []
    aliases: dict[str, str] = {gclause.alias: "graph"}
    base_refs = [f for f in query.from_items if isinstance(f, BaseTableRef)]
    base_refs += [j.table for j in query.joins]
    for ref in base_refs:
        catalog.get_relation(ref.table)  # raises UnknownRelationError
        if ref.alias in aliases:
            raise DuplicateAliasError(f"duplicate FROM alias {ref.alias!r}")
        aliases[ref.alias] = "base"
        tables.append((ref.alias, ref.table))

    table_of = dict(tables)
    col_by_alias = {c.alias: c for c in out_cols}

    def resolve(ref: ColRef) -> ResolvedColRef:
        if ref.qualifier is not None:
            if ref.qualifier not in aliases:
                raise UnknownColumnError(f"unknown alias {ref.qualifier!r}")
            if aliases[ref.qualifier] == "graph":
                col = col_by_alias.get(ref.name)
                if col is None:
                    raise UnknownColumnError(
                        f"graph table {ref.qualifier!r} has no column {ref.name!r}")
                return ResolvedColRef(ref.qualifier, ref.name, col.kind, "graph")
            rel = catalog.get_relation(table_of[ref.qualifier])
            if not rel.schema.has_column(ref.name):
                raise UnknownColumnError(
                    f"table {ref.qualifier!r} has no column {ref.name!r}")
            return ResolvedColRef(ref.qualifier, ref.name,
                                  rel.schema.column(ref.name).value_kind, "base")
        hits: list[ResolvedColRef] = []
        if ref.name in col_by_alias:
            hits.append(ResolvedColRef(gclause.alias, ref.name,
                                       col_by_alias[ref.name].kind, "graph"))
        for alias, table in tables:
            rel = catalog.get_relation(table)
            if rel.schema.has_column(ref.name):
                hits.append(ResolvedColRef(
                    alias, ref.name, rel.schema.column(ref.name).value_kind, "base"))
        if not hits:
            raise UnknownColumnError(f"unknown column {ref.name!r}")
        if len(hits) > 1:
            raise AmbiguousColumnError(
                f"column {ref.name!r} is ambiguous across "
                f"{[h.alias for h in hits]}")
        return hits[0]

    def resolve_pred(cmp: Comparison) -> ResolvedPred:
        if isinstance(cmp.left, Const) and isinstance(cmp.right, Const):
            raise ValidationError("constant-only predicates are not supported")
        if isinstance(cmp.left, Const):
            # normalize literal to the right side, flipping the operator
            flipped = {"<": ">", "<=": ">=", ">": "<", ">=": "<="}
            op = flipped.get(cmp.op, cmp.op)
            cmp = Comparison(cmp.right, op, cmp.left, cmp.pos)
        left = resolve(cmp.left)
        if isinstance(cmp.right, Const):
            if cmp.right.kind != left.kind:
                raise TypeMismatchError(
                    f"{cmp.left.describe()} is {left.kind}, "
                    f"literal {cmp.right.value!r} is not")
            return ResolvedPred(left, cmp.op, cmp.right)
        right = resolve(cmp.right)
        if right.kind != left.kind:
            raise TypeMismatchError(
                f"type mismatch: {cmp.left.describe()} is {left.kind}, "
                f"{cmp.right.describe()} is {right.kind}")
        return ResolvedPred(left, cmp.op, right)

    preds = [resolve_pred(c) for j in query.joins for c in j.conds]
    preds += [resolve_pred(c) for c in query.where]

    select: list[tuple[ResolvedColRef, str]] = []
    out_names: set[str] = set()
    for item in query.items:
        rc = resolve(item.ref)
        name = item.alias or item.ref.name
        if name in out_names:
            raise DuplicateAliasError(f"duplicate output name {name!r}")
        out_names.add(name)
        select.append((rc, name))

    return ResolvedQuery(
        graph_name=gclause.graph,
        graph_alias=gclause.alias,
        pattern=pattern,
        columns=tuple(out_cols),
        tables=tuple(tables),
        preds=tuple(preds),
        select=tuple(select),
    )
