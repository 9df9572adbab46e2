"""Canonical statement printer. Round-trips with the parser:
parse_statement(pretty(stmt)) == stmt (positions are ignored by equality).
"""

from __future__ import annotations

from .ast import (
    BaseTableRef,
    ColRef,
    Comparison,
    Const,
    CreatePropertyGraph,
    EdgeTerm,
    GraphTableClause,
    PathExpr,
    SelectQuery,
    Statement,
    VertexTerm,
)


def _const(c: Const) -> str:
    if isinstance(c.value, str):
        return "'" + c.value.replace("'", "''") + "'"
    return str(c.value)


def _colref(r: ColRef) -> str:
    return f"{r.qualifier}.{r.name}" if r.qualifier else r.name


def _operand(x) -> str:
    return _const(x) if isinstance(x, Const) else _colref(x)


def _comparison(c: Comparison) -> str:
    return f"{_operand(c.left)} {c.op} {_operand(c.right)}"


def _props(props) -> str:
    if not props:
        return ""
    inner = ", ".join(f"{attr}: {_const(v)}" for attr, v in props)
    return " {" + inner + "}"


def _vertex(v: VertexTerm) -> str:
    label = f":{v.label}" if v.label else ""
    return f"({v.var}{label}{_props(v.props)})"


def _edge(e: EdgeTerm) -> str:
    var = e.var or ""
    body = f"[{var}:{e.label}{_props(e.props)}]"
    if e.arrow == "right":
        return f"-{body}->"
    if e.arrow == "left":
        return f"<-{body}-"
    return f"-{body}-"


def _path(p: PathExpr) -> str:
    out = [_vertex(p.first)]
    for edge, vertex in p.steps:
        out.append(_edge(edge))
        out.append(_vertex(vertex))
    return "".join(out)


def _graph_table(g: GraphTableClause) -> str:
    match = "MATCH "
    if g.match.distinct != "none":
        match += f"DISTINCT {g.match.distinct.upper()} "
    match += ", ".join(_path(p) for p in g.match.paths)
    cols = ", ".join(f"{c.var}.{c.attr} AS {c.alias}" for c in g.columns)
    return f"GRAPH_TABLE ({g.graph} {match} COLUMNS ({cols})) AS {g.alias}"


def _from_item(item) -> str:
    if isinstance(item, GraphTableClause):
        return _graph_table(item)
    assert isinstance(item, BaseTableRef)
    if item.alias != item.table:
        return f"{item.table} AS {item.alias}"
    return item.table


def _select(q: SelectQuery) -> str:
    items = ", ".join(
        _colref(i.ref) + (f" AS {i.alias}" if i.alias else "")
        for i in q.items
    )
    parts = [f"SELECT {items}"]
    parts.append("FROM " + ", ".join(_from_item(f) for f in q.from_items))
    for j in q.joins:
        conds = " AND ".join(_comparison(c) for c in j.conds)
        parts.append(f"JOIN {_from_item(j.table)} ON {conds}")
    if q.where:
        parts.append("WHERE " + " AND ".join(_comparison(c) for c in q.where))
    return "\n".join(parts)


def _create(c: CreatePropertyGraph) -> str:
    parts = [f"CREATE PROPERTY GRAPH {c.name}"]
    parts.append("  VERTEX TABLES (" + ", ".join(c.vertex_tables) + ")")
    edges = []
    for e in c.edge_tables:
        edges.append(
            f"{e.relation} SOURCE KEY ({e.src_key}) REFERENCES "
            f"{e.src_table} ({e.src_ref_key}) DESTINATION KEY ({e.dst_key}) "
            f"REFERENCES {e.dst_table} ({e.dst_ref_key})"
        )
    parts.append("  EDGE TABLES (" + ",\n               ".join(edges) + ")")
    return "\n".join(parts)


def pretty(stmt: Statement) -> str:
    if isinstance(stmt, SelectQuery):
        return _select(stmt)
    return _create(stmt)
