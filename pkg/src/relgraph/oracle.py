"""Brute-force pattern matcher: the ground truth everything else is
checked against.

Matching semantics are homomorphisms: a binding maps every pattern
variable (vertices and edges) to a graph element of the same label such
that every pattern edge's endpoints line up; two variables may bind the
same element unless a distinctness mode says otherwise. Matching an
undirected pattern edge tries both orientations, so a data self-loop is
found twice through an undirected edge — once per orientation. The
result is a multiset.

The matcher walks the pattern with plain backtracking over the adjacency
index and makes no cost decisions, which is exactly why it is trusted:
there is nothing clever to get wrong.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .errors import ValidationError
from .mapping import ElementId, GraphView
from .pattern import Constraint, Pattern, PatternEdge


@dataclass(frozen=True)
class BindingColumn:
    var: str
    kind: str  # "vertex" | "edge"
    label: str


@dataclass
class BindingTable:
    """A multiset of bindings; columns are vertex vars (declaration order)
    followed by edge vars (declaration order)."""

    columns: tuple[BindingColumn, ...]
    rows: list[tuple[ElementId, ...]]

    @property
    def var_names(self) -> tuple[str, ...]:
        return tuple(c.var for c in self.columns)

    def column_index(self, var: str) -> int:
        return self.var_names.index(var)

    def as_dicts(self) -> list[dict[str, ElementId]]:
        names = self.var_names
        return [dict(zip(names, row)) for row in self.rows]


def _compare(lhs, op: str, rhs) -> bool:
    if op == "=":
        return lhs == rhs
    if op == "<>":
        return lhs != rhs
    if op == "<":
        return lhs < rhs
    if op == "<=":
        return lhs <= rhs
    if op == ">":
        return lhs > rhs
    if op == ">=":
        return lhs >= rhs
    raise ValueError(f"bad op {op!r}")


def _attr_value(view: GraphView, elem: ElementId, attr: str):
    rel = view.catalog.get_relation(elem.label)
    v = rel.column(attr)[elem.rid]
    col = rel.schema.column(attr)
    return int(v) if col.ctype == "int64" else str(v)


def _passes(view: GraphView, elem: ElementId, cons: Sequence[Constraint]) -> bool:
    for c in cons:
        lhs = _attr_value(view, elem, c.attr)
        rhs = (_attr_value(view, elem, c.rhs_attr)
               if c.rhs_attr is not None else c.value)
        if not _compare(lhs, c.op, rhs):
            return False
    return True


def _edge_candidates(view: GraphView, e: PatternEdge, src_elem: ElementId,
                     dst_elem: ElementId) -> list[ElementId]:
    """Edges bindable to pattern edge e given both endpoint bindings.
    Undirected edges enumerate out then in, keeping duplicates."""
    dirs = ("out",) if e.directed else ("out", "in")
    out: list[ElementId] = []
    for d in dirs:
        for eid, nbr in view.neighbors(src_elem, e.label, d):
            if nbr == dst_elem:
                out.append(eid)
    return out


def match_bruteforce(view: GraphView, pattern: Pattern) -> BindingTable:
    """Enumerate every homomorphic match of pattern in view.

    Rows come out sorted lexicographically by (label, rid) tuples in
    column order, so the result is reproducible byte for byte.
    """
    vverts = pattern.vertex_vars
    if not vverts:
        raise ValidationError("pattern has no vertices")
    if not pattern.is_connected():
        raise ValidationError("pattern is disconnected")

    # Vertex search order: first declared vertex, then repeatedly the
    # earliest-declared vertex adjacent to the bound set. Each step picks
    # one anchor edge to generate candidates; every other pattern edge is
    # verified as soon as both its endpoints are bound.
    order: list[tuple[str, Optional[PatternEdge], Optional[str]]] = []
    bound: set[str] = set()
    order.append((vverts[0], None, None))
    bound.add(vverts[0])
    while len(bound) < len(vverts):
        nxt = None
        for v in vverts:
            if v in bound:
                continue
            for e in pattern.edges_at(v):
                w = e.other(v)
                if w in bound and w != v:
                    nxt = (v, e, w)
                    break
            if nxt:
                break
        if nxt is None:
            raise ValidationError("pattern is disconnected")
        order.append(nxt)
        bound.add(nxt[0])

    # Assign every edge to the earliest step after which both endpoints
    # are bound; the anchor edge of a step is consumed by that step.
    step_of_vertex = {spec[0]: i for i, spec in enumerate(order)}
    verify_edges: dict[int, list[PatternEdge]] = {i: [] for i in range(len(order))}
    for e in pattern.edges:
        step = max(step_of_vertex[e.src], step_of_vertex[e.dst])
        anchor = order[step][1]
        if anchor is not None and anchor.var == e.var:
            continue
        verify_edges[step].append(e)

    econs = {e.var: pattern.constraints_on(e.var) for e in pattern.edges}
    vcons = {v: pattern.constraints_on(v) for v in vverts}

    rows: list[tuple[ElementId, ...]] = []
    binding: dict[str, ElementId] = {}

    def verify_and_descend(step: int, edges: list[PatternEdge], ei: int):
        if ei == len(edges):
            descend(step + 1)
            return
        e = edges[ei]
        for cand in _edge_candidates(view, e, binding[e.src], binding[e.dst]):
            if not _passes(view, cand, econs[e.var]):
                continue
            binding[e.var] = cand
            verify_and_descend(step, edges, ei + 1)
            del binding[e.var]

    def descend(step: int):
        if step == len(order):
            rows.append(tuple(binding[c.var] for c in columns))
            return
        var, anchor, anchor_from = order[step]
        label = pattern.vertex_label(var)
        if anchor is None:
            n = view.n_vertices(label)
            for rid in range(n):
                elem = ElementId(label, rid)
                if not _passes(view, elem, vcons[var]):
                    continue
                binding[var] = elem
                verify_and_descend(step, verify_edges[step], 0)
                del binding[var]
            return
        # candidates through the anchor edge, from the already-bound side
        from_elem = binding[anchor_from]
        if anchor.directed:
            direction = "out" if anchor.src == anchor_from else "in"
        else:
            direction = "either"
        for eid, nbr in view.neighbors(from_elem, anchor.label, direction):
            if nbr.label != label:
                continue
            if not _passes(view, nbr, vcons[var]):
                continue
            if not _passes(view, eid, econs[anchor.var]):
                continue
            binding[var] = nbr
            binding[anchor.var] = eid
            verify_and_descend(step, verify_edges[step], 0)
            del binding[anchor.var]
            del binding[var]

    columns = tuple(
        [BindingColumn(v, "vertex", pattern.vertex_label(v)) for v in vverts]
        + [BindingColumn(e.var, "edge", e.label) for e in pattern.edges]
    )
    descend(0)

    rows = apply_distinct(pattern, columns, rows)
    rows.sort(key=lambda r: tuple((e.label, e.rid) for e in r))
    return BindingTable(columns, rows)


def apply_distinct(pattern: Pattern, columns: Sequence[BindingColumn],
                   rows: Iterable[tuple[ElementId, ...]]) -> list[tuple[ElementId, ...]]:
    mode = pattern.distinct
    if mode == "none":
        return list(rows)
    vidx = [i for i, c in enumerate(columns) if c.kind == "vertex"]
    eidx = [i for i, c in enumerate(columns) if c.kind == "edge"]
    out = []
    for r in rows:
        ok = True
        if mode in ("vertices", "all"):
            vs = [r[i] for i in vidx]
            ok = len(set(vs)) == len(vs)
        if ok and mode in ("edges", "all"):
            es = [r[i] for i in eidx]
            ok = len(set(es)) == len(es)
        if ok:
            out.append(r)
    return out


# ---------------------------------------------------------------------------
# projection over binding tables


def project_columns(view: GraphView, table: BindingTable,
                    cols: Sequence[tuple[str, str, str]]) -> tuple[list[str], list[tuple]]:
    """Project (var, attr, alias) columns out of a binding table.

    attr "ID" yields the canonical element string, "LABEL" the label;
    anything else reads the backing relation's column at the bound rid.
    """
    headers = [alias for _, _, alias in cols]
    idx = {c.var: i for i, c in enumerate(table.columns)}
    out_rows: list[tuple] = []
    for row in table.rows:
        vals = []
        for var, attr, _ in cols:
            elem = row[idx[var]]
            if attr == "ID":
                vals.append(str(elem))
            elif attr == "LABEL":
                vals.append(elem.label)
            else:
                vals.append(_attr_value(view, elem, attr))
        out_rows.append(tuple(vals))
    return headers, out_rows


# ---------------------------------------------------------------------------
# golden files


def golden_write(path: str | Path, table: BindingTable) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow([f"{c.var}:{c.kind}" for c in table.columns])
        for row in table.rows:
            w.writerow([str(e) for e in row])


def golden_read(path: str | Path) -> tuple[list[str], list[tuple[ElementId, ...]]]:
    with Path(path).open(newline="", encoding="utf-8") as f:
        r = csv.reader(f)
        header = next(r)
        rows = [tuple(ElementId.parse(c) for c in row) for row in r]
    return header, rows
