"""Rewrites that bridge the relational and pattern sides of a hybrid plan.

Two rules live here. Predicate pushdown moves WHERE/ON conjuncts that
touch a single pattern element into the match itself, so the pattern
planner prices them and the executor applies them before anything is
joined. Trim-and-fuse post-processes a lowered pattern subplan: graph
table columns nothing upstream reads are dropped, and an edge expansion
whose edge variable is then referenced nowhere is collapsed into a plain
neighbor expansion that never materializes the edge.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import replace

from ..engine.plan import PlanNode
from ..frontend.ast import Const
from ..frontend.validator import PSEUDO_ATTRS, ResolvedPred, ResolvedQuery
from ..pattern import Constraint

__all__ = ["apply_filter_into_match", "apply_trim_and_fuse"]


# -- predicate pushdown --------------------------------------------------------


def _as_constraint(rq: ResolvedQuery, pred: ResolvedPred) -> Constraint | None:
    """Constraint form of a predicate confined to one pattern element, or
    None when it must stay in the outer conjunction. ID/LABEL are synthetic
    output-side columns, not attributes of the backing relation, so
    predicates over them are not movable."""
    left = pred.left
    if left.source != "graph":
        return None
    lb = rq.column_binding(left.column)
    if lb.attr in PSEUDO_ATTRS:
        return None
    right = pred.right
    if isinstance(right, Const):
        return Constraint(lb.var, lb.attr, pred.op, right.value)
    if right.source != "graph":
        return None
    rb = rq.column_binding(right.column)
    if rb.var != lb.var or rb.attr in PSEUDO_ATTRS:
        return None
    return Constraint(lb.var, lb.attr, pred.op, rhs_attr=rb.attr)


def apply_filter_into_match(rq: ResolvedQuery) -> ResolvedQuery:
    """Move every single-element predicate into the match pattern.

    Movability of one conjunct never depends on another, so a single pass
    reaches the fixpoint.
    """
    moved: list[Constraint] = []
    keep: list[ResolvedPred] = []
    for pred in rq.preds:
        c = _as_constraint(rq, pred)
        if c is None:
            keep.append(pred)
        else:
            moved.append(c)
    if not moved:
        return rq
    pattern = replace(rq.pattern,
                      constraints=rq.pattern.constraints + tuple(moved))
    return rq.with_pattern(pattern, tuple(keep))


# -- trim and fuse ---------------------------------------------------------------


def _trim_graph_cols(node: PlanNode, keep: set[str]) -> PlanNode:
    children = tuple(_trim_graph_cols(c, keep) for c in node.children)
    if node.kind == "scan_graph_table":
        cols = [c for c in node.params["cols"] if c["out"] in keep]
        if not cols:
            # keep the first column so the row stream retains its width
            cols = node.params["cols"][:1]
        params = dict(node.params)
        params["cols"] = cols
        return PlanNode(node.kind, params, children, node.estimate)
    return PlanNode(node.kind, node.params, children, node.estimate)


def _count_refs(node: PlanNode, refs: Counter) -> None:
    """References to bound variables from operator parameters. Definitions
    (scan vars, expansion outputs) do not count; only reads do."""
    k, p = node.kind, node.params
    if k == "filter":
        for pred in p["preds"]:
            for side in ("left", "right"):
                spec = pred[side]
                if "var" in spec:
                    refs[spec["var"]] += 1
    elif k in ("project", "scan_graph_table"):
        for c in p["cols"]:
            refs[c["var"]] += 1
    elif k == "hash_join":
        for keys in (p["left_keys"], p["right_keys"]):
            for spec in keys:
                refs[spec["var"]] += 1
        hint = p.get("index_hint")
        if hint is not None:
            refs[hint["edge_var"]] += 1
            refs[hint["vertex_var"]] += 1
    elif k == "graph_hash_join":
        for v in p["on"]:
            refs[v] += 1
    elif k in ("expand_edge", "expand"):
        refs[p["anchor"]] += 1
    elif k == "get_vertex":
        refs[p["edge_var"]] += 1
        if p.get("anchor") is not None:
            refs[p["anchor"]] += 1
    elif k == "expand_intersect":
        for leg in p["legs"]:
            refs[leg["anchor"]] += 1
    for c in node.children:
        _count_refs(c, refs)


def _fusable(get: PlanNode, exp: PlanNode) -> bool:
    g, x = get.params, exp.params
    if g["edge_var"] != x["edge_var"]:
        return False
    mode, d = g["mode"], x["dir"]
    if d == "out":
        return mode == "dst"
    if d == "in":
        return mode == "src"
    return mode == "other" and g.get("anchor") == x["anchor"]


def _fuse(node: PlanNode, refs: Counter) -> PlanNode:
    children = tuple(_fuse(c, refs) for c in node.children)
    if (node.kind == "get_vertex" and children
            and children[0].kind == "expand_edge"
            and _fusable(node, children[0])
            and refs[node.params["edge_var"]] == 1):
        exp = children[0]
        return PlanNode("expand", {
            "anchor": exp.params["anchor"],
            "elabel": exp.params["elabel"],
            "dir": exp.params["dir"],
            "vertex_var": node.params["vertex_var"],
        }, exp.children, node.estimate)
    return PlanNode(node.kind, node.params, children, node.estimate)


def apply_trim_and_fuse(plan: PlanNode, keep: set[str]) -> PlanNode:
    """Drop graph table output columns not named in keep, then fuse every
    expand_edge / get_vertex pair whose edge variable has no remaining
    readers (the get_vertex itself being the only one)."""
    plan = _trim_graph_cols(plan, keep)
    refs: Counter = Counter()
    _count_refs(plan, refs)
    return _fuse(plan, refs)
