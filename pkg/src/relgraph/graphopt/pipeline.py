"""Pattern-aware planning for the full hybrid query.

The flow: push single-element predicates into the match, search for the
cheapest decomposition tree of the (now constrained) pattern, lower that
tree to a physical subplan, wrap it in scan_graph_table, and run the same
join-order search the relational baseline uses over the graph table plus
the base tables, with the pattern cardinality estimate standing in for
table statistics on the graph side.

Lowering has two dialects, chosen by the same flag that drives the tree
cost model:

  with adjacency indexes   one-leg stars become expand_edge/get_vertex
                           (fused to expand when nobody reads the edge),
                           multi-leg stars become expand_intersect, and
                           hash merges become graph_hash_join;

  without indexes          every star leg is assembled from base-table
                           scans (edge scan keyed to its endpoint vertex
                           scans) and all composition is hash joins, so
                           the plan never touches an adjacency list.

Constraints filter each variable where it binds; repeated-element checks
from the distinct mode filter at the first operator where both variables
of a pair are bound.
"""

from __future__ import annotations

from ..agnostic import (
    JoinCond,
    Operand,
    Predicate,
    SPJQuery,
    TableStats,
    _multi_alias_filters,
    _PlanState,
    optimize_join_order,
)
from ..engine.plan import PlanNode
from ..errors import PlanError
from ..frontend.ast import Const
from ..frontend.validator import ResolvedColRef, ResolvedQuery
from ..mapping import GraphView
from ..pattern import Pattern, PatternEdge, repeated_element_pairs
from ..storage import Catalog
from .decompose import DTree, search_graph_plan, star_parts
from .rules import apply_filter_into_match, apply_trim_and_fuse
from .stats import PatternCatalog, estimate_cardinality

__all__ = ["lower_tree", "plan_converged", "GRAPH_REL"]

# placeholder relation name for the wrapped pattern in the outer join graph
GRAPH_REL = "@graph_table"


def _leg_dir(e: PatternEdge, leaf: str) -> tuple[str, str]:
    """(expansion direction, get_vertex mode) as seen from the bound leaf."""
    if not e.directed:
        return "either", "other"
    if e.src == leaf:
        return "out", "dst"
    return "in", "src"


class _Lowering:
    """Recursive tree-to-operators translation with filter placement."""

    def __init__(self, pattern: Pattern, view: GraphView, use_index: bool):
        self.p = pattern
        self.view = view
        self.use_index = use_index
        self.pending = repeated_element_pairs(pattern)
        self.done: set[tuple[str, str]] = set()

    # -- filter helpers -------------------------------------------------

    def with_constraints(self, node: PlanNode, var: str) -> PlanNode:
        preds = []
        for c in self.p.constraints_on(var):
            right = ({"var": c.var, "attr": c.rhs_attr}
                     if c.rhs_attr is not None else {"value": c.value})
            preds.append({"left": {"var": c.var, "attr": c.attr},
                          "op": c.op, "right": right})
        if preds:
            node = PlanNode("filter", {"preds": preds}, (node,))
        return node

    def emit_distinct(self, node: PlanNode, bound: set[str]) -> PlanNode:
        preds = []
        for a, b in self.pending:
            if (a, b) in self.done or a not in bound or b not in bound:
                continue
            self.done.add((a, b))
            preds.append({"left": {"var": a}, "op": "<>", "right": {"var": b}})
        if preds:
            node = PlanNode("filter", {"preds": preds}, (node,))
        return node

    # -- tree walk ------------------------------------------------------

    def lower(self, tree: DTree) -> tuple[PlanNode, set[str]]:
        if tree.kind == "vertex":
            return self.vertex_leaf(tree)
        if tree.kind == "join":
            if tree.right is not None and tree.right.is_star:
                return self.extension(tree)
            return self.merge(tree)
        raise PlanError(f"cannot lower tree node of kind {tree.kind!r}")

    def vertex_leaf(self, tree: DTree) -> tuple[PlanNode, set[str]]:
        (v, label), = tree.pattern.vertices
        node = PlanNode("scan_vertex", {"label": label, "var": v})
        bound = {v}
        node = self.with_constraints(node, v)
        for e in tree.pattern.edges:  # loops only, by construction
            node = self.bind_loop(node, bound, e, v)
        node.estimate = tree.est
        return node, bound

    def extension(self, tree: DTree) -> tuple[PlanNode, set[str]]:
        node, bound = self.lower(tree.left)
        star = tree.right.pattern
        center = next(x for x in star.vertex_vars if x not in tree.left.verts)
        legs, loops = star_parts(star, center)
        if self.use_index:
            node = self.extend_index(node, bound, legs, loops, center)
        else:
            node = self.extend_noindex(node, bound, legs, loops, center,
                                       tree.right.est)
        node.estimate = tree.est
        return node, bound

    def merge(self, tree: DTree) -> tuple[PlanNode, set[str]]:
        ln, lb = self.lower(tree.left)
        rn, rb = self.lower(tree.right)
        node = PlanNode("graph_hash_join",
                        {"on": sorted(lb & rb), "build": "right"}, (ln, rn))
        bound = lb | rb
        node = self.emit_distinct(node, bound)
        node.estimate = tree.est
        return node, bound

    # -- star lowering, adjacency-backed --------------------------------

    def extend_index(self, node: PlanNode, bound: set[str],
                     legs: tuple[PatternEdge, ...],
                     loops: tuple[PatternEdge, ...], center: str) -> PlanNode:
        if len(legs) == 1:
            e = legs[0]
            leaf = e.other(center)
            d, mode = _leg_dir(e, leaf)
            node = PlanNode("expand_edge", {"anchor": leaf, "elabel": e.label,
                                            "dir": d, "edge_var": e.var},
                            (node,))
            bound.add(e.var)
            node = self.with_constraints(node, e.var)
            gp = {"edge_var": e.var, "vertex_var": center, "mode": mode}
            if mode == "other":
                gp["anchor"] = leaf
            node = PlanNode("get_vertex", gp, (node,))
        else:
            specs = []
            for e in legs:
                leaf = e.other(center)
                d, _ = _leg_dir(e, leaf)
                specs.append({"anchor": leaf, "elabel": e.label, "dir": d,
                              "edge_var": e.var})
            node = PlanNode("expand_intersect",
                            {"target": center, "legs": specs}, (node,))
            bound.update(e.var for e in legs)
            for e in legs:
                node = self.with_constraints(node, e.var)
        bound.add(center)
        node = self.with_constraints(node, center)
        node = self.emit_distinct(node, bound)
        for e in loops:
            node = self.bind_loop(node, bound, e, center)
        return node

    def bind_loop(self, node: PlanNode, bound: set[str], e: PatternEdge,
                  v: str) -> PlanNode:
        """Attach a self-loop edge at an already-bound vertex."""
        if not self.use_index:
            comp, cb = self.loop_component(e, v)
            node = PlanNode("graph_hash_join",
                            {"on": sorted(bound & cb), "build": "right"},
                            (node, comp))
            bound.add(e.var)
            return self.emit_distinct(node, bound)
        d = "out" if e.directed else "either"
        mode = "dst" if e.directed else "other"
        node = PlanNode("expand_edge", {"anchor": v, "elabel": e.label,
                                        "dir": d, "edge_var": e.var}, (node,))
        bound.add(e.var)
        node = self.with_constraints(node, e.var)
        peer = f"__{e.var}_peer"
        gp = {"edge_var": e.var, "vertex_var": peer, "mode": mode}
        if mode == "other":
            gp["anchor"] = v
        node = PlanNode("get_vertex", gp, (node,))
        node = PlanNode("filter", {"preds": [
            {"left": {"var": peer}, "op": "=", "right": {"var": v}}]}, (node,))
        return self.emit_distinct(node, bound)

    # -- star lowering, scans only ---------------------------------------

    def extend_noindex(self, node: PlanNode, bound: set[str],
                       legs: tuple[PatternEdge, ...],
                       loops: tuple[PatternEdge, ...], center: str,
                       comp_est: float) -> PlanNode:
        comp, cbound = self.leg_component(legs[0], center)
        for e in loops:
            lc, lb = self.loop_component(e, center)
            comp = PlanNode("graph_hash_join",
                            {"on": sorted(cbound & lb), "build": "right"},
                            (comp, lc))
            cbound |= lb
        for e in legs[1:]:
            lc, lb = self.leg_component(e, center)
            comp = PlanNode("graph_hash_join",
                            {"on": sorted(cbound & lb), "build": "right"},
                            (comp, lc))
            cbound |= lb
        comp.estimate = comp_est
        node = PlanNode("graph_hash_join",
                        {"on": sorted(bound & cbound), "build": "right"},
                        (node, comp))
        bound |= cbound
        return self.emit_distinct(node, bound)

    def scan_edge(self, e: PatternEdge) -> PlanNode:
        node = PlanNode("scan", {"relation": e.label, "var": e.var})
        return self.with_constraints(node, e.var)

    def leg_component(self, e: PatternEdge, center: str
                      ) -> tuple[PlanNode, set[str]]:
        """One star leg as a standalone subplan: the edge rows keyed to both
        endpoint vertex scans. Undirected legs take both orientations that
        fit the endpoint labels."""
        leaf = e.other(center)
        decl = self.view.edge_info[e.label].decl

        def orient(sv: str, dv: str) -> PlanNode:
            n = self.scan_edge(e)
            for v, jk, vk in ((sv, decl.src_key, decl.src_ref_key),
                              (dv, decl.dst_key, decl.dst_ref_key)):
                vs = PlanNode("scan_vertex",
                              {"label": self.p.vertex_label(v), "var": v})
                if v == center:
                    vs = self.with_constraints(vs, center)
                n = PlanNode("hash_join", {
                    "left_keys": [{"var": e.var, "attr": jk}],
                    "right_keys": [{"var": v, "attr": vk}],
                    "build": "right"}, (n, vs))
            return n

        if e.directed:
            comp = orient(e.src, e.dst)
        else:
            branches = [
                orient(sv, dv)
                for sv, dv in ((leaf, center), (center, leaf))
                if (self.p.vertex_label(sv) == decl.src_table
                    and self.p.vertex_label(dv) == decl.dst_table)
            ]
            comp = (branches[0] if len(branches) == 1
                    else PlanNode("union", {}, tuple(branches)))
        return comp, {e.var, leaf, center}

    def loop_component(self, e: PatternEdge, v: str
                       ) -> tuple[PlanNode, set[str]]:
        """A self-loop as a standalone subplan: edge rows keyed to the vertex
        scan on one side, the other side closed with a key-equality filter."""
        decl = self.view.edge_info[e.label].decl
        label = self.p.vertex_label(v)

        def branch(side: str) -> PlanNode:
            if side == "src":
                jk, vk = decl.src_key, decl.src_ref_key
                fk, fvk = decl.dst_key, decl.dst_ref_key
            else:
                jk, vk = decl.dst_key, decl.dst_ref_key
                fk, fvk = decl.src_key, decl.src_ref_key
            n = PlanNode("hash_join", {
                "left_keys": [{"var": e.var, "attr": jk}],
                "right_keys": [{"var": v, "attr": vk}],
                "build": "right",
            }, (self.scan_edge(e),
                PlanNode("scan_vertex", {"label": label, "var": v})))
            return PlanNode("filter", {"preds": [
                {"left": {"var": e.var, "attr": fk}, "op": "=",
                 "right": {"var": v, "attr": fvk}}]}, (n,))

        if e.directed:
            return branch("src"), {e.var, v}
        # undirected: both orientations coincide, and a loop matches twice
        return (PlanNode("union", {}, (branch("src"), branch("dst"))),
                {e.var, v})


def lower_tree(tree: DTree, pattern: Pattern, view: GraphView,
               use_index: bool = True) -> PlanNode:
    """Translate a decomposition tree into executable operators binding
    every pattern variable, with constraint and repeated-element filters
    placed where their variables first bind."""
    ctx = _Lowering(pattern, view, use_index)
    node, bound = ctx.lower(tree)
    missing = (set(pattern.vertex_vars) | set(pattern.edge_vars)) - bound
    if missing:
        raise PlanError(f"lowering left variables unbound: {sorted(missing)}")
    return node


# -- whole-query planning --------------------------------------------------------


class _HybridStats(TableStats):
    """Base-table statistics with a synthetic entry for the graph table.

    The pattern estimate stands in for both cardinality and per-column
    distinct counts; residual predicates over graph output columns get a
    flat coin-flip selectivity since nothing measurable backs them."""

    def __init__(self, catalog: Catalog, graph_est: float):
        super().__init__(catalog)
        self.graph_est = graph_est

    def cardinality(self, relation: str) -> int:
        if relation == GRAPH_REL:
            return max(1, int(round(self.graph_est)))
        return super().cardinality(relation)

    def ndv(self, relation: str, column: str) -> int:
        if relation == GRAPH_REL:
            return max(1, int(round(self.graph_est)))
        return super().ndv(relation, column)

    def selectivity(self, relation: str, pred: Predicate) -> float:
        if relation == GRAPH_REL:
            return 0.5
        return super().selectivity(relation, pred)


def _operand(ref: ResolvedColRef, galias: str) -> Operand:
    if ref.source == "graph":
        return Operand.col(galias, ref.column)
    return Operand.col(ref.alias, ref.column)


def plan_converged(rq: ResolvedQuery, catalog: Catalog, view: GraphView,
                   pcat: PatternCatalog, graph_index: bool = True) -> PlanNode:
    """Plan the hybrid query with the pattern-aware pipeline."""
    rq = apply_filter_into_match(rq)
    pattern = rq.pattern

    tree = search_graph_plan(pattern, pcat, index_available=graph_index,
                             view=view)
    subplan = lower_tree(tree, pattern, view, use_index=graph_index)
    est = estimate_cardinality(pcat, pattern, view)

    # graph table output columns the rest of the query actually reads
    needed: set[str] = set()
    for ref, _ in rq.select:
        if ref.source == "graph":
            needed.add(ref.column)
    for p in rq.preds:
        for ref in (p.left, p.right):
            if isinstance(ref, ResolvedColRef) and ref.source == "graph":
                needed.add(ref.column)

    gt = PlanNode("scan_graph_table", {
        "graph": rq.graph_name,
        "alias": rq.graph_alias,
        "cols": [{"var": c.var, "attr": c.attr, "out": c.alias}
                 for c in rq.columns],
    }, (subplan,), estimate=est)
    gt = apply_trim_and_fuse(gt, needed)

    # outer select-project-join over the graph table and the base tables
    galias = rq.graph_alias
    filters: list[Predicate] = []
    join_conds: list[JoinCond] = []
    for p in rq.preds:
        left = _operand(p.left, galias)
        if isinstance(p.right, Const):
            filters.append(Predicate(left, p.op, Operand.lit(p.right.value)))
            continue
        right = _operand(p.right, galias)
        if p.op == "=" and left.alias != right.alias:
            join_conds.append(JoinCond((left.alias, left.column),
                                       (right.alias, right.column)))
        else:
            filters.append(Predicate(left, p.op, right))

    projection = []
    for ref, out in rq.select:
        o = _operand(ref, galias)
        projection.append({"var": o.alias, "attr": o.column, "out": out})

    spj = SPJQuery(
        tables=[(galias, GRAPH_REL)] + list(rq.tables),
        join_conds=join_conds,
        filters=filters,
        distinct_pairs=[],  # repeated-element checks live inside the subplan
        projection=projection,
    )
    stats = _HybridStats(catalog, est)

    node = gt
    leaf_est = est
    mine = [f for f in filters if f.aliases() == {galias}]
    if mine:
        node = PlanNode("filter", {"preds": [f.spec() for f in mine]}, (node,))
        leaf_est *= 0.5 ** len(mine)
    node.estimate = leaf_est
    leaves = {frozenset([galias]): _PlanState(leaf_est, 0.0, node, (galias,))}

    top = optimize_join_order(spj, stats, leaves=leaves)
    post = [f.spec() for f in _multi_alias_filters(spj)]
    if post:
        top = PlanNode("filter", {"preds": post}, (top,))
    return PlanNode("project", {"cols": projection}, (top,))
