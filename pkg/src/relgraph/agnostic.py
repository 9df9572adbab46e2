"""Graph-agnostic baseline planner.

The match clause is rewritten into a plain select-project-join query over
the vertex and edge relations (one aliased copy per pattern element), the
relational component is merged in, and a conventional join-order optimizer
picks the plan. The planner never consults graph structure; the optional
graph-index execution flag only lets the executor service edge-to-vertex
key joins with endpoint lookups.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import CrossProductRequiredError, PlanError
from .engine.plan import PlanNode
from .frontend.ast import Const
from .frontend.validator import ResolvedColRef, ResolvedQuery
from .mapping import GraphView
from .pattern import Pattern, repeated_element_pairs
from .storage import Catalog

DP_TABLE_LIMIT = 12


@dataclass(frozen=True)
class Operand:
    """One side of a predicate: an aliased column or a literal."""
    alias: str | None
    column: str | None
    value: object = None

    @staticmethod
    def col(alias: str, column: str) -> "Operand":
        return Operand(alias, column)

    @staticmethod
    def lit(value) -> "Operand":
        return Operand(None, None, value)

    @property
    def is_column(self) -> bool:
        return self.alias is not None

    def spec(self) -> dict:
        if self.is_column:
            return {"var": self.alias, "attr": self.column}
        return {"value": self.value}


@dataclass(frozen=True)
class Predicate:
    left: Operand
    op: str
    right: Operand

    def aliases(self) -> set[str]:
        out = set()
        for o in (self.left, self.right):
            if o.is_column:
                out.add(o.alias)
        return out

    def spec(self) -> dict:
        return {"left": self.left.spec(), "op": self.op, "right": self.right.spec()}


@dataclass(frozen=True)
class JoinCond:
    left: tuple[str, str]   # (alias, column)
    right: tuple[str, str]

    def aliases(self) -> tuple[str, str]:
        return self.left[0], self.right[0]


@dataclass
class SPJQuery:
    tables: list[tuple[str, str]]            # (alias, relation)
    join_conds: list[JoinCond]
    filters: list[Predicate]
    distinct_pairs: list[tuple[str, str]]    # rid must differ
    projection: list[dict]                   # project col specs

    def relation_of(self, alias: str) -> str:
        for a, r in self.tables:
            if a == alias:
                return r
        raise KeyError(alias)


# -- transform ---------------------------------------------------------------


def _edge_endpoint_conds(view: GraphView, pattern: Pattern, orientation: dict) -> list[JoinCond]:
    """EVJoin equalities for one orientation assignment of undirected edges."""
    conds = []
    for e in pattern.edges:
        decl = view.edge_info[e.label].decl
        src, dst = e.src, e.dst
        if not e.directed and orientation.get(e.var, False):
            src, dst = dst, src
        conds.append(JoinCond((e.var, decl.src_key), (src, decl.src_ref_key)))
        conds.append(JoinCond((e.var, decl.dst_key), (dst, decl.dst_ref_key)))
    return conds


def _usage_vars(rq: ResolvedQuery) -> set[str]:
    """Pattern variables whose identity or attributes the rest of the query
    needs: referenced output columns, predicates, constraints, distinctness."""
    used: set[str] = set()
    col_by_alias = {c.alias: c for c in rq.columns}

    def touch_ref(ref: ResolvedColRef):
        if ref.source == "graph":
            used.add(col_by_alias[ref.column].var)

    for ref, _ in rq.select:
        touch_ref(ref)
    for p in rq.preds:
        touch_ref(p.left)
        if isinstance(p.right, ResolvedColRef):
            touch_ref(p.right)
    for c in rq.pattern.constraints:
        used.add(c.var)
    if rq.pattern.distinct != "none":
        used.update(rq.pattern.vertex_vars)
        used.update(rq.pattern.edge_vars)
    # the grammar ties every projected COLUMNS entry to the graph table, but
    # only entries actually referenced upstream count as usage; unreferenced
    # ones are trimmed from the flattened projection entirely
    return used


def _eliminate_redundant(tables: list[tuple[str, str]], conds: list[JoinCond],
                         pattern: Pattern, used: set[str]) -> tuple[list, list]:
    """Drop vertex aliases nothing touches. Key totality/uniqueness make the
    vertex join a 1:1 lookup, so removing it and chaining the edge-side key
    columns into one equality class is lossless."""
    droppable = [v for v in pattern.vertex_vars if v not in used]
    for v in droppable:
        incident = []  # (edge alias, edge key column) pinned to v
        keep: list[JoinCond] = []
        for c in conds:
            la, lc = c.left
            ra, rc = c.right
            if ra == v:
                incident.append((la, lc))
            elif la == v:
                incident.append((ra, rc))
            else:
                keep.append(c)
        for (a1, c1), (a2, c2) in zip(incident, incident[1:]):
            keep.append(JoinCond((a1, c1), (a2, c2)))
        conds = keep
        tables = [(a, r) for a, r in tables if a != v]
    # same-alias equalities degrade to filters; keep them out of the join graph
    return tables, conds


def transform_to_spj(rq: ResolvedQuery, catalog: Catalog,
                     view: GraphView) -> list[SPJQuery]:
    """One SPJQuery per orientation assignment of the undirected pattern
    edges; executing all variants and concatenating is the full match."""
    pattern = rq.pattern
    col_by_alias = {c.alias: c for c in rq.columns}

    def map_ref(ref: ResolvedColRef) -> tuple[str, str]:
        if ref.source == "graph":
            oc = col_by_alias[ref.column]
            return oc.var, oc.attr
        return ref.alias, ref.column

    base_tables = [(a, r) for a, r in rq.tables]
    pattern_tables = [(v, pattern.vertex_label(v)) for v in pattern.vertex_vars]
    pattern_tables += [(e.var, e.label) for e in pattern.edges]

    filters: list[Predicate] = []
    cross_conds: list[JoinCond] = []
    for p in rq.preds:
        la, lc = map_ref(p.left)
        if isinstance(p.right, Const):
            filters.append(Predicate(Operand.col(la, lc), p.op,
                                     Operand.lit(p.right.value)))
            continue
        ra, rc = map_ref(p.right)
        if p.op == "=" and la != ra:
            cross_conds.append(JoinCond((la, lc), (ra, rc)))
        else:
            filters.append(Predicate(Operand.col(la, lc), p.op,
                                     Operand.col(ra, rc)))
    for c in pattern.constraints:
        rhs = (Operand.col(c.var, c.rhs_attr) if c.rhs_attr is not None
               else Operand.lit(c.value))
        filters.append(Predicate(Operand.col(c.var, c.attr), c.op, rhs))

    used = _usage_vars(rq)

    projection: list[dict] = []
    for ref, out in rq.select:
        a, col = map_ref(ref)
        projection.append({"var": a, "attr": col, "out": out})

    distinct_pairs = repeated_element_pairs(pattern)

    def orientation_possible(orientation: dict) -> bool:
        # an undirected edge over label-asymmetric endpoints (say Node->Hub)
        # only matches in the orientation whose labels line up; the other
        # flip would equate columns that do not exist
        for e in pattern.edges:
            decl = view.edge_info[e.label].decl
            src, dst = e.src, e.dst
            if not e.directed and orientation.get(e.var, False):
                src, dst = dst, src
            if (pattern.vertex_label(src) != decl.src_table
                    or pattern.vertex_label(dst) != decl.dst_table):
                return False
        return True

    undirected = [e.var for e in pattern.edges if not e.directed]
    variants: list[SPJQuery] = []
    for bits in itertools.product((False, True), repeat=len(undirected)):
        orientation = dict(zip(undirected, bits))
        if not orientation_possible(orientation):
            continue
        conds = _edge_endpoint_conds(view, pattern, orientation) + list(cross_conds)
        tables, conds = _eliminate_redundant(
            list(pattern_tables), conds, pattern, used)
        # an equality that ended up relating an alias to itself is a filter
        join_conds, extra = [], []
        for c in conds:
            if c.left[0] == c.right[0]:
                extra.append(Predicate(Operand.col(*c.left), "=",
                                       Operand.col(*c.right)))
            else:
                join_conds.append(c)
        variants.append(SPJQuery(
            tables=tables + base_tables,
            join_conds=join_conds,
            filters=filters + extra,
            distinct_pairs=list(distinct_pairs),
            projection=projection,
        ))
    return variants


# -- statistics ---------------------------------------------------------------


class TableStats:
    """Cardinalities, filter selectivities and per-key distinct counts,
    measured exactly on the base relations (tiny data; deterministic)."""

    def __init__(self, catalog: Catalog):
        self.catalog = catalog
        self._ndv: dict[tuple[str, str], int] = {}

    def cardinality(self, relation: str) -> int:
        return self.catalog.get_relation(relation).n_rows

    def ndv(self, relation: str, column: str) -> int:
        key = (relation, column)
        if key not in self._ndv:
            col = self.catalog.get_relation(relation).column(column)
            self._ndv[key] = max(1, len(np.unique(col)) if len(col) else 1)
        return self._ndv[key]

    def selectivity(self, relation: str, pred: Predicate) -> float:
        """Fraction of rows satisfying a single-alias predicate, measured."""
        rel = self.catalog.get_relation(relation)
        if rel.n_rows == 0:
            return 1.0
        left = rel.column(pred.left.column)
        if pred.right.is_column:
            right = rel.column(pred.right.column)
        else:
            right = pred.right.value
        op = pred.op
        if op == "=":
            hits = left == right
        elif op == "<>":
            hits = left != right
        elif op == "<":
            hits = left < right
        elif op == "<=":
            hits = left <= right
        elif op == ">":
            hits = left > right
        else:
            hits = left >= right
        return float(np.count_nonzero(hits)) / rel.n_rows


# -- join ordering -------------------------------------------------------------


@dataclass
class _PlanState:
    est: float
    cost: float
    tree: PlanNode
    order: tuple[str, ...]  # deterministic tie-break key


def _leaf_plan(alias: str, relation: str, filters: list[Predicate],
               stats: TableStats) -> tuple[PlanNode, float]:
    node = PlanNode("scan", {"relation": relation, "var": alias})
    est = float(stats.cardinality(relation))
    mine = [f for f in filters if f.aliases() == {alias}]
    if mine:
        for f in mine:
            est *= stats.selectivity(relation, f)
        node = PlanNode("filter", {"preds": [f.spec() for f in mine]}, (node,))
    node.estimate = est
    return node, est


def _conds_between(conds: list[JoinCond], left: frozenset, right: frozenset):
    out = []
    for c in conds:
        a, b = c.aliases()
        if a in left and b in right:
            out.append((c.left, c.right))
        elif a in right and b in left:
            out.append((c.right, c.left))
    return out


def _join_est(left: _PlanState, right: _PlanState, keys, stats: TableStats,
              spj: SPJQuery) -> float:
    est = left.est * right.est
    best_ndv = 1.0
    for (la, lc), (ra, rc) in keys:
        ndv_l = min(stats.ndv(spj.relation_of(la), lc), max(left.est, 1.0))
        ndv_r = min(stats.ndv(spj.relation_of(ra), rc), max(right.est, 1.0))
        best_ndv = max(best_ndv, float(max(ndv_l, ndv_r)))
    return est / best_ndv


def _join_node(left: _PlanState, right: _PlanState, keys, est: float) -> PlanNode:
    build = "left" if left.est <= right.est else "right"
    node = PlanNode("hash_join", {
        "left_keys": [{"var": a, "attr": c} for (a, c), _ in keys],
        "right_keys": [{"var": a, "attr": c} for _, (a, c) in keys],
        "build": build,
    }, (left.tree, right.tree))
    node.estimate = est
    return node


def optimize_join_order(spj: SPJQuery, stats: TableStats,
                        leaves: dict[frozenset, _PlanState] | None = None
                        ) -> PlanNode:
    """Pick a cross-product-free join order. Callers may preseed `leaves`
    with ready-made single-alias subplans (e.g. a wrapped graph table);
    any alias without one gets the usual filtered scan."""
    aliases = [a for a, _ in spj.tables]
    if not aliases:
        raise PlanError("query with no tables")

    # connectivity check over the join graph
    parent = {a: a for a in aliases}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for c in spj.join_conds:
        a, b = c.aliases()
        parent[find(a)] = find(b)
    roots = {find(a) for a in aliases}
    if len(roots) > 1:
        raise CrossProductRequiredError(
            f"join graph splits into {len(roots)} components; "
            "cross products are not considered")

    leaves = dict(leaves) if leaves else {}
    for alias, relation in spj.tables:
        if frozenset([alias]) in leaves:
            continue
        node, est = _leaf_plan(alias, relation, spj.filters, stats)
        leaves[frozenset([alias])] = _PlanState(est, 0.0, node, (alias,))

    if len(aliases) == 1:
        return leaves[frozenset(aliases)].tree

    if len(aliases) <= DP_TABLE_LIMIT:
        return _dp_order(spj, stats, leaves, aliases)
    return _greedy_order(spj, stats, leaves, aliases)


def _dp_order(spj: SPJQuery, stats: TableStats,
              leaves: dict[frozenset, _PlanState], aliases: list[str]) -> PlanNode:
    order = sorted(aliases)
    idx = {a: i for i, a in enumerate(order)}
    n = len(order)
    adj = [0] * n
    for c in spj.join_conds:
        a, b = c.aliases()
        adj[idx[a]] |= 1 << idx[b]
        adj[idx[b]] |= 1 << idx[a]

    def connected(mask: int) -> bool:
        first = mask & (-mask)
        seen = first
        frontier = first
        while frontier:
            nxt = 0
            m = frontier
            while m:
                bit = m & (-m)
                m ^= bit
                nxt |= adj[bit.bit_length() - 1]
            frontier = nxt & mask & ~seen
            seen |= frontier
        return seen == mask

    def names(mask: int) -> frozenset:
        return frozenset(order[i] for i in range(n) if mask >> i & 1)

    best: dict[int, _PlanState] = {}
    for i, a in enumerate(order):
        best[1 << i] = leaves[frozenset([a])]

    full = (1 << n) - 1
    for size in range(2, n + 1):
        for mask in range(1, full + 1):
            if bin(mask).count("1") != size or not connected(mask):
                continue
            snames = names(mask)
            candidates: list[tuple[float, tuple, _PlanState]] = []
            sub = (mask - 1) & mask
            while sub:
                rest = mask ^ sub
                if rest and sub & (mask & -mask):  # canonical: left holds lowest bit
                    ls = best.get(sub)
                    rs = best.get(rest)
                    if ls is not None and rs is not None:
                        lnames, rnames = names(sub), names(rest)
                        keys = _conds_between(spj.join_conds, lnames, rnames)
                        if keys:
                            for l, r, k in ((ls, rs, keys),
                                            (rs, ls, [(b, a) for a, b in keys])):
                                est = _join_est(l, r, k, stats, spj)
                                cost = l.cost + r.cost + est
                                tie = (l.order, r.order)
                                candidates.append(
                                    (cost, tie,
                                     _PlanState(est, cost, _join_node(l, r, k, est),
                                                l.order + r.order)))
                sub = (sub - 1) & mask
            if candidates:
                candidates.sort(key=lambda t: (t[0], t[1]))
                best[mask] = candidates[0][2]
    state = best.get(full)
    if state is None:
        raise CrossProductRequiredError("no cross-product-free join order exists")
    return state.tree


def _greedy_order(spj: SPJQuery, stats: TableStats,
                  leaves: dict[frozenset, _PlanState], aliases: list[str]) -> PlanNode:
    parts: dict[frozenset, _PlanState] = dict(leaves)
    while len(parts) > 1:
        options = []
        for (s1, p1), (s2, p2) in itertools.combinations(sorted(
                parts.items(), key=lambda kv: sorted(kv[0])), 2):
            keys = _conds_between(spj.join_conds, s1, s2)
            if not keys:
                continue
            est = _join_est(p1, p2, keys, stats, spj)
            options.append((est, (p1.order, p2.order), s1, s2, keys, p1, p2))
        if not options:
            raise CrossProductRequiredError(
                "join graph disconnected; cross products are not considered")
        options.sort(key=lambda t: (t[0], t[1]))
        est, _, s1, s2, keys, p1, p2 = options[0]
        cost = p1.cost + p2.cost + est
        merged = _PlanState(est, cost, _join_node(p1, p2, keys, est),
                            p1.order + p2.order)
        del parts[s1], parts[s2]
        parts[s1 | s2] = merged
    return next(iter(parts.values())).tree


# -- full plan assembly --------------------------------------------------------


def _multi_alias_filters(spj: SPJQuery) -> list[Predicate]:
    return [f for f in spj.filters if len(f.aliases()) != 1]


def _attach_index_hints(plan: PlanNode, spj: SPJQuery, view: GraphView) -> None:
    """Mark EVJoin-shaped hash joins the executor may service via the
    endpoint index: single equality of an edge key column against the bare
    scan of the referenced vertex relation."""
    edge_decls = {e: view.edge_info[e].decl for e in view.edge_labels}

    def scan_alias(node: PlanNode):
        if node.kind == "scan":
            return node.params["var"], node.params["relation"]
        return None

    def visit(node: PlanNode):
        for c in node.children:
            visit(c)
        if node.kind != "hash_join" or len(node.params["left_keys"]) != 1:
            return
        lk = node.params["left_keys"][0]
        rk = node.params["right_keys"][0]
        if "attr" not in lk or "attr" not in rk:
            return
        for edge_side, ekey, vside, vkey in (("left", lk, node.children[1], rk),
                                             ("right", rk, node.children[0], lk)):
            edge_alias = ekey["var"]
            try:
                erel = spj.relation_of(edge_alias)
            except KeyError:
                continue
            decl = edge_decls.get(erel)
            if decl is None:
                continue
            vscan = scan_alias(vside)
            if vscan is None or vscan[0] != vkey["var"]:
                continue
            if ekey["attr"] == decl.src_key and vkey["attr"] == decl.src_ref_key \
                    and vscan[1] == decl.src_table:
                endpoint = "src"
            elif ekey["attr"] == decl.dst_key and vkey["attr"] == decl.dst_ref_key \
                    and vscan[1] == decl.dst_table:
                endpoint = "dst"
            else:
                continue
            node.params = dict(node.params)
            node.params["index_hint"] = {
                "graph": view.name, "elabel": erel, "endpoint": endpoint,
                "edge_var": edge_alias, "vertex_var": vkey["var"],
                "edge_side": edge_side,
            }
            return

    visit(plan)


def plan_agnostic(rq: ResolvedQuery, catalog: Catalog, view: GraphView,
                  graph_index: bool = False) -> PlanNode:
    variants = transform_to_spj(rq, catalog, view)
    stats = TableStats(catalog)
    roots = []
    for spj in variants:
        tree = optimize_join_order(spj, stats)
        preds = [f.spec() for f in _multi_alias_filters(spj)]
        preds += [{"left": {"var": a}, "op": "<>", "right": {"var": b}}
                  for a, b in spj.distinct_pairs]
        if preds:
            tree = PlanNode("filter", {"preds": preds}, (tree,))
        if graph_index:
            _attach_index_hints(tree, spj, view)
        roots.append(tree)
    top = roots[0] if len(roots) == 1 else PlanNode("union", {}, tuple(roots))
    return PlanNode("project", {"cols": variants[0].projection}, (top,))
