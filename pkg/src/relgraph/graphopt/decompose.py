"""Cost-based decomposition-tree search for graph patterns.

A decomposition tree bottoms out in single-vertex leaves and grows the
pattern one node at a time. Internal nodes combine a left subtree with a
right child that is either

  * a complete star leaf: one fresh center vertex plus every pattern edge
    between it and the vertices the sibling already bound (self-loops at
    the center ride along), or
  * another decomposed subtree, merged on shared vertices with a hash
    join; legal only when the two vertex sets cover every edge and their
    overlap is edge-free (otherwise an edge would bind twice).

Every tree node's vertex set induces a sub-pattern of the query pattern,
so cycle-closing edges can never dangle: an edge is matched at the unique
node where its endpoints first live together. Hash splits are enumerated
as (connected A containing the anchor vertex, B = complement plus A's
boundary), in both left/right orders.

Costs, searched by dynamic programming over connected induced vertex
subsets:

  * vertex leaf: its estimated (constraint-filtered) scan size;
  * star extension with one leg, with adjacency indexes: |left| times the
    per-(label, edge label, direction) average degree;
  * star extension with several legs, with indexes: |left| times the
    average intersection size, i.e. the stored or estimated extension
    rate from the left pattern to the combined one;
  * any join without indexes, and hash merges always: the product of the
    two input cardinality estimates. Without indexes a multi-leg star
    also pays for its own leg-by-leg assembly, since that shape-dependent
    work is not shared across candidate trees.

Ties break deterministically: smaller right-child vertex count, then the
right then left canonical keys, then sorted vertex names.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterator, Optional

from ..errors import PlanError
from ..mapping import GraphView
from ..pattern import Pattern, PatternEdge
from .canon import canonical_key
from .stats import PatternCatalog, estimate_cardinality


@dataclass
class DTree:
    kind: str                      # "vertex" | "star" | "join"
    pattern: Pattern               # sub-pattern this node matches
    verts: frozenset
    est: float
    cost: float
    left: Optional["DTree"] = None
    right: Optional["DTree"] = None

    @property
    def is_star(self) -> bool:
        return self.kind == "star"

    def walk(self) -> Iterator["DTree"]:
        yield self
        for child in (self.left, self.right):
            if child is not None:
                yield from child.walk()

    def describe(self, depth: int = 0) -> str:
        pad = "  " * depth
        head = (f"{pad}{self.kind} {self.pattern.describe()} "
                f"~{self.est:.3g} cost={self.cost:.6g}")
        lines = [head]
        for child in (self.left, self.right):
            if child is not None:
                lines.append(child.describe(depth + 1))
        return "\n".join(lines)


def tree_cost(tree: DTree) -> float:
    return tree.cost


# -- shared shape helpers -----------------------------------------------------


def star_parts(sub: Pattern, center: str
               ) -> tuple[tuple[PatternEdge, ...], tuple[PatternEdge, ...]]:
    """(legs, loops) of the complete star rooted at center inside sub."""
    legs = tuple(e for e in sub.edges if e.touches(center) and not e.is_loop())
    loops = tuple(e for e in sub.edges if e.is_loop() and e.src == center)
    return legs, loops


def star_pattern(full: Pattern, sub: Pattern, center: str) -> Pattern:
    """The star leaf as a standalone pattern: center, adjacent leaves, the
    connecting legs and loops, and the constraints on the center and on
    the star's own edges (leaf constraints stay with the sibling)."""
    legs, loops = star_parts(sub, center)
    leaf_vars = sorted({e.other(center) for e in legs})
    labels = dict(full.vertices)
    verts = tuple((v, labels[v]) for v in [center] + leaf_vars)
    edge_vars = {e.var for e in legs + loops}
    cons = tuple(c for c in full.constraints
                 if c.var == center or c.var in edge_vars)
    return Pattern(verts, legs + loops, cons)


def _connected_subsets(p: Pattern) -> list[frozenset]:
    verts = p.vertex_vars
    out = []
    for size in range(1, len(verts) + 1):
        for combo in combinations(verts, size):
            if p.is_connected(combo):
                out.append(frozenset(combo))
    return out


def _boundary(p: Pattern, inside: frozenset, outside: frozenset) -> frozenset:
    return frozenset(
        v for v in inside
        if any(e.other(v) in outside for e in p.edges_at(v) if not e.is_loop())
    )


def _hash_splits(p: Pattern, s: frozenset) -> list[tuple[frozenset, frozenset]]:
    """Legal (A, B) vertex-set pairs for merging two subtrees into s."""
    verts = sorted(s)
    anchor = verts[0]
    rest = [v for v in verts if v != anchor]
    splits = []
    for size in range(0, len(rest)):
        for combo in combinations(rest, size):
            a = frozenset((anchor,) + combo)
            if not p.is_connected(a):
                continue
            comp = s - a
            b = comp | _boundary(p, a, comp)
            if b == s or not p.is_connected(b):
                continue
            shared = a & b
            if not shared:
                continue
            # the overlap must be edge-free or an edge would bind twice
            if any(e.src in shared and e.dst in shared for e in p.edges):
                continue
            splits.append((a, b))
    return splits


# -- cost model ---------------------------------------------------------------


class _Search:
    def __init__(self, pattern: Pattern, catalog: PatternCatalog,
                 index_available: bool, view: Optional[GraphView]):
        self.p = pattern
        self.cat = catalog
        self.index = index_available
        self.view = view if view is not None else catalog.view
        if self.view is None:
            raise PlanError("decomposition search needs a graph view")
        self.labels = dict(pattern.vertices)
        self._est_memo: dict = {}
        self._sub_est: dict[frozenset, float] = {}

    def est(self, s: frozenset) -> float:
        hit = self._sub_est.get(s)
        if hit is None:
            hit = estimate_cardinality(self.cat, self.p.induced(s),
                                       self.view, self._est_memo)
            self._sub_est[s] = hit
        return hit

    def est_pattern(self, q: Pattern) -> float:
        return estimate_cardinality(self.cat, q, self.view, self._est_memo)

    def vertex_leaf(self, v: str) -> DTree:
        sub = self.p.induced({v})
        est = self.est(frozenset({v}))
        return DTree("vertex", sub, frozenset({v}), est, est)

    def star_leaf(self, s: frozenset, center: str) -> DTree:
        sub = self.p.induced(s)
        star = star_pattern(self.p, sub, center)
        est = self.est_pattern(star)
        cost = 0.0
        if not self.index:
            # leg-by-leg assembly of the star materialization; per-edge
            # endpoint binding is shape-independent and omitted everywhere
            legs, loops = star_parts(sub, center)
            for i in range(1, len(legs)):
                partial = star_pattern(
                    self.p,
                    Pattern(sub.vertices, legs[:i] + loops, sub.constraints),
                    center)
                leg_alone = star_pattern(
                    self.p, Pattern(sub.vertices, legs[i:i + 1], sub.constraints),
                    center)
                cost += self.est_pattern(partial) * self.est_pattern(leg_alone)
        return DTree("star", star, frozenset(star.vertex_vars), est, cost)

    def extend_candidate(self, s: frozenset, c: str, left: DTree
                         ) -> Optional[DTree]:
        star = self.star_leaf(s, c)
        legs, loops = star_parts(self.p.induced(s), c)
        if not legs:
            return None
        est_s = self.est(s)
        if self.index:
            if len(legs) == 1:
                e = legs[0]
                leaf = e.other(c)
                if not e.directed:
                    d = "either"
                else:
                    d = "out" if e.src == leaf else "in"
                join = left.est * self.cat.avg_degree(
                    self.labels[leaf], e.label, d)
            else:
                # average intersection size: stored extension rate when the
                # catalog has both shapes, otherwise the estimate ratio
                rate = self.cat.rate(self.p.induced(s).without_constraints(),
                                     left.pattern.without_constraints())
                if rate is None:
                    rate = est_s / left.est if left.est > 0 else 0.0
                join = left.est * rate
            for e in loops:
                join += left.est * self.cat.avg_degree(
                    self.labels[c], e.label, "out" if e.directed else "either")
        else:
            join = left.est * star.est
        return DTree("join", self.p.induced(s), s, est_s,
                     left.cost + star.cost + join, left, star)

    def hash_candidate(self, s: frozenset, left: DTree, right: DTree) -> DTree:
        join = left.est * right.est
        return DTree("join", self.p.induced(s), s, self.est(s),
                     left.cost + right.cost + join, left, right)


def _rank(t: DTree) -> tuple:
    right = t.right
    if right is None:
        return (t.cost, 0, "", "", (), ())
    return (
        t.cost,
        right.pattern.n_vertices,
        canonical_key(right.pattern),
        canonical_key(t.left.pattern),
        tuple(sorted(right.verts)),
        tuple(sorted(t.left.verts)),
    )


def search_graph_plan(pattern: Pattern, catalog: PatternCatalog,
                      index_available: bool = True,
                      view: Optional[GraphView] = None) -> DTree:
    """Dynamic program over connected induced sub-patterns; returns the
    cheapest legal decomposition tree under the active cost model."""
    ctx = _Search(pattern, catalog, index_available, view)
    best: dict[frozenset, DTree] = {}
    for s in sorted(_connected_subsets(pattern), key=lambda x: (len(x), sorted(x))):
        if len(s) == 1:
            best[s] = ctx.vertex_leaf(next(iter(s)))
            continue
        cands: list[DTree] = []
        for c in sorted(s):
            rest = s - {c}
            sub = best.get(rest)
            if sub is None:
                continue
            cand = ctx.extend_candidate(s, c, sub)
            if cand is not None:
                cands.append(cand)
        for a, b in _hash_splits(pattern, s):
            ta, tb = best.get(a), best.get(b)
            if ta is None or tb is None:
                continue
            cands.append(ctx.hash_candidate(s, ta, tb))
            cands.append(ctx.hash_candidate(s, tb, ta))
        if not cands:
            raise PlanError(
                f"no legal decomposition for {sorted(s)}; pattern "
                f"{pattern.describe()!r}")
        best[s] = min(cands, key=_rank)
    return best[frozenset(pattern.vertex_vars)]


def enumerate_trees(pattern: Pattern, catalog: PatternCatalog,
                    index_available: bool = True,
                    view: Optional[GraphView] = None) -> list[DTree]:
    """Every legal decomposition tree with its cost under the same model
    the DP uses. Exponential; meant for small patterns in tests."""
    ctx = _Search(pattern, catalog, index_available, view)
    trees: dict[frozenset, list[DTree]] = {}
    for s in sorted(_connected_subsets(pattern), key=lambda x: (len(x), sorted(x))):
        if len(s) == 1:
            trees[s] = [ctx.vertex_leaf(next(iter(s)))]
            continue
        out: list[DTree] = []
        for c in sorted(s):
            rest = s - {c}
            for sub in trees.get(rest, ()):
                cand = ctx.extend_candidate(s, c, sub)
                if cand is not None:
                    out.append(cand)
        for a, b in _hash_splits(pattern, s):
            for ta in trees.get(a, ()):
                for tb in trees.get(b, ()):
                    out.append(ctx.hash_candidate(s, ta, tb))
                    out.append(ctx.hash_candidate(s, tb, ta))
        trees[s] = out
    return trees[frozenset(pattern.vertex_vars)]


# -- structural validation ----------------------------------------------------


def _same_shape(a: Pattern, b: Pattern) -> bool:
    return (sorted(a.vertices) == sorted(b.vertices)
            and sorted((e.var, e.label, e.src, e.dst, e.directed) for e in a.edges)
            == sorted((e.var, e.label, e.src, e.dst, e.directed) for e in b.edges))


def validate_tree(tree: DTree, pattern: Pattern) -> None:
    """Machine check of the structural invariants; raises PlanError."""
    if tree.verts != frozenset(pattern.vertex_vars):
        raise PlanError("tree does not cover the full pattern")

    def check(node: DTree) -> frozenset:
        if node.kind == "vertex":
            if len(node.verts) != 1:
                raise PlanError("vertex leaf with more than one vertex")
            if not _same_shape(node.pattern, pattern.induced(node.verts)):
                raise PlanError("vertex leaf is not the induced sub-pattern")
            return node.verts
        if node.kind == "star":
            raise PlanError("star leaf outside a right-child position")
        if node.kind != "join":
            raise PlanError(f"unknown node kind {node.kind!r}")
        lv = check(node.left)
        if node.right.kind == "star":
            star = node.right
            centers = [v for v in star.pattern.vertex_vars if v not in lv]
            if len(centers) != 1:
                raise PlanError("star must add exactly one new vertex")
            center = centers[0]
            expect = star_pattern(pattern, pattern.induced(node.verts), center)
            if not _same_shape(star.pattern, expect):
                raise PlanError("star leaf is not complete")
            leaves = {e.other(center) for e in star.pattern.edges
                      if not e.is_loop()}
            if not leaves <= lv:
                raise PlanError("star leaves must lie in the sibling")
            if lv | {center} != node.verts:
                raise PlanError("extension vertex bookkeeping is wrong")
        else:
            rv = check(node.right)
            if lv | rv != node.verts:
                raise PlanError("hash merge does not cover the node")
            shared = lv & rv
            if not shared:
                raise PlanError("hash merge without shared vertices")
            if any(e.src in shared and e.dst in shared for e in pattern.edges):
                raise PlanError("hash merge overlap contains an edge")
            only_l, only_r = lv - rv, rv - lv
            for e in pattern.edges:
                if ((e.src in only_l and e.dst in only_r)
                        or (e.src in only_r and e.dst in only_l)):
                    raise PlanError("hash merge leaves an edge uncovered")
        if not _same_shape(node.pattern, pattern.induced(node.verts)):
            raise PlanError("internal node is not an induced sub-pattern")
        if not pattern.is_connected(node.verts):
            raise PlanError("internal node is disconnected")
        return node.verts

    check(tree)
