"""Pattern cardinality catalog.

Stores exact homomorphic match counts for every connected pattern of up
to k vertices (k in {2, 3}) over a graph view's label set, keyed by the
canonical structural encoding, plus extension rates on the lattice edges
between a pattern and its one-vertex-removed sub-patterns. Counting is
closed-form over the view's indexes (relation sizes, degree products,
per-edge sorted-run intersections), which agrees with the brute-force
matcher by construction and is asserted against it in tests.

Stored patterns have at most one pattern edge per vertex pair and no
self-loops; shapes outside that universe (parallel pattern edges, loops)
are estimated by the recursive extension rule instead. Estimates for
patterns beyond k vertices peel one removable vertex at a time: the
pattern count is the sub-pattern count times an extension factor, taken
from stored counts when the local star fits within k vertices and from
average-degree products otherwise. Per-element constraints multiply in a
measured selectivity (matching rows / relation size). The distinct mode
is ignored by estimation: it only ever shrinks the result.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import product
from typing import Optional

import numpy as np

from ..engine.kernels import expand_ranges, probe_runs
from ..mapping import GraphView
from ..pattern import Constraint, Pattern, PatternEdge, single_vertex
from .canon import canonical_key, canonical_order

CHUNK = 1 << 16


@dataclass
class PatternCatalog:
    k: int
    counts: dict[str, int] = field(default_factory=dict)
    rates: dict[tuple[str, str], float] = field(default_factory=dict)
    shapes: dict[str, str] = field(default_factory=dict)
    degrees: dict[tuple[str, str, str], float] = field(default_factory=dict)
    view: Optional[GraphView] = None
    _shape_cache: dict = field(default_factory=dict, repr=False, compare=False)

    def lookup(self, p: Pattern) -> Optional[int]:
        return self.counts.get(canonical_key(p))

    def rate(self, parent: Pattern, child: Pattern) -> Optional[float]:
        return self.rates.get((canonical_key(parent), canonical_key(child)))

    def avg_degree(self, vlabel: str, elabel: str, direction: str) -> float:
        return self.degrees.get((vlabel, elabel, direction), 0.0)

    # -- serialization ----------------------------------------------------

    def to_json(self) -> str:
        doc = {
            "k": self.k,
            "patterns": [
                {"key": key, "shape": self.shapes.get(key, ""), "count": cnt}
                for key, cnt in sorted(self.counts.items())
            ],
            "extensions": [
                {"parent": pk, "child": ck, "rate": r}
                for (pk, ck), r in sorted(self.rates.items())
            ],
            "degrees": [
                {"vertex": v, "edge": e, "direction": d, "value": val}
                for (v, e, d), val in sorted(self.degrees.items())
            ],
        }
        return json.dumps(doc, indent=2)

    @staticmethod
    def from_json(text: str) -> "PatternCatalog":
        doc = json.loads(text)
        cat = PatternCatalog(k=int(doc["k"]))
        for p in doc["patterns"]:
            cat.counts[p["key"]] = int(p["count"])
            cat.shapes[p["key"]] = p.get("shape", "")
        for e in doc["extensions"]:
            cat.rates[(e["parent"], e["child"])] = float(e["rate"])
        for d in doc.get("degrees", []):
            cat.degrees[(d["vertex"], d["edge"], d["direction"])] = float(d["value"])
        return cat


# -- descriptor plumbing ------------------------------------------------------


def _fits(view: GraphView, elabel: str, src_label: str, dst_label: str) -> bool:
    info = view.edge_info.get(elabel)
    return (info is not None and info.src_label == src_label
            and info.dst_label == dst_label)


def _edge_bindings(view: GraphView, e: PatternEdge, labels: dict[str, str]
                   ) -> tuple[np.ndarray, np.ndarray]:
    """All (src var rid, dst var rid) bindings of one non-loop pattern edge."""
    info = view.edge_info[e.label]
    ls, ld = labels[e.src], labels[e.dst]
    parts_a, parts_b = [], []
    if _fits(view, e.label, ls, ld):
        parts_a.append(info.src_rid)
        parts_b.append(info.dst_rid)
    if not e.directed and _fits(view, e.label, ld, ls):
        parts_a.append(info.dst_rid)
        parts_b.append(info.src_rid)
    if not parts_a:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    return np.concatenate(parts_a), np.concatenate(parts_b)


def _leg_csr(view: GraphView, anchor_label: str, e: PatternEdge, anchor: str):
    """CSR from the anchor endpoint toward the other one; sorted runs."""
    if not e.directed:
        return view.either_sorted(anchor_label, e.label)
    direction = "out" if e.src == anchor else "in"
    return view.adjacency(anchor_label, e.label, direction)


def _leg_degrees(view: GraphView, anchor_label: str, e: PatternEdge,
                 anchor: str) -> np.ndarray:
    csr = _leg_csr(view, anchor_label, e, anchor)
    return csr.offsets[1:] - csr.offsets[:-1]


def count_pattern(view: GraphView, p: Pattern) -> int:
    """Exact homomorphic count for a simple connected pattern of <=3
    vertices (one edge per pair, no loops); the catalog build path."""
    labels = dict(p.vertices)
    for v, lab in p.vertices:
        if lab not in view.vertex_labels:
            return 0
    for e in p.edges:
        if e.label not in view.edge_labels:
            return 0
    if p.n_edges == 0:
        assert p.n_vertices == 1
        return view.n_vertices(p.vertices[0][1])
    if p.n_vertices == 2 and p.n_edges == 1:
        a, _ = _edge_bindings(view, p.edges[0], labels)
        return len(a)
    if p.n_vertices == 3 and p.n_edges == 2:
        # wedge: ordered leaf bindings are independent given the center
        (e1, e2) = p.edges
        shared = set((e1.src, e1.dst)) & set((e2.src, e2.dst))
        center = next(iter(shared))
        d1 = _leg_degrees(view, labels[center], e1, center)
        d2 = _leg_degrees(view, labels[center], e2, center)
        return int(np.dot(d1, d2))
    if p.n_vertices == 3 and p.n_edges == 3:
        # triangle: bind the cheapest edge, intersect sorted runs of the
        # remaining two legs toward the apex
        best = None
        for base in p.edges:
            a, b = _edge_bindings(view, base, labels)
            if best is None or len(a) < len(best[1]):
                best = (base, a, b)
        base, ra, rb = best
        u, v = base.src, base.dst
        apex = next(x for x in p.vertex_vars if x not in (u, v))
        leg_u = next(e for e in p.edges if e.var != base.var and e.touches(u))
        leg_v = next(e for e in p.edges if e.var != base.var and e.touches(v))
        csr_u = _leg_csr(view, labels[u], leg_u, u)
        csr_v = _leg_csr(view, labels[v], leg_v, v)
        total = 0
        for lo in range(0, len(ra), CHUNK):
            ca, cb = ra[lo:lo + CHUNK], rb[lo:lo + CHUNK]
            rows, pos = expand_ranges(csr_u.offsets, ca)
            cand = csr_u.neighbors[pos]
            _, counts = probe_runs(csr_v.offsets, csr_v.neighbors,
                                   cb[rows], cand)
            total += int(counts.sum())
        return total
    raise ValueError(f"count_pattern: unsupported shape {p.describe()}")


# -- catalog build ------------------------------------------------------------


def _pair_descriptors(view: GraphView, la: str, lb: str) -> list[tuple]:
    """Candidate single-edge descriptors between labels (la, lb), as
    (kind, elabel, flip) where flip orients a directed edge lb -> la."""
    out = []
    for el in view.edge_labels:
        fwd = _fits(view, el, la, lb)
        rev = _fits(view, el, lb, la)
        if fwd:
            out.append(("d", el, False))
        if rev and la != lb:
            out.append(("d", el, True))
        if fwd or rev:
            out.append(("u", el, False))
    return out


def _mk_edge(var: str, desc: tuple, a: str, b: str) -> PatternEdge:
    kind, el, flip = desc
    if kind == "u":
        return PatternEdge(var, el, a, b, directed=False)
    return PatternEdge(var, el, b, a) if flip else PatternEdge(var, el, a, b)


def build_catalog(view: GraphView, k: int) -> PatternCatalog:
    """Enumerate, count, and store all connected simple patterns with up
    to k vertices that have at least one match."""
    if k not in (2, 3):
        raise ValueError(f"catalog depth k must be 2 or 3, got {k}")
    cat = PatternCatalog(k=k, view=view)
    for vlabel in view.vertex_labels:
        for elabel in view.edge_labels:
            for d in ("out", "in", "either"):
                cat.degrees[(vlabel, elabel, d)] = view.avg_degree(
                    vlabel, elabel, d)

    def store(p: Pattern) -> None:
        key = canonical_key(p)
        if key in cat.counts:
            return
        n = count_pattern(view, p)
        if n > 0:
            cat.counts[key] = n
            cat.shapes[key] = p.describe()

    for lab in view.vertex_labels:
        store(single_vertex("v0", lab))

    vlabels = sorted(view.vertex_labels)
    for la, lb in product(vlabels, repeat=2):
        for desc in _pair_descriptors(view, la, lb):
            p = Pattern((("v0", la), ("v1", lb)),
                        (_mk_edge("e0", desc, "v0", "v1"),))
            store(p)

    if k >= 3:
        pairs = (("v0", "v1"), ("v0", "v2"), ("v1", "v2"))
        for lab3 in product(vlabels, repeat=3):
            labels = dict(zip(("v0", "v1", "v2"), lab3))
            options = [
                [None] + _pair_descriptors(view, labels[a], labels[b])
                for a, b in pairs
            ]
            for combo in product(*options):
                edges = tuple(
                    _mk_edge(f"e{i}", desc, a, b)
                    for i, (desc, (a, b)) in enumerate(zip(combo, pairs))
                    if desc is not None
                )
                if len(edges) < 2:
                    continue
                p = Pattern(tuple(labels.items()), edges)
                if not p.is_connected():
                    continue
                store(p)

    # lattice edges: pattern -> its connected one-vertex-removed children
    for key, cnt in list(cat.counts.items()):
        p = _shape_pattern(cat, key)
        if p is None or p.n_vertices < 2:
            continue
        for v in p.vertex_vars:
            rest = [w for w in p.vertex_vars if w != v]
            child = p.induced(rest)
            if not child.is_connected(rest):
                continue
            ck = canonical_key(child)
            if ck in cat.counts:
                cat.rates[(key, ck)] = cnt / cat.counts[ck]
    return cat


def _shape_pattern(cat: PatternCatalog, key: str) -> Optional[Pattern]:
    """Rebuild a representative Pattern from the stored describe string."""
    if key in cat._shape_cache:
        return cat._shape_cache[key]
    text = cat.shapes.get(key)
    if not text:
        return None
    p = _parse_shape(text)
    cat._shape_cache[key] = p
    return p


def _parse_shape(text: str) -> Pattern:
    verts: list[tuple[str, str]] = []
    edges: list[PatternEdge] = []
    for part in text.split():
        if part.startswith("("):
            v, lab = part.strip("()").split(":")
            verts.append((v, lab))
        else:
            src, rest = part.split("-[", 1)
            mid, dst = rest.split("]", 1)
            var, lab = mid.split(":")
            directed = dst.startswith("->")
            dst = dst.lstrip(">-")
            edges.append(PatternEdge(var, lab, src, dst, directed))
    return Pattern(tuple(verts), tuple(edges))


# -- estimation ---------------------------------------------------------------


def _selectivity(view: GraphView, label: str, cons: tuple[Constraint, ...]) -> float:
    """Fraction of the backing relation's rows satisfying the conjunction."""
    rel = view.catalog.get_relation(label)
    n = rel.n_rows
    if n == 0:
        return 0.0
    mask = np.ones(n, dtype=bool)
    for c in cons:
        col = rel.column(c.attr)
        rhs = rel.column(c.rhs_attr) if c.rhs_attr is not None else c.value
        if c.op == "=":
            mask &= col == rhs
        elif c.op == "<>":
            mask &= col != rhs
        elif c.op == "<":
            mask &= col < rhs
        elif c.op == "<=":
            mask &= col <= rhs
        elif c.op == ">":
            mask &= col > rhs
        elif c.op == ">=":
            mask &= col >= rhs
        else:
            raise ValueError(f"bad op {c.op!r}")
    return float(mask.sum()) / n


def _is_simple(p: Pattern) -> bool:
    seen = set()
    for e in p.edges:
        if e.is_loop():
            return False
        pair = frozenset((e.src, e.dst))
        if pair in seen:
            return False
        seen.add(pair)
    return True


def _labels_known(view: GraphView, p: Pattern) -> bool:
    return (all(lab in view.vertex_labels for _, lab in p.vertices)
            and all(e.label in view.edge_labels for e in p.edges))


def _leg_factor(cat: PatternCatalog, leaf_label: str, e: PatternEdge,
                leaf: str) -> float:
    """Average number of extensions along one star leg from a bound leaf."""
    if e.is_loop():
        # loops are rare and outside the stored universe; an outgoing
        # average degree is the crudest usable stand-in
        return cat.avg_degree(leaf_label, e.label,
                              "out" if e.directed else "either")
    if not e.directed:
        d = "either"
    else:
        d = "out" if e.src == leaf else "in"
    return cat.avg_degree(leaf_label, e.label, d)


def _structure_estimate(cat: PatternCatalog, view: GraphView, p: Pattern,
                        memo: dict) -> float:
    key = canonical_key(p)
    hit = memo.get(key)
    if hit is not None:
        return hit
    memo[key] = out = _structure_estimate_inner(cat, view, p, memo)
    return out


def _structure_estimate_inner(cat: PatternCatalog, view: GraphView,
                              p: Pattern, memo: dict) -> float:
    if not _labels_known(view, p):
        return 0.0
    stored = cat.lookup(p)
    if stored is not None:
        return float(stored)
    if not p.is_connected():
        # disconnected patterns multiply across components
        total = 1.0
        remaining = set(p.vertex_vars)
        while remaining:
            start = min(remaining)
            comp = {start}
            stack = [start]
            while stack:
                v = stack.pop()
                for u in p.neighbors_of(v):
                    if u in remaining and u not in comp:
                        comp.add(u)
                        stack.append(u)
            total *= _structure_estimate(cat, view, p.induced(comp), memo)
            remaining -= comp
        return total
    if p.n_vertices <= cat.k and _is_simple(p):
        # the stored universe is complete here, so absence means zero
        return 0.0
    if p.n_vertices == 1:
        # single vertex with loops: vertices times per-loop factors
        base = float(view.n_vertices(p.vertices[0][1]))
        for e in p.edges:
            base *= _leg_factor(cat, p.vertices[0][1], e, p.vertices[0][0])
        return base

    # peel one removable vertex, chosen canonically so isomorphic patterns
    # estimate identically
    order = canonical_order(p)
    removable = [v for v in order
                 if p.is_connected(set(p.vertex_vars) - {v})]
    c = removable[-1]
    rest = [v for v in p.vertex_vars if v != c]
    child = p.induced(rest)
    child_est = _structure_estimate(cat, view, child, memo)
    legs = [e for e in p.edges_at(c) if not e.is_loop()]
    loops = [e for e in p.edges_at(c) if e.is_loop()]
    leaves = sorted({e.other(c) for e in legs})

    factor: Optional[float] = None
    local_parent = p.induced(set(leaves) | {c}).without_constraints()
    local_child = child.induced(leaves).without_constraints()
    if local_parent.n_vertices <= cat.k and _is_simple(local_parent):
        num = _structure_estimate(cat, view, local_parent, memo)
        den = _structure_estimate(cat, view, local_child, memo)
        if den > 0:
            factor = num / den
    if factor is None:
        labels = dict(p.vertices)
        factor = 1.0
        for e in legs:
            leaf = e.other(c)
            factor *= _leg_factor(cat, labels[leaf], e, leaf)
    for e in loops:
        factor *= _leg_factor(cat, dict(p.vertices)[c], e, c)
    return child_est * factor


def estimate_cardinality(cat: PatternCatalog, p: Pattern,
                         view: Optional[GraphView] = None,
                         memo: Optional[dict] = None) -> float:
    """Estimated match count of p: structural estimate times measured
    per-element constraint selectivities. Exact whenever the bare shape
    is in the catalog and p carries no constraints."""
    view = view if view is not None else cat.view
    if view is None:
        raise ValueError("estimate_cardinality needs a graph view")
    if p.n_vertices == 0:
        return 0.0
    bare = p.without_constraints()
    est = _structure_estimate(cat, view, bare, memo if memo is not None else {})
    if est == 0.0:
        return 0.0
    labels = dict(p.vertices)
    for e in p.edges:
        labels[e.var] = e.label
    by_var: dict[str, list[Constraint]] = {}
    for c in p.constraints:
        by_var.setdefault(c.var, []).append(c)
    for var, cons in sorted(by_var.items()):
        est *= _selectivity(view, labels[var], tuple(cons))
    return est
