"""Canonical keys for labeled patterns.

Two patterns get the same key exactly when they are isomorphic: same
vertex labels, same edges with matching labels and direction (undirected
matches undirected, regardless of how the endpoints were written down).
Constraints and the distinct mode are deliberately ignored; the key names
the bare structure that cardinality statistics are stored under.

The key is computed by iterative partition refinement on vertex colors,
then backtracking over the remaining symmetric cells, keeping the
lexicographically smallest encoding. Query patterns are small (a handful
of vertices), so the backtracking worst case never bites in practice; a
brute-force isomorphism check is provided for cross-validation in tests.
"""

from __future__ import annotations

from itertools import permutations

from ..pattern import Pattern, PatternEdge


def _incidence(p: Pattern, v: str) -> tuple:
    """Multiset of edge descriptors at v, loop-aware, as a sorted tuple."""
    descs = []
    for e in p.edges:
        if e.is_loop():
            if e.src == v:
                descs.append(("loop", e.label, "d" if e.directed else "u"))
        elif not e.directed:
            if e.touches(v):
                descs.append(("u", e.label))
        elif e.src == v:
            descs.append(("out", e.label))
        elif e.dst == v:
            descs.append(("in", e.label))
    return tuple(sorted(descs))


def _edge_desc(e: PatternEdge, v: str) -> tuple:
    """Descriptor of e as seen from endpoint v (loops excluded upstream)."""
    if not e.directed:
        return ("u", e.label)
    return ("out", e.label) if e.src == v else ("in", e.label)


def _refine(p: Pattern, colors: dict[str, int]) -> dict[str, int]:
    """Stable color refinement: repeatedly split classes by the multiset of
    (edge descriptor, neighbor color) signatures until nothing moves."""
    vs = p.vertex_vars
    while True:
        sigs: dict[str, tuple] = {}
        for v in vs:
            nbr = []
            for e in p.edges:
                if e.is_loop() or not e.touches(v):
                    continue
                w = e.other(v)
                nbr.append((_edge_desc(e, v), colors[w]))
            sigs[v] = (colors[v], tuple(sorted(nbr)))
        ranked = {s: i for i, s in enumerate(sorted(set(sigs.values())))}
        new = {v: ranked[sigs[v]] for v in vs}
        if new == colors:
            return colors
        colors = new


def _encode(p: Pattern, order: tuple[str, ...]) -> str:
    idx = {v: i for i, v in enumerate(order)}
    vparts = ",".join(p.vertex_label(v) for v in order)
    eparts = []
    for e in p.edges:
        a, b = idx[e.src], idx[e.dst]
        if e.directed:
            eparts.append(f"{a}>{b}:{e.label}")
        else:
            lo, hi = min(a, b), max(a, b)
            eparts.append(f"{lo}-{hi}:{e.label}")
    return f"V[{vparts}]E[{','.join(sorted(eparts))}]"


def _search(p: Pattern, colors: dict[str, int], best: list):
    """Backtrack over color cells, individualizing one vertex at a time."""
    cells: dict[int, list[str]] = {}
    for v in p.vertex_vars:
        cells.setdefault(colors[v], []).append(v)
    split = next(
        (cells[c] for c in sorted(cells) if len(cells[c]) > 1), None
    )
    if split is None:
        order = tuple(sorted(p.vertex_vars, key=lambda v: colors[v]))
        enc = _encode(p, order)
        if best[0] is None or enc < best[0]:
            best[0], best[1] = enc, order
        return
    for v in sorted(split):
        forked = dict(colors)
        # push v in front of its old cell; gaps keep ranks well ordered
        forked[v] = forked[v] * 2 - 1
        for w in p.vertex_vars:
            if w != v:
                forked[w] = forked[w] * 2
        _search(p, _refine(p, forked), best)


def _canonicalize(p: Pattern) -> tuple[str, tuple[str, ...]]:
    if not p.vertices:
        return "V[]E[]", ()
    init_sigs = {v: (p.vertex_label(v), _incidence(p, v)) for v in p.vertex_vars}
    ranked = {s: i for i, s in enumerate(sorted(set(init_sigs.values())))}
    colors = _refine(p, {v: ranked[init_sigs[v]] for v in p.vertex_vars})
    best: list = [None, None]
    _search(p, colors, best)
    return best[0], best[1]


def canonical_key(p: Pattern) -> str:
    """Canonical structural encoding; equal iff patterns are isomorphic."""
    return _canonicalize(p)[0]


def canonical_order(p: Pattern) -> tuple[str, ...]:
    """The vertex ordering realizing the canonical encoding. Deterministic,
    and consistent across isomorphic copies up to automorphism."""
    return _canonicalize(p)[1]


def _pair_sig(p: Pattern, a: str, b: str) -> tuple:
    """Edge descriptor multiset between an ordered vertex pair."""
    descs = []
    for e in p.edges_between(a, b):
        if e.is_loop():
            continue
        if not e.directed:
            descs.append(("u", e.label))
        else:
            descs.append(("d", e.label) if e.src == a else ("r", e.label))
    return tuple(sorted(descs))


def _loop_sig(p: Pattern, v: str) -> tuple:
    return tuple(sorted(
        ("d" if e.directed else "u", e.label)
        for e in p.edges if e.is_loop() and e.src == v
    ))


def isomorphic_bruteforce(a: Pattern, b: Pattern) -> bool:
    """Structure-only isomorphism by trying every label-preserving vertex
    bijection. Exponential; intended for cross-checking canonical_key on
    small patterns in tests."""
    if a.n_vertices != b.n_vertices or a.n_edges != b.n_edges:
        return False
    if sorted(l for _, l in a.vertices) != sorted(l for _, l in b.vertices):
        return False
    avs, bvs = a.vertex_vars, b.vertex_vars
    for perm in permutations(bvs):
        m = dict(zip(avs, perm))
        if any(a.vertex_label(v) != b.vertex_label(m[v]) for v in avs):
            continue
        ok = all(
            _pair_sig(a, u, v) == _pair_sig(b, m[u], m[v])
            for i, u in enumerate(avs) for v in avs[i + 1:]
        ) and all(_loop_sig(a, v) == _loop_sig(b, m[v]) for v in avs)
        if ok:
            return True
    return False
