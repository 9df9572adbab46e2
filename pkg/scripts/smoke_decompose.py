from relgraph.graphopt.decompose import (
    enumerate_trees, search_graph_plan, validate_tree,
)
from relgraph.graphopt.stats import build_catalog
from relgraph.pattern import Constraint, Pattern, PatternEdge
from relgraph.session import load_manifest

s = load_manifest("tests/data/fig2/manifest.json")
view = s.graphs["social"]
cat = build_catalog(view, 3)

tri = Pattern((("p", "Person"), ("q", "Person"), ("m", "Message")),
              (PatternEdge("k", "Knows", "p", "q"),
               PatternEdge("l1", "Likes", "p", "m"),
               PatternEdge("l2", "Likes", "q", "m")))

tree = search_graph_plan(tri, cat, index_available=True)
print(tree.describe())
validate_tree(tree, tri)
# shape: root joins a 2-vertex left (person-knows-person) with the message star
assert tree.kind == "join" and tree.right.kind == "star"
assert set(tree.right.pattern.vertex_vars) >= {"m"}
assert tree.left.verts == frozenset({"p", "q"})
assert tree.left.kind == "join" and tree.left.right.kind == "star"
assert tree.left.left.kind == "vertex"

# DP cost equals the exhaustive minimum, for both index settings
for idx in (True, False):
    t = search_graph_plan(tri, cat, index_available=idx)
    validate_tree(t, tri)
    allt = enumerate_trees(tri, cat, index_available=idx)
    for cand in allt:
        validate_tree(cand, tri)
    mn = min(c.cost for c in allt)
    assert abs(t.cost - mn) < 1e-9, (idx, t.cost, mn)
    print(f"index={idx}: {len(allt)} legal trees, DP cost {t.cost:.4g} == min {mn:.4g}")

# constrained entry: pushing name='Tom' onto p makes p the cheap entry
tri_c = Pattern(tri.vertices, tri.edges, (Constraint("p", "name", "=", "Tom"),))
t_c = search_graph_plan(tri_c, cat, index_available=True)
validate_tree(t_c, tri_c)
entry = t_c
while entry.left is not None:
    entry = entry.left
assert entry.kind == "vertex"
print("constrained entry vertex:", entry.pattern.describe())
assert entry.verts == frozenset({"p"})

# square pattern (4-cycle over Knows): hash split must be legal if chosen;
# exhaustive check at n=4 for both index settings
sq = Pattern(
    (("a", "Person"), ("b", "Person"), ("c", "Person"), ("d", "Person")),
    (PatternEdge("e1", "Knows", "a", "b"),
     PatternEdge("e2", "Knows", "b", "c"),
     PatternEdge("e3", "Knows", "c", "d"),
     PatternEdge("e4", "Knows", "d", "a")))
for idx in (True, False):
    t = search_graph_plan(sq, cat, index_available=idx)
    validate_tree(t, sq)
    allt = enumerate_trees(sq, cat, index_available=idx)
    for cand in allt:
        validate_tree(cand, sq)
    mn = min(c.cost for c in allt)
    assert abs(t.cost - mn) < 1e-9
    kinds = {c.right.kind for c in allt if c.right is not None}
    print(f"square index={idx}: {len(allt)} trees (right kinds {sorted(kinds)}), "
          f"DP == min == {mn:.4g}")

# single edge: two entry choices, tree decomposes vertex + one-leg star
edge = Pattern((("a", "Person"), ("b", "Person")),
               (PatternEdge("e", "Knows", "a", "b"),))
t = search_graph_plan(edge, cat, True)
validate_tree(t, edge)
assert t.kind == "join" and t.left.kind == "vertex" and t.right.kind == "star"
allt = enumerate_trees(edge, cat, True)
assert len(allt) == 2
print("single edge:", t.left.pattern.describe(), "->", t.right.pattern.describe())

# single vertex
v = Pattern((("a", "Message"),), ())
t = search_graph_plan(v, cat, True)
validate_tree(t, v)
assert t.kind == "vertex" and t.cost == 2.0

# self-loop pattern: loop rides with the star of its center
loop = Pattern((("a", "Person"), ("b", "Person")),
               (PatternEdge("e", "Knows", "a", "b"),
                PatternEdge("s", "Knows", "b", "b")))
t = search_graph_plan(loop, cat, True)
validate_tree(t, loop)
print("loop tree:\n" + t.describe())
print("decompose smoke OK")
