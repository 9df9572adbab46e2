from relgraph.graphopt.canon import canonical_key
from relgraph.graphopt.stats import (
    PatternCatalog, _parse_shape, build_catalog, count_pattern,
    estimate_cardinality,
)
from relgraph.oracle import match_bruteforce
from relgraph.pattern import Constraint, Pattern, PatternEdge
from relgraph.session import load_manifest

s = load_manifest("tests/data/fig2/manifest.json")
view = s.graphs["social"]

cat = build_catalog(view, 3)
print(f"catalog: {len(cat.counts)} patterns, {len(cat.rates)} extension edges")

# every stored count equals the brute-force oracle
bad = 0
for key, cnt in sorted(cat.counts.items()):
    p = _parse_shape(cat.shapes[key])
    oracle = len(match_bruteforce(view, p).rows)
    if oracle != cnt:
        print("COUNT MISMATCH", cat.shapes[key], cnt, oracle)
        bad += 1
assert bad == 0
print("all stored counts match the oracle")

# single-vertex sizes
assert cat.lookup(Pattern((("v", "Person"),), ())) == 3
assert cat.lookup(Pattern((("v", "Message"),), ())) == 2
# Place is a base relation, not a vertex table of this graph
assert cat.lookup(Pattern((("v", "Place"),), ())) is None

# single-edge counts
knows = Pattern((("a", "Person"), ("b", "Person")),
                (PatternEdge("e", "Knows", "a", "b"),))
assert cat.lookup(knows) == 2
knows_u = Pattern((("a", "Person"), ("b", "Person")),
                  (PatternEdge("e", "Knows", "a", "b", directed=False),))
assert cat.lookup(knows_u) == 4

# the triangle
tri = Pattern((("p", "Person"), ("q", "Person"), ("m", "Message")),
              (PatternEdge("k", "Knows", "p", "q"),
               PatternEdge("l1", "Likes", "p", "m"),
               PatternEdge("l2", "Likes", "q", "m")))
assert cat.lookup(tri) == 1, cat.lookup(tri)
assert estimate_cardinality(cat, tri) == 1.0

# extension rate: triangle -> knows edge is 1/2
rate = cat.rate(tri, knows)
assert rate == 0.5, rate

# constrained estimate: name='Tom' is 1 of 3 people
tri_c = Pattern(tri.vertices, tri.edges,
                (Constraint("p", "name", "=", "Tom"),))
est = estimate_cardinality(cat, tri_c)
assert abs(est - 1 / 3) < 1e-12, est

# 4-vertex pattern: recursive estimate, compare against oracle
path4 = Pattern(
    (("a", "Person"), ("b", "Person"), ("m", "Message"), ("c", "Person")),
    (PatternEdge("k", "Knows", "a", "b"),
     PatternEdge("l1", "Likes", "b", "m"),
     PatternEdge("l2", "Likes", "c", "m")))
real = len(match_bruteforce(view, path4).rows)
est = estimate_cardinality(cat, path4)
print(f"4-path: oracle={real} estimate={est:.3f}")
assert est > 0

# zero cases
zero = Pattern((("a", "Message"), ("b", "Message")),
               (PatternEdge("e", "Knows", "a", "b"),))
assert estimate_cardinality(cat, zero) == 0.0
unknown = Pattern((("a", "Nowhere"),), ())
assert estimate_cardinality(cat, unknown) == 0.0

# serialization round trip
doc = cat.to_json()
cat2 = PatternCatalog.from_json(doc)
assert cat2.counts == cat.counts and cat2.k == cat.k
assert cat2.rates == cat.rates and cat2.degrees == cat.degrees
cat2.view = view
assert abs(estimate_cardinality(cat2, tri_c) - 1 / 3) < 1e-12

# k=2 catalog still estimates the triangle via extension factors
cat_k2 = build_catalog(view, 2)
est2 = estimate_cardinality(cat_k2, tri)
print(f"triangle with k=2 catalog: estimate={est2:.3f} (exact=1)")

import sys
try:
    build_catalog(view, 4)
except ValueError as e:
    print("k=4 rejected:", e)
else:
    sys.exit("k=4 accepted, should reject")
print("stats smoke OK")
