"""Smoke checks for the search-space counters."""

import math
import time

from relgraph.errors import PlanError, SizeLimitError
from relgraph.pattern import Pattern, PatternEdge
from relgraph.planspace import (
    CSV_COLUMNS,
    count_agnostic,
    count_aware,
    cycle_pattern,
    measure,
    naive_agnostic,
    naive_aware,
    path_pattern,
    render_csv,
    render_text,
    report,
    standard_report,
)


def catalan(k):
    return math.comb(2 * k, k) // (k + 1)


# single vertex: one scan, no joins, one trivial tree in both spaces
single = path_pattern(0)
assert count_agnostic(single) == 1 == naive_agnostic(single)
assert count_aware(single) == 1 == naive_aware(single)

# single edge: chain of three relations -> 8 ordered join trees;
# two decomposition trees (expand from either endpoint)
edge = path_pattern(1)
assert count_agnostic(edge) == 8 == naive_agnostic(edge)
assert count_aware(edge) == 2 == naive_aware(edge)

# paths: agnostic is the closed form 2^(2m) * catalan(2m) for the
# (2m+1)-relation chain; aware is 2^m orderings
for m in range(2, 9):
    p = path_pattern(m)
    agn = count_agnostic(p)
    aw = count_aware(p)
    assert agn == (2 ** (2 * m)) * catalan(2 * m), (m, agn)
    assert aw == 2 ** m, (m, aw)

# naive cross-checks up to m=4 / n=4
for m in range(5):
    p = path_pattern(m)
    assert count_agnostic(p) == naive_agnostic(p), m
    assert count_aware(p) == naive_aware(p), m
for n in (3, 4):
    c = cycle_pattern(n)
    assert count_agnostic(c) == naive_agnostic(c), n
    assert count_aware(c) == naive_aware(c), n

# triangle: no legal splits, 3! peel orders
assert count_aware(cycle_pattern(3)) == 6

# cycles: peel any vertex first, then either end of the leftover path
for n in range(3, 7):
    c = cycle_pattern(n)
    assert count_aware(c) == n * 2 ** (n - 2), n
    assert count_agnostic(c) >= count_aware(c)

# star with 3 leaves: start at the hub (3! leaf orders) or at one leaf
# (hub second, 2! leaf orders, 3 leaf choices) -> 6 + 3*2 = 12
hub_star = Pattern(
    (("h", "V"), ("a", "V"), ("b", "V"), ("c", "V")),
    (PatternEdge("e1", "E", "h", "a"),
     PatternEdge("e2", "E", "h", "b"),
     PatternEdge("e3", "E", "h", "c")),
)
assert count_aware(hub_star) == 12 == naive_aware(hub_star)
assert count_agnostic(hub_star) == naive_agnostic(hub_star)

# 4-clique: any peel order works; m=6 is beyond the naive agnostic sizes
verts = tuple((v, "V") for v in "abcd")
k4_edges = tuple(
    PatternEdge(f"e{i}", "E", a, b)
    for i, (a, b) in enumerate(
        (x, y) for xi, x in enumerate("abcd") for y in "abcd"[xi + 1:]))
k4 = Pattern(verts, k4_edges)
assert count_aware(k4) == 24 == naive_aware(k4)
assert count_agnostic(k4) >= count_aware(k4)

# self-loop rides along with its vertex
loopy = Pattern(
    (("a", "V"), ("b", "V")),
    (PatternEdge("e1", "E", "a", "b"), PatternEdge("e2", "E", "a", "a")),
)
assert count_aware(loopy) == 2 == naive_aware(loopy)
assert count_agnostic(loopy) == naive_agnostic(loopy)

# parallel edges enlarge the join space, not the peel space
para = Pattern(
    (("a", "V"), ("b", "V")),
    (PatternEdge("e1", "E", "a", "b"), PatternEdge("e2", "E", "b", "a")),
)
assert count_aware(para) == 2 == naive_aware(para)
assert count_agnostic(para) == naive_agnostic(para) > 8

# acceptance drill: bound, dominance, and per-edge ratio doubling
t0 = time.perf_counter()
prev_ratio = None
for m in range(2, 9):
    p = path_pattern(m)
    agn = count_agnostic(p)
    aw = count_aware(p)
    n = m + 1
    assert aw <= 4 ** (n - 1), (m, aw)
    assert aw <= agn, (m, aw, agn)
    ratio = agn / aw
    if prev_ratio is not None and m >= 3:
        assert ratio >= 2 * prev_ratio, (m, ratio, prev_ratio)
        assert math.log2(ratio) - math.log2(prev_ratio) >= 1
    prev_ratio = ratio
elapsed = time.perf_counter() - t0
assert elapsed < 120, elapsed

# size limits: path m=9 keeps the aware count (10 vertices) but the
# agnostic side is over the relation cap; m=10 trips both
try:
    count_agnostic(path_pattern(9))
    raise AssertionError("expected SizeLimitError")
except SizeLimitError:
    pass
assert count_aware(path_pattern(9)) == 2 ** 9
try:
    count_aware(path_pattern(10))
    raise AssertionError("expected SizeLimitError")
except SizeLimitError:
    pass

# disconnected patterns are rejected
disc = Pattern((("a", "V"), ("b", "V")), ())
try:
    count_agnostic(disc)
    raise AssertionError("expected PlanError")
except PlanError:
    pass

# report plumbing: stock families, SizeLimit marking, CSV shape
rows = standard_report()
assert [r.descriptor for r in rows[:3]] == ["path(2)", "path(3)", "path(4)"]
assert all(r.agnostic_count and r.aware_count for r in rows)
assert all(r.micros_agnostic is not None for r in rows)
csv_text = render_csv(rows)
assert csv_text.splitlines()[0] == ",".join(CSV_COLUMNS)
assert len(csv_text.splitlines()) == 1 + 7 + 4

capped = report("path", [9])
assert capped[0].agnostic_count is None
assert capped[0].aware_count == 512
assert "SizeLimit" in render_csv(capped)
assert "SizeLimit" in capped[0].note

text = render_text(rows)
assert text.splitlines()[0].split()[:2] == ["family", "size"]

r = measure("path", 3)
assert r.ratio == r.agnostic_count / r.aware_count

try:
    measure("grid", 3)
    raise AssertionError("expected ValueError")
except ValueError:
    pass

print(render_text(rows))
print("planspace smoke ok")
