"""Drive the randomized equivalence suite and its generators."""

import random

from relgraph.verify import (
    FIXTURE_QUERIES,
    engine_counter,
    fixture_session,
    oracle_counter,
    random_query,
    random_session,
    run_suite,
)

# embedded fixture matches the on-disk one
s = fixture_session()
assert s.catalog.get_relation("Person").n_rows == 3
assert s.catalog.get_relation("Likes").n_rows == 3
assert "social" in s.graphs

# fixture queries cover every distinct mode and a lone-vertex pattern
modes = {q.split("MATCH")[1].split("(")[0].strip() for _, q in FIXTURE_QUERIES}
assert {"", "DISTINCT VERTICES", "DISTINCT EDGES", "DISTINCT ALL"} <= modes

# seeded graphs are deterministic and within the size budget
a, b = random_session(11), random_session(11)
for name in ("Node", "Hub", "Link", "Tie", "Rel"):
    av, bv = a.catalog.get_relation(name), b.catalog.get_relation(name)
    assert av.n_rows == bv.n_rows
    for col in (c.name for c in av.schema.columns):
        assert list(av.column(col)) == list(bv.column(col))
n_v = sum(a.catalog.get_relation(t).n_rows for t in ("Node", "Hub"))
n_e = sum(a.catalog.get_relation(t).n_rows for t in ("Link", "Tie", "Rel"))
assert n_v <= 200 and n_e <= 1000, (n_v, n_e)

# query generator: deterministic, parseable, stays within the size caps
rng1, rng2 = random.Random(("query", 0, 0)), random.Random(("query", 0, 0))
qs = [random_query(rng1) for _ in range(40)]
assert qs == [random_query(rng2) for _ in range(40)]
from relgraph.frontend import parse_query, validate  # noqa: E402

sess = random_session(3)
saw_distinct = saw_undirected = saw_props = False
for q in qs:
    rq = validate(parse_query(q), sess.catalog, sess.graphs)
    assert len(rq.pattern.vertex_vars) <= 4
    assert len(rq.pattern.edges) <= 5
    saw_distinct |= rq.pattern.distinct != "none"
    saw_undirected |= any(not e.directed for e in rq.pattern.edges)
    saw_props |= bool(rq.pattern.constraints)
assert saw_distinct and saw_undirected and saw_props

# regression: an undirected edge over label-asymmetric endpoints only
# matches one stored orientation; the agnostic planner must not emit
# the impossible flip (it used to equate Hub.node_id, a missing column)
ASYM = """
SELECT g.n, g.h
FROM GRAPH_TABLE (rg
       MATCH (a:Node)-[e:Rel]-(b:Hub)
       COLUMNS (a.node_id AS n, b.hub_id AS h)) AS g
"""
want = oracle_counter(sess, ASYM)
assert sum(want.values()) > 0
for opt in ("agnostic", "converged"):
    for ui in (True, False):
        assert engine_counter(sess, ASYM, opt, ui) == want, (opt, ui)

# a short randomized run end to end
res = run_suite(graphs=4, queries_per_graph=3, seed=1)
assert res.ok, res.failures[:3]
assert res.cases == len(FIXTURE_QUERIES) + 12
assert res.elapsed_s < 60
print(f"suite: {res.cases} cases in {res.elapsed_s:.2f}s")
print("verify smoke passed")
