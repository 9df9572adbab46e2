from collections import Counter

import numpy as np

from relgraph.agnostic import plan_agnostic
from relgraph.engine import ExecEnv, execute, explain
from relgraph.frontend import parse_query, validate
from relgraph.graphopt import build_catalog, plan_converged
from relgraph.graphopt.rules import apply_filter_into_match
from relgraph.mapping import EdgeDecl, GraphDecl, create_graph
from relgraph.oracle import apply_distinct, match_bruteforce, project_columns
from relgraph.session import load_manifest
from relgraph.storage import Catalog, Column, TableSchema, relation_from_rows

NO_ADJ = ("expand", "expand_edge", "expand_intersect")

s = load_manifest("tests/data/fig2/manifest.json")
view = s.graphs["social"]
pcat = build_catalog(view, k=3)


def oracle_rows(query, session=s):
    vw = session.graphs[validate(parse_query(query), session.catalog,
                                 session.graphs).graph_name]
    r = validate(parse_query(query), session.catalog, session.graphs)
    bt = match_bruteforce(vw, r.pattern)
    rows = apply_distinct(r.pattern, bt.columns, bt.rows)
    names, vals = project_columns(vw, type(bt)(bt.columns, rows),
                                  [(c.var, c.attr, c.alias) for c in r.columns])
    sel = []
    for ref, out in r.select:
        assert ref.source == "graph"
        sel.append(names.index(ref.column))
    return Counter(tuple(v[i] for i in sel) for v in vals)


def run(query, use_index, session=s, catalog=None):
    r = validate(parse_query(query), session.catalog, session.graphs)
    vw = session.graphs[r.graph_name]
    p = plan_converged(r, session.catalog, vw, catalog or pcat,
                       graph_index=use_index)
    t = execute(p, ExecEnv(session.catalog, session.graphs,
                           use_index=use_index))
    return p, Counter(t.rows())


def agn(query, use_index, session=s):
    r = validate(parse_query(query), session.catalog, session.graphs)
    vw = session.graphs[r.graph_name]
    p = plan_agnostic(r, session.catalog, vw, graph_index=use_index)
    t = execute(p, ExecEnv(session.catalog, session.graphs,
                           use_index=use_index))
    return Counter(t.rows())


# 1. triangle, both modes, vs oracle and vs agnostic
FULL = """
SELECT g.p_name, g.q_name, g.content
FROM GRAPH_TABLE (social
       MATCH (p:Person)-[k:Knows]->(q:Person),
             (p)-[l1:Likes]->(m:Message),
             (q)-[l2:Likes]->(m)
       COLUMNS (p.name AS p_name, q.name AS q_name, m.content AS content)) AS g
"""
want = oracle_rows(FULL)
assert want == Counter({("Tom", "Jerry", "hello world"): 1})
pidx, got_idx = run(FULL, True)
pnoi, got_noi = run(FULL, False)
print(explain(pidx))
assert got_idx == want and got_noi == want, (got_idx, got_noi, want)
assert agn(FULL, True) == want
# index plan: the unused Knows edge fuses away, the two Likes legs intersect
assert pidx.count_ops("expand") == 1, explain(pidx)
assert pidx.count_ops("expand_edge") == 0
assert pidx.count_ops("expand_intersect") == 1
assert pidx.count_ops("scan_vertex") == 1
# no-index plan never touches adjacency and carries no hints
assert all(n.kind not in NO_ADJ for n in pnoi.walk()), explain(pnoi)
assert all("index_hint" not in n.params for n in pnoi.walk())
print("triangle OK, index ops:",
      [n.kind for n in pidx.walk() if n.kind.startswith(("expand", "scan_v"))])

# 2. undirected + distinct modes, both index settings
for mode in ("", "DISTINCT VERTICES ", "DISTINCT EDGES ", "DISTINCT ALL "):
    q = f"""
    SELECT g.an, g.cn
    FROM GRAPH_TABLE (social
           MATCH {mode}(a:Person)-[e1:Knows]-(b:Person)-[e2:Knows]-(c:Person)
           COLUMNS (a.name AS an, c.name AS cn)) AS g
    """
    want = oracle_rows(q)
    for ui in (True, False):
        p, got = run(q, ui)
        assert got == want, (mode, ui, got, want)
    assert agn(q, False) == want
print("undirected wedge + distinct modes OK")

# 3. hybrid query with base join and WHERE on the base side
HY = """
SELECT g.pname, pl.pl_name AS city
FROM GRAPH_TABLE (social
       MATCH (p:Person)-[k:Knows]->(q:Person),
             (p)-[l1:Likes]->(m:Message),
             (q)-[l2:Likes]->(m)
       COLUMNS (q.name AS pname, q.place_id AS pid)) AS g
JOIN Place AS pl ON g.pid = pl.place_id
WHERE pl.pl_name = 'Beijing'
"""
for ui in (True, False):
    p, got = run(HY, ui)
    assert got == Counter({("Jerry", "Beijing"): 1}), (ui, got)
print("hybrid OK")

# 4. predicate pushdown: WHERE over one pattern element becomes a constraint
PD = """
SELECT g.qn
FROM GRAPH_TABLE (social
       MATCH (p:Person)-[k:Knows]->(q:Person)
       COLUMNS (p.name AS pn, q.name AS qn)) AS g
WHERE g.pn = 'Tom'
"""
r = validate(parse_query(PD), s.catalog, s.graphs)
r2 = apply_filter_into_match(r)
assert len(r2.preds) == 0 and len(r2.pattern.constraints) == 1
assert r2.pattern.constraints[0].var == "p"
for ui in (True, False):
    p, got = run(PD, ui)
    assert got == Counter({("Jerry",): 1}), (ui, got)
# the pushed filter sits inside the pattern subplan, next to the scan
gt = [n for n in p.walk() if n.kind == "scan_graph_table"][0]
inner_filters = [n for n in gt.walk() if n.kind == "filter"]
assert any(pr.get("left", {}).get("attr") == "name"
           for n in inner_filters for pr in n.params["preds"])
print("pushdown OK")

# 5. pseudo columns stay outside: ID/LABEL are not relation attributes
PS = """
SELECT g.pid_out, g.lab
FROM GRAPH_TABLE (social
       MATCH (p:Person)-[k:Knows]->(q:Person)
       COLUMNS (p.ID AS pid_out, q.LABEL AS lab, p.name AS pn)) AS g
WHERE g.lab = 'Person'
"""
r = validate(parse_query(PS), s.catalog, s.graphs)
r2 = apply_filter_into_match(r)
assert len(r2.preds) == 1  # not movable
for ui in (True, False):
    p, got = run(PS, ui)
    assert got == Counter({("Person#0", "Person"): 1, ("Person#1", "Person"): 1})
print("pseudo columns OK:", dict(got))

# 6. column trimming: unused graph-table output is dropped from the wrap
TRIM = """
SELECT g.p_name
FROM GRAPH_TABLE (social
       MATCH (p:Person)-[k:Knows]->(q:Person)
       COLUMNS (p.name AS p_name, q.name AS q_name, k.date AS kd)) AS g
"""
p, got = run(TRIM, True)
gt = [n for n in p.walk() if n.kind == "scan_graph_table"][0]
assert [c["out"] for c in gt.params["cols"]] == ["p_name"], gt.params["cols"]
assert got == oracle_rows(TRIM)
# with k.date kept, the Knows expansion cannot fuse
KEEP = TRIM.replace("SELECT g.p_name", "SELECT g.p_name, g.kd")
pk, gotk = run(KEEP, True)
assert gotk == oracle_rows(KEEP)
assert pk.count_ops("expand_edge") + pk.count_ops("expand_intersect") >= 1
assert p.count_ops("expand_edge") == 0 and p.count_ops("expand") == 1
print("trim and fuse OK")

# 7. self-loops, directed and undirected, on a purpose-built graph
cat = Catalog()
cat.register(relation_from_rows(
    TableSchema("Node", (Column("nid", "int64"), Column("name", "string"))),
    [[1, "a"], [2, "b"], [3, "c"]]))
cat.register(relation_from_rows(
    TableSchema("Rel", (Column("rid", "int64"), Column("s", "int64"),
                        Column("d", "int64"))),
    [[7, 1, 1], [8, 1, 2], [9, 2, 2], [10, 3, 1]]))
gd = GraphDecl("loopy", ("Node",),
               (EdgeDecl("Rel", "s", "Node", "nid", "d", "Node", "nid"),))
lview = create_graph(cat, gd)


class _S:
    catalog = cat
    graphs = {"loopy": lview}


lcat = build_catalog(lview, k=2)
for q in (
    """SELECT g.n FROM GRAPH_TABLE (loopy
         MATCH (a:Node)-[r:Rel]->(a) COLUMNS (a.name AS n)) AS g""",
    """SELECT g.n FROM GRAPH_TABLE (loopy
         MATCH (a:Node)-[r:Rel]-(a) COLUMNS (a.name AS n)) AS g""",
    """SELECT g.n, g.m FROM GRAPH_TABLE (loopy
         MATCH (a:Node)-[r:Rel]->(a)-[r2:Rel]->(b:Node)
         COLUMNS (a.name AS n, b.name AS m)) AS g""",
    """SELECT g.n, g.m FROM GRAPH_TABLE (loopy
         MATCH DISTINCT EDGES (a:Node)-[r:Rel]-(a)-[r2:Rel]-(b:Node)
         COLUMNS (a.name AS n, b.name AS m)) AS g""",
):
    want = oracle_rows(q, _S)
    for ui in (True, False):
        p, got = run(q, ui, _S, lcat)
        assert got == want, (q, ui, got, want)
        if not ui:
            assert all(n.kind not in NO_ADJ for n in p.walk())
print("self-loops OK (directed loop x2 rows, undirected loop doubles)")

# 8. single-vertex pattern and vertex-only graph table
SV = """
SELECT g.n FROM GRAPH_TABLE (social
       MATCH (p:Person) COLUMNS (p.name AS n)) AS g
"""
want = oracle_rows(SV)
for ui in (True, False):
    p, got = run(SV, ui)
    assert got == want
print("single vertex OK")

# 9. same-element attribute comparison is pushable
SAME = """
SELECT g.pn FROM GRAPH_TABLE (social
       MATCH (p:Person)-[l:Likes]->(m:Message)
       COLUMNS (p.name AS pn, l.likes_id AS lid, l.pid AS lpid)) AS g
WHERE g.lid > g.lpid
"""
r = validate(parse_query(SAME), s.catalog, s.graphs)
r2 = apply_filter_into_match(r)
assert len(r2.preds) == 0 and any(c.rhs_attr == "pid"
                                  for c in r2.pattern.constraints)
want = oracle_rows(SAME)
for ui in (True, False):
    p, got = run(SAME, ui)
    assert got == want, (ui, got, want)
print("same-element attr comparison OK")

print("pipeline smoke OK")
