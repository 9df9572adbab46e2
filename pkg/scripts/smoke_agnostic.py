from collections import Counter

from relgraph.agnostic import plan_agnostic, transform_to_spj
from relgraph.engine import ExecEnv, execute, explain
from relgraph.frontend import parse_query, validate
from relgraph.oracle import apply_distinct, match_bruteforce, project_columns
from relgraph.session import load_manifest

s = load_manifest("tests/data/fig2/manifest.json")
view = s.graphs["social"]
env = ExecEnv(s.catalog, s.graphs, use_index=False)
env_idx = ExecEnv(s.catalog, s.graphs, use_index=True)

FULL = """
SELECT g.p_name, g.q_name, g.content
FROM GRAPH_TABLE (social
       MATCH (p:Person)-[k:Knows]->(q:Person),
             (p)-[l1:Likes]->(m:Message),
             (q)-[l2:Likes]->(m)
       COLUMNS (p.name AS p_name, q.name AS q_name, m.content AS content)) AS g
"""
rq = validate(parse_query(FULL), s.catalog, s.graphs)
variants = transform_to_spj(rq, s.catalog, view)
assert len(variants) == 1
tbls = variants[0].tables
vcount = sum(1 for a, r in tbls if r in ("Person", "Message"))
ecount = sum(1 for a, r in tbls if r in ("Knows", "Likes"))
print("aliases:", tbls)
assert (vcount, ecount) == (3, 3), (vcount, ecount)
print("criterion-3 shape OK (3 vertex + 3 edge aliases)")

plan = plan_agnostic(rq, s.catalog, view)
res = execute(plan, env)
print(explain(plan))
print("rows:", sorted(res.rows()))
assert sorted(res.rows()) == [("Tom", "Jerry", "hello world")]

# oracle comparison helper
def oracle_rows(query):
    r = validate(parse_query(query), s.catalog, s.graphs)
    bt = match_bruteforce(view, r.pattern)
    rows = apply_distinct(r.pattern, bt.columns, bt.rows)
    names, vals = project_columns(view, type(bt)(bt.columns, rows),
                                  [(c.var, c.attr, c.alias) for c in r.columns])
    # apply outer select over graph columns only when no base tables
    sel = []
    for ref, out in r.select:
        assert ref.source == "graph"
        sel.append(names.index(ref.column))
    return Counter(tuple(v[i] for i in sel) for v in vals)

def engine_rows(query, use_index):
    r = validate(parse_query(query), s.catalog, s.graphs)
    p = plan_agnostic(r, s.catalog, view, graph_index=use_index)
    t = execute(p, ExecEnv(s.catalog, s.graphs, use_index=use_index))
    return Counter(t.rows())

# message elimination: p/q projected, m untouched
ELIM = """
SELECT g.p_name, g.q_name
FROM GRAPH_TABLE (social
       MATCH (p:Person)-[l1:Likes]->(m:Message)<-[l2:Likes]-(q:Person)
       COLUMNS (p.name AS p_name, q.name AS q_name)) AS g
"""
r2 = validate(parse_query(ELIM), s.catalog, s.graphs)
v2 = transform_to_spj(r2, s.catalog, view)[0]
print("elim tables:", v2.tables, "conds:", v2.join_conds)
assert all(a != "m" for a, _ in v2.tables)
assert engine_rows(ELIM, False) == oracle_rows(ELIM), "elimination broke results"
print("redundant-vertex elimination OK")

# undirected + distinct modes
for mode in ("", "DISTINCT VERTICES", "DISTINCT EDGES", "DISTINCT ALL"):
    q = f"""
    SELECT g.an, g.bn
    FROM GRAPH_TABLE (social
           MATCH {mode and 'DISTINCT ' + mode.split()[1] or ''} (a:Person)-[e1:Knows]-(b:Person)
           COLUMNS (a.name AS an, b.name AS bn)) AS g
    """
    got = engine_rows(q, False)
    want = oracle_rows(q)
    assert got == want, (mode, got, want)
print("undirected + distinct modes OK")

# two undirected edges -> 4 variants; index servicing equivalence
W = """
SELECT g.an, g.cn
FROM GRAPH_TABLE (social
       MATCH (a:Person)-[e1:Knows]-(b:Person)-[e2:Knows]-(c:Person)
       COLUMNS (a.name AS an, c.name AS cn)) AS g
"""
noidx = engine_rows(W, False)
idx = engine_rows(W, True)
want = oracle_rows(W)
assert noidx == want and idx == want, (noidx, idx, want)
print("2-undirected wedge x index servicing OK:", sum(noidx.values()), "rows")

# hybrid with base join + where
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
r3 = validate(parse_query(HY), s.catalog, s.graphs)
p3 = plan_agnostic(r3, s.catalog, view)
t3 = execute(p3, env)
assert t3.rows() == [("Jerry", "Beijing")], t3.rows()
p3i = plan_agnostic(r3, s.catalog, view, graph_index=True)
t3i = execute(p3i, env_idx)
assert Counter(t3i.rows()) == Counter(t3.rows())
print("hybrid query OK:", t3.rows())

# constraint in props block
PB = """
SELECT g.qn
FROM GRAPH_TABLE (social
       MATCH (p:Person {name: 'Tom'})-[k:Knows]->(q:Person)
       COLUMNS (q.name AS qn)) AS g
"""
assert engine_rows(PB, False) == oracle_rows(PB) == Counter({("Jerry",): 1})
print("props constraint OK")
print("agnostic smoke OK")
