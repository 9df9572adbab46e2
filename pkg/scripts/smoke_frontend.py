import json
from pathlib import Path

from relgraph.frontend import parse_ddl, parse_query, parse_statement, pretty, validate
from relgraph.mapping import GraphDecl, create_graph
from relgraph.storage import Catalog, TableSchema, Column

DATA = Path("/root/pkg/tests/data/fig2")

manifest = json.loads((DATA / "manifest.json").read_text())
cat = Catalog()
for spec in manifest["relations"]:
    cat.load_csv(spec["name"], DATA / spec["path"], spec["columns"])

decls = parse_ddl((DATA / "social.ddl").read_text())
print("ddl ->", decls)
graphs = {}
for d in decls:
    gdecl = GraphDecl(d.name, d.vertex_tables, tuple(
        __import__("relgraph.mapping", fromlist=["EdgeDecl"]).EdgeDecl(
            e.relation, e.src_key, e.src_table, e.src_ref_key,
            e.dst_key, e.dst_table, e.dst_ref_key)
        for e in d.edge_tables))
    graphs[d.name] = create_graph(cat, gdecl)
print("graph:", graphs["social"].name, graphs["social"].vertex_labels,
      graphs["social"].edge_labels)

Q = """
SELECT g.pname, pl.pl_name AS city
FROM GRAPH_TABLE (social
       MATCH (p:Person)-[k:Knows]->(q:Person),
             (p)-[l1:Likes]->(m:Message),
             (q)-[l2:Likes]->(m)
       COLUMNS (q.name AS pname, q.place_id AS pid)) AS g
JOIN Place AS pl ON g.pid = pl.place_id
WHERE pl.pl_name = 'Beijing'
"""
ast1 = parse_query(Q)
text = pretty(ast1)
print("--- pretty ---")
print(text)
ast2 = parse_statement(text)
assert ast1 == ast2, "round trip failed"
print("round-trip OK")

rq = validate(ast1, cat, graphs)
print("pattern:", rq.pattern.describe())
print("columns:", rq.columns)
print("tables:", rq.tables)
print("preds:", rq.preds)
print("select:", rq.select)

# negative checks
import relgraph.errors as E

bad = [
    ("SELECT g.x FROM GRAPH_TABLE (nope MATCH (a:Person) COLUMNS (a.name AS x)) AS g",
     E.UnknownGraphError),
    ("SELECT g.x FROM GRAPH_TABLE (social MATCH (a:Nope) COLUMNS (a.name AS x)) AS g",
     E.UnknownLabelError),
    ("SELECT g.x FROM GRAPH_TABLE (social MATCH (a:Person) COLUMNS (a.nope AS x)) AS g",
     E.UnknownAttributeError),
    ("SELECT g.x FROM GRAPH_TABLE (social MATCH (a:Person), (b:Person) COLUMNS (a.name AS x)) AS g",
     E.DisconnectedPatternError),
    ("SELECT g.x FROM GRAPH_TABLE (social MATCH (a:Person)-[k:Likes]->(b:Person) COLUMNS (a.name AS x)) AS g",
     E.TypeMismatchError),
    ("SELECT g.x FROM GRAPH_TABLE (social MATCH (a:Person {name: 5}) COLUMNS (a.name AS x)) AS g",
     E.TypeMismatchError),
    ("SELECT pl_name FROM GRAPH_TABLE (social MATCH (a:Person) COLUMNS (a.name AS pl_name)) AS g JOIN Place AS pl ON g.pl_name = pl.pl_name",
     E.AmbiguousColumnError),
    ("SELECT g.x FROM Place AS pl",
     E.UnsupportedQueryError),
]
for q, err in bad:
    try:
        validate(parse_query(q), cat, graphs)
    except err:
        print("ok:", err.__name__)
    except Exception as e:  # noqa
        print("WRONG ERROR for", err.__name__, "->", type(e).__name__, e)
    else:
        print("NO ERROR for", err.__name__)
