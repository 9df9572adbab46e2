"""End-to-end drive of the command line: every subcommand, every exit code."""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
FIG = str(ROOT / "tests" / "data" / "fig2" / "manifest.json")

EDGE_Q = ("SELECT g.pn FROM GRAPH_TABLE (social MATCH "
          "(p:Person)-[k:Knows]->(q:Person) COLUMNS (p.name AS pn)) AS g")
TRI_Q = ("SELECT g.a FROM GRAPH_TABLE (social MATCH DISTINCT VERTICES "
         "(a:Person)-[e1:Knows]-(b:Person)-[e2:Knows]-(c:Person)"
         "-[e3:Knows]-(a) COLUMNS (a.person_id AS a)) AS g")


def cli(*args, code=0):
    r = subprocess.run([sys.executable, "-m", "relgraph.cli", *args],
                       capture_output=True, text=True, cwd=ROOT)
    assert r.returncode == code, (args, r.returncode, r.stdout, r.stderr)
    return r


out = cli("load", "--manifest", FIG).stdout
assert "relation Person rows=3" in out
assert "graph social vertices=Person,Message edges=Knows,Likes" in out

# query: both optimizers, both index settings, same rows
for opt in ("converged", "agnostic"):
    for idx in ("--graph-index", "--no-graph-index"):
        r = cli("query", "--manifest", FIG, "--optimizer", opt, idx, EDGE_Q)
        lines = r.stdout.strip().splitlines()
        assert lines[0] == "pn" and sorted(lines[1:3]) == ["Jerry", "Tom"]
        assert lines[-1].startswith("optimize_us=") and "rows=2" in lines[-1]
print("query OK")

with tempfile.TemporaryDirectory() as td:
    td = Path(td)
    # --output writes the rows; timing stays on stdout
    r = cli("query", "--manifest", FIG, "--output", str(td / "q.csv"), EDGE_Q)
    assert "rows=2" in r.stdout and "pn" not in r.stdout
    assert (td / "q.csv").read_text() == "pn\nTom\nJerry\n"

    # explain: deterministic, text then JSON, index setting changes the plan
    a = cli("explain", "--manifest", FIG, EDGE_Q).stdout
    b = cli("explain", "--manifest", FIG, EDGE_Q).stdout
    assert a == b and a.startswith("PROJECT") and '"op":' in a
    noi = cli("explain", "--manifest", FIG, "--no-graph-index", EDGE_Q).stdout
    assert "EXPAND" in a and "EXPAND" not in noi and "HASH_JOIN" in noi
    agn = cli("explain", "--manifest", FIG, "--optimizer", "agnostic",
              EDGE_Q).stdout
    assert "HASH_JOIN" in agn
    print("explain OK")

    # gen -> load -> bench round trip
    r = cli("gen", "--out", str(td / "ds"), "--persons", "300",
            "--cliques", "1", "--seed", "7")
    summary = json.loads(r.stdout)
    assert summary["persons"] == 300 and summary["cliques"] == 1
    man = str(td / "ds" / "manifest.json")
    assert "relation Person rows=300" in cli("load", "--manifest", man).stdout

    qfile = td / "queries.json"
    qfile.write_text(json.dumps([
        {"name": "tri", "family": "cyclic", "query": TRI_Q},
        {"name": "edge", "family": "acyclic", "query": EDGE_Q.replace(
            "social", "social")},
    ]))
    r = cli("bench", "--manifest", man, "--queries", str(qfile),
            "--reps", "2", "--output", str(td / "bench.csv"))
    head, tri_row = r.stdout.splitlines()[:2]
    assert head.split()[:2] == ["name", "family"]
    assert tri_row.split()[0] == "tri" and "OT" not in tri_row
    csv_lines = (td / "bench.csv").read_text().splitlines()
    assert csv_lines[0].startswith("name,family,converged_optimize_us")
    assert len(csv_lines) == 3
    print("gen+bench OK")

    # timeout: query exits 1, bench marks OT but exits 0
    r = cli("query", "--manifest", man, "--optimizer", "agnostic",
            "--timeout-ms", "1", TRI_Q, code=1)
    assert "time budget" in r.stderr
    qfile.write_text(json.dumps(
        [{"name": "tri", "family": "cyclic", "query": TRI_Q}]))
    r = cli("bench", "--manifest", man, "--queries", str(qfile),
            "--reps", "1", "--timeout-ms", "1")
    assert "OT" in r.stdout
    print("timeouts OK")

    # empty bench file: header only, exit 0
    qfile.write_text("[]")
    r = cli("bench", "--manifest", FIG, "--queries", str(qfile),
            "--output", str(td / "empty.csv"))
    assert len(r.stdout.strip().splitlines()) == 1
    assert len((td / "empty.csv").read_text().splitlines()) == 1

    # create-graph applies extra DDL against the same relations
    ddl = td / "extra.ddl"
    ddl.write_text("""CREATE PROPERTY GRAPH likes_only
  VERTEX TABLES (Person, Message)
  EDGE TABLES (
    Likes SOURCE KEY (pid) REFERENCES Person (person_id)
          DESTINATION KEY (mid) REFERENCES Message (message_id)
  );
""")
    out = cli("create-graph", "--manifest", FIG, "--ddl", str(ddl)).stdout
    assert "graph likes_only" in out
    assert "edge Likes rows=3 src=Person dst=Message" in out

    # space: text table on stdout, CSV via --output
    out = cli("space", "--family", "path", "--sizes", "2..4").stdout
    assert out.splitlines()[0].split() == [
        "family", "size", "agnostic_count", "aware_count", "ratio",
        "micros_agnostic", "micros_aware"]
    assert "366080" in out
    cli("space", "--family", "cycle", "--sizes", "3,4",
        "--output", str(td / "space.csv"))
    lines = (td / "space.csv").read_text().splitlines()
    assert lines[0] == "family,size,agnostic_count,aware_count,ratio," \
                       "micros_agnostic,micros_aware"
    assert lines[1].startswith("cycle,3,4032,6,")

# verify: small run, clean
r = cli("verify", "--graphs", "2", "--queries", "2", "--seed", "3")
assert "all plans agree with the oracle" in r.stdout
print("space+verify OK")

# exit codes: 2 for the caller's mistakes, 1 for runtime trouble
assert cli("query", "--manifest", FIG, "SELECT FROM", code=2).stderr
assert cli("query", "--manifest", FIG, "--optimizer", "magic", EDGE_Q,
           code=2)
assert cli("query", "--manifest", "/nope.json", EDGE_Q, code=1).stderr
assert cli("frobnicate", code=2)
r = cli("query", "--manifest", FIG, EDGE_Q.replace("social", "nosuch"),
        code=1)
assert "unknown graph" in r.stderr
bad = Path(tempfile.mkstemp(suffix=".json")[1])
bad.write_text('{"not": "a list"}')
assert cli("bench", "--manifest", FIG, "--queries", str(bad), code=2).stderr
bad.unlink()
print("exit codes OK")
print("cli smoke passed")
