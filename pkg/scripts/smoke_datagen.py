"""Smoke checks for the dataset generator."""

import shutil
import tempfile
from pathlib import Path

from relgraph.datagen import generate
from relgraph.oracle import apply_distinct, match_bruteforce
from relgraph.pattern import Pattern, PatternEdge
from relgraph.session import load_manifest

tmp = Path(tempfile.mkdtemp(prefix="relgraph-gen-"))
try:
    a = tmp / "a"
    b = tmp / "b"
    c = tmp / "c"

    summary = generate(a, persons=120, triangle_closing=0.4, cliques=2,
                       seed=7)
    assert summary["persons"] == 120
    assert summary["knows"] > 0 and summary["likes"] > 0
    assert summary["closures"] > 0
    assert summary["cliques"] == 2

    # determinism: same seed -> identical bytes; other seed -> different
    generate(b, persons=120, triangle_closing=0.4, cliques=2, seed=7)
    for name in ("person.csv", "place.csv", "message.csv", "knows.csv",
                 "likes.csv", "manifest.json", "social.ddl"):
        assert (a / name).read_bytes() == (b / name).read_bytes(), name
    generate(c, persons=120, triangle_closing=0.4, cliques=2, seed=8)
    assert (a / "knows.csv").read_bytes() != (c / "knows.csv").read_bytes()

    # loads like the fixture: catalog + graph view, no dangling edges
    session = load_manifest(a / "manifest.json")
    view = session.graphs["social"]
    assert view.catalog.get_relation("Person").n_rows == 120

    # positive closing parameter guarantees Knows triangles
    tri = Pattern(
        (("a", "Person"), ("b", "Person"), ("c", "Person")),
        (PatternEdge("e1", "Knows", "a", "b", directed=False),
         PatternEdge("e2", "Knows", "b", "c", directed=False),
         PatternEdge("e3", "Knows", "a", "c", directed=False)),
        distinct="vertices",
    )
    tbl = match_bruteforce(view, tri)
    rows = apply_distinct(tri, tbl.columns, tbl.rows)
    assert len(rows) > 0

    # planted 4-cliques show up as undirected K4 matches
    verts = tuple((v, "Person") for v in "abcd")
    k4 = Pattern(
        verts,
        tuple(PatternEdge(f"e{i}", "Knows", x, y, directed=False)
              for i, (x, y) in enumerate(
                  (x, y) for xi, x in enumerate("abcd")
                  for y in "abcd"[xi + 1:])),
        distinct="vertices",
    )
    k4_tbl = match_bruteforce(view, k4)
    k4_rows = apply_distinct(k4, k4_tbl.columns, k4_tbl.rows)
    assert len(k4_rows) >= 24 * 2  # 4! orderings per planted clique

    # degree skew: the busiest person well above the mean degree
    knows = view.catalog.get_relation("Knows")
    src = knows.column("pid1")
    dst = knows.column("pid2")
    from collections import Counter
    deg = Counter(src.tolist()) + Counter(dst.tolist())
    mean = sum(deg.values()) / 120
    assert max(deg.values()) > 3 * mean, (max(deg.values()), mean)

    # closing forced even when random closure is unlikely
    d = tmp / "d"
    s2 = generate(d, persons=5, knows_degree=1.0, triangle_closing=0.01,
                  seed=3)
    assert s2["closures"] > 0
    view2 = load_manifest(d / "manifest.json").graphs["social"]
    tbl2 = match_bruteforce(view2, tri)
    assert len(apply_distinct(tri, tbl2.columns, tbl2.rows)) > 0

    # no closing pass when the parameter is zero
    s3 = generate(tmp / "e", persons=50, triangle_closing=0.0, seed=3)
    assert s3["closures"] == 0

    print("datagen smoke ok:", summary)
finally:
    shutil.rmtree(tmp)
