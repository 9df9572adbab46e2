"""Randomized equivalence checking for the two optimizers.

Every case runs one query five ways: brute-force oracle, converged
planner with and without the graph index, and the graph-agnostic
planner with and without index hints. All five must produce the same
multiset of output rows. Graphs and queries are generated from seeds,
so a reported failure replays exactly.

Shared by `relgraph verify` and the acceptance tests.
"""

from __future__ import annotations

import random
import time
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Optional

from .agnostic import plan_agnostic
from .datagen import DDL as SOCIAL_DDL
from .engine import ExecEnv, execute
from .frontend import parse_query, validate
from .graphopt import build_catalog, plan_converged
from .oracle import BindingTable, apply_distinct, match_bruteforce, project_columns
from .session import Session
from .storage import Column, TableSchema, relation_from_rows

# ---------------------------------------------------------------------------
# fixture: the five-table social dataset, embedded so the suite needs no files

_FIXTURE_TABLES = (
    ("Person",
     (("person_id", "int64"), ("name", "string"), ("place_id", "int64")),
     [(1, "Tom", 100), (2, "Jerry", 101), (3, "Kat", 100)]),
    ("Message",
     (("message_id", "int64"), ("content", "string")),
     [(10, "hello world"), (20, "graphs are joins")]),
    ("Place",
     (("place_id", "int64"), ("pl_name", "string")),
     [(100, "Hangzhou"), (101, "Beijing")]),
    ("Knows",
     (("knows_id", "int64"), ("pid1", "int64"), ("pid2", "int64"),
      ("date", "string")),
     [(901, 1, 2, "2024-01-15"), (902, 2, 3, "2024-02-20")]),
    ("Likes",
     (("likes_id", "int64"), ("pid", "int64"), ("mid", "int64"),
      ("date", "string")),
     [(501, 1, 10, "2024-03-31"), (502, 2, 10, "2024-04-01"),
      (503, 2, 20, "2024-04-02")]),
)


def fixture_session() -> Session:
    """The bundled social micro-dataset, built in memory."""
    s = Session()
    for name, cols, rows in _FIXTURE_TABLES:
        schema = TableSchema(name, tuple(Column(n, t) for n, t in cols))
        s.catalog.register(relation_from_rows(schema, rows))
    s.create_graph_from_ddl(SOCIAL_DDL)
    return s


FIXTURE_QUERIES = (
    ("single_edge", """
SELECT g.pn, g.qn
FROM GRAPH_TABLE (social
       MATCH (p:Person)-[k:Knows]->(q:Person)
       COLUMNS (p.name AS pn, q.name AS qn)) AS g
"""),
    ("triangle", """
SELECT g.p_name, g.q_name, g.content
FROM GRAPH_TABLE (social
       MATCH (p:Person)-[k:Knows]->(q:Person),
             (p)-[l1:Likes]->(m:Message),
             (q)-[l2:Likes]->(m)
       COLUMNS (p.name AS p_name, q.name AS q_name, m.content AS content)) AS g
"""),
    ("wedge_none", """
SELECT g.an, g.cn
FROM GRAPH_TABLE (social
       MATCH (a:Person)-[e1:Knows]-(b:Person)-[e2:Knows]-(c:Person)
       COLUMNS (a.name AS an, c.name AS cn)) AS g
"""),
    ("wedge_vertices", """
SELECT g.an, g.cn
FROM GRAPH_TABLE (social
       MATCH DISTINCT VERTICES (a:Person)-[e1:Knows]-(b:Person)-[e2:Knows]-(c:Person)
       COLUMNS (a.name AS an, c.name AS cn)) AS g
"""),
    ("wedge_edges", """
SELECT g.an, g.cn
FROM GRAPH_TABLE (social
       MATCH DISTINCT EDGES (a:Person)-[e1:Knows]-(b:Person)-[e2:Knows]-(c:Person)
       COLUMNS (a.name AS an, c.name AS cn)) AS g
"""),
    ("wedge_all", """
SELECT g.an, g.cn
FROM GRAPH_TABLE (social
       MATCH DISTINCT ALL (a:Person)-[e1:Knows]-(b:Person)-[e2:Knows]-(c:Person)
       COLUMNS (a.name AS an, c.name AS cn)) AS g
"""),
    ("vertex_props", """
SELECT g.qn, g.d
FROM GRAPH_TABLE (social
       MATCH (p:Person {name: 'Tom'})-[k:Knows]->(q:Person)
       COLUMNS (q.name AS qn, k.date AS d)) AS g
"""),
    ("lone_vertex", """
SELECT g.c
FROM GRAPH_TABLE (social
       MATCH (m:Message)
       COLUMNS (m.content AS c)) AS g
"""),
)

# ---------------------------------------------------------------------------
# random graphs: two vertex labels, three edge labels, seeded rows

_RANDOM_DDL = """CREATE PROPERTY GRAPH rg
  VERTEX TABLES (Node, Hub)
  EDGE TABLES (
    Link SOURCE KEY (src) REFERENCES Node (node_id)
         DESTINATION KEY (dst) REFERENCES Node (node_id),
    Tie SOURCE KEY (a) REFERENCES Node (node_id)
        DESTINATION KEY (b) REFERENCES Node (node_id),
    Rel SOURCE KEY (src) REFERENCES Node (node_id)
        DESTINATION KEY (dst) REFERENCES Hub (hub_id)
  );
"""

# edge label -> (source vertex label, destination vertex label)
_EDGE_SIG = {"Link": ("Node", "Node"), "Tie": ("Node", "Node"),
             "Rel": ("Node", "Hub")}

_ATTRS = {"Node": ("node_id", "kind", "score"), "Hub": ("hub_id", "score"),
          "Link": ("link_id", "weight"), "Tie": ("tie_id",), "Rel": ("rel_id",)}


def random_session(seed: int) -> Session:
    """A seeded random graph: at most 190 vertices and 1000 edges.

    Edge counts are capped relative to the vertex count so parallel-edge
    multiplicity stays small; otherwise a 5-edge pattern over a tiny
    dense graph can produce astronomically many homomorphisms.
    """
    rng = random.Random(("graph", seed))
    n_node = rng.randint(4, 150)
    n_hub = rng.randint(1, 40)
    kinds = ("a", "b", "c")
    node_rows = [(i, rng.choice(kinds), rng.randint(0, 9))
                 for i in range(1, n_node + 1)]
    hub_rows = [(i, rng.randint(0, 9)) for i in range(1, n_hub + 1)]

    n_link = rng.randint(0, min(500, 4 * n_node * n_node))
    n_tie = rng.randint(0, min(300, 4 * n_node * n_node))
    n_rel = rng.randint(0, min(200, 4 * n_node * n_hub))
    link_rows = [(i, rng.randint(1, n_node), rng.randint(1, n_node),
                  rng.randint(0, 99)) for i in range(1, n_link + 1)]
    tie_rows = [(i, rng.randint(1, n_node), rng.randint(1, n_node))
                for i in range(1, n_tie + 1)]
    rel_rows = [(i, rng.randint(1, n_node), rng.randint(1, n_hub))
                for i in range(1, n_rel + 1)]

    tables = (
        ("Node", (("node_id", "int64"), ("kind", "string"),
                  ("score", "int64")), node_rows),
        ("Hub", (("hub_id", "int64"), ("score", "int64")), hub_rows),
        ("Link", (("link_id", "int64"), ("src", "int64"), ("dst", "int64"),
                  ("weight", "int64")), link_rows),
        ("Tie", (("tie_id", "int64"), ("a", "int64"), ("b", "int64")),
         tie_rows),
        ("Rel", (("rel_id", "int64"), ("src", "int64"), ("dst", "int64")),
         rel_rows),
    )
    s = Session()
    for name, cols, rows in tables:
        schema = TableSchema(name, tuple(Column(n, t) for n, t in cols))
        s.catalog.register(relation_from_rows(schema, rows))
    s.create_graph_from_ddl(_RANDOM_DDL)
    return s


def _literal(rng: random.Random, label: str, attr: str) -> str:
    if attr == "kind":
        return f"'{rng.choice(('a', 'b', 'c'))}'"
    if attr == "score":
        return str(rng.randint(0, 9))
    if attr == "weight":
        return str(rng.randint(0, 99))
    return str(rng.randint(1, 50))  # an id column


def random_query(rng: random.Random) -> str:
    """A random connected pattern query: <=4 vertices, <=5 edges.

    Spanning tree first, then extra edges (parallels and self-loops
    allowed). Each edge renders in a random form: forward arrow,
    reversed arrow (same meaning), or undirected (matches both
    orientations). Vertex and edge terms occasionally carry equality
    props so constraint handling gets exercised.
    """
    n = rng.randint(1, 4)
    vlab = ["Node" if rng.random() < 0.75 else "Hub"]
    edges: list[tuple[int, int, str]] = []  # stored orientation u -> v
    for i in range(1, n):
        u = rng.randrange(i)
        opts = []
        for lab, (sl, dl) in _EDGE_SIG.items():
            if vlab[u] == sl:
                opts.append((lab, "out"))
            if vlab[u] == dl:
                opts.append((lab, "in"))
        lab, side = rng.choice(opts)
        sl, dl = _EDGE_SIG[lab]
        if side == "out":
            vlab.append(dl)
            edges.append((u, i, lab))
        else:
            vlab.append(sl)
            edges.append((i, u, lab))
    for _ in range(rng.randint(0, 5 - len(edges))):
        u, v = rng.randrange(n), rng.randrange(n)
        opts = [lab for lab, sig in _EDGE_SIG.items()
                if sig == (vlab[u], vlab[v])]
        if not opts:
            u, v = v, u
            opts = [lab for lab, sig in _EDGE_SIG.items()
                    if sig == (vlab[u], vlab[v])]
        if not opts:  # Hub-Hub pair: no edge table connects it
            continue
        edges.append((u, v, rng.choice(opts)))

    labeled: set[int] = set()

    def vterm(i: int) -> str:
        if i in labeled:
            return f"(v{i})"
        labeled.add(i)
        props = ""
        if rng.random() < 0.25:
            attr = rng.choice(_ATTRS[vlab[i]][1:] or _ATTRS[vlab[i]])
            props = f" {{{attr}: {_literal(rng, vlab[i], attr)}}}"
        return f"(v{i}:{vlab[i]}{props})"

    paths = []
    for j, (u, v, lab) in enumerate(edges):
        props = ""
        if lab == "Link" and rng.random() < 0.15:
            props = f" {{weight: {rng.randint(0, 99)}}}"
        ej = f"[e{j}:{lab}{props}]"
        form = rng.choice(("fwd", "rev", "und"))
        if form == "fwd":
            paths.append(f"{vterm(u)}-{ej}->{vterm(v)}")
        elif form == "rev":
            paths.append(f"{vterm(v)}<-{ej}-{vterm(u)}")
        else:
            paths.append(f"{vterm(u)}-{ej}-{vterm(v)}")
    if not paths:
        paths = [vterm(0)]

    mode = rng.choice(("", "", "DISTINCT VERTICES ", "DISTINCT EDGES ",
                       "DISTINCT ALL "))
    elems = [(f"v{i}", vlab[i]) for i in range(n)]
    elems += [(f"e{j}", lab) for j, (_, _, lab) in enumerate(edges)]
    cols = []
    for idx in range(rng.randint(1, 3)):
        var, lab = rng.choice(elems)
        cols.append(f"{var}.{rng.choice(_ATTRS[lab])} AS c{idx}")
    sel = ", ".join(f"g.c{i}" for i in range(len(cols)))
    body = ",\n             ".join(paths)
    return (f"SELECT {sel}\n"
            f"FROM GRAPH_TABLE (rg\n"
            f"       MATCH {mode}{body}\n"
            f"       COLUMNS ({', '.join(cols)})) AS g")


# ---------------------------------------------------------------------------
# the equivalence check itself

def oracle_counter(session: Session, query: str) -> Counter:
    """Row multiset by exhaustive matching, no planner involved."""
    rq = validate(parse_query(query), session.catalog, session.graphs)
    view = session.graphs[rq.graph_name]
    bt = match_bruteforce(view, rq.pattern)
    rows = apply_distinct(rq.pattern, bt.columns, bt.rows)
    names, vals = project_columns(view, BindingTable(bt.columns, rows),
                                  [(c.var, c.attr, c.alias)
                                   for c in rq.columns])
    idx = [names.index(ref.column) for ref, _ in rq.select]
    return Counter(tuple(v[i] for i in idx) for v in vals)


def engine_counter(session: Session, query: str, optimizer: str,
                   use_index: bool, pcat=None, k: int = 2) -> Counter:
    rq = validate(parse_query(query), session.catalog, session.graphs)
    view = session.graphs[rq.graph_name]
    if optimizer == "converged":
        if pcat is None:
            pcat = build_catalog(view, k=k)
        plan = plan_converged(rq, session.catalog, view, pcat,
                              graph_index=use_index)
    else:
        plan = plan_agnostic(rq, session.catalog, view,
                             graph_index=use_index)
    table = execute(plan, ExecEnv(session.catalog, session.graphs,
                                  use_index=use_index))
    return Counter(table.rows())


@dataclass
class SuiteResult:
    cases: int = 0
    failures: list[str] = field(default_factory=list)
    elapsed_s: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.failures


def _flat(query: str) -> str:
    return " ".join(query.split())


def check_case(session: Session, query: str, pcat, name: str,
               failures: list[str]) -> None:
    want = oracle_counter(session, query)
    runs = (("converged+index", "converged", True),
            ("converged-noindex", "converged", False),
            ("agnostic-noindex", "agnostic", False),
            ("agnostic+index", "agnostic", True))
    for tag, opt, ui in runs:
        got = engine_counter(session, query, opt, ui, pcat=pcat)
        if got != want:
            extra = Counter(got)
            extra.subtract(want)
            diff = {k: v for k, v in extra.items() if v}
            sample = dict(list(diff.items())[:3])
            failures.append(
                f"{name} [{tag}]: engine={sum(got.values())} rows, "
                f"oracle={sum(want.values())} rows, diff sample {sample}; "
                f"query: {_flat(query)}")


def run_suite(graphs: int = 20, queries_per_graph: int = 4, seed: int = 0,
              include_fixture: bool = True,
              log: Optional[Callable[[str], None]] = None) -> SuiteResult:
    """Fixture queries plus `graphs` seeded random graphs, each probed
    with `queries_per_graph` random patterns. Catalog k alternates
    between 2 and 3 across graphs."""
    t0 = time.perf_counter()
    res = SuiteResult()
    if include_fixture:
        s = fixture_session()
        pcat = build_catalog(s.graphs["social"], k=3)
        for name, q in FIXTURE_QUERIES:
            check_case(s, q, pcat, f"fixture/{name}", res.failures)
            res.cases += 1
        if log:
            log(f"fixture: {len(FIXTURE_QUERIES)} queries checked")
    for g in range(graphs):
        s = random_session(seed * 1_000_003 + g)
        view = s.graphs["rg"]
        pcat = build_catalog(view, k=2 if g % 2 == 0 else 3)
        rng = random.Random(("query", seed, g))
        before = len(res.failures)
        for qi in range(queries_per_graph):
            q = random_query(rng)
            check_case(s, q, pcat, f"graph{g}/q{qi}", res.failures)
            res.cases += 1
        if log:
            bad = len(res.failures) - before
            log(f"graph {g}: {queries_per_graph} queries, "
                + ("ok" if not bad else f"{bad} FAILED"))
    res.elapsed_s = time.perf_counter() - t0
    return res
