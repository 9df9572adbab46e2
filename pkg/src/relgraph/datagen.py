"""Seeded generator for a social micro-dataset at any scale.

Emits the same five relations as the bundled fixture (Person, Message,
Place, Likes, Knows), a manifest, and the graph DDL, so a generated
directory loads exactly like the fixture. Properties the tests lean on:

* byte-identical output for the same arguments and seed;
* every edge key references an existing row (loads with no dangling
  edges by construction);
* person degrees follow a power-law-ish skew (rank weights 1/rank^skew
  over a shuffled rank assignment, so ids do not encode degree);
* a triangle-closing pass turns open wedges into triangles, and any
  positive closing parameter guarantees at least one Knows triangle;
* optionally plants 4-cliques of Knows edges (oriented low id -> high
  id) so small dense subgraphs exist at any scale.
"""

from __future__ import annotations

import csv
import json
import random
from itertools import accumulate, combinations
from pathlib import Path

DDL = """CREATE PROPERTY GRAPH social
  VERTEX TABLES (Person, Message)
  EDGE TABLES (
    Knows SOURCE KEY (pid1) REFERENCES Person (person_id)
          DESTINATION KEY (pid2) REFERENCES Person (person_id),
    Likes SOURCE KEY (pid) REFERENCES Person (person_id)
          DESTINATION KEY (mid) REFERENCES Message (message_id)
  );
"""

MANIFEST = {
    "relations": [
        {"name": "Person", "path": "person.csv",
         "columns": [["person_id", "int64"], ["name", "string"],
                     ["place_id", "int64"]]},
        {"name": "Message", "path": "message.csv",
         "columns": [["message_id", "int64"], ["content", "string"]]},
        {"name": "Place", "path": "place.csv",
         "columns": [["place_id", "int64"], ["pl_name", "string"]]},
        {"name": "Likes", "path": "likes.csv",
         "columns": [["likes_id", "int64"], ["pid", "int64"],
                     ["mid", "int64"], ["date", "date"]]},
        {"name": "Knows", "path": "knows.csv",
         "columns": [["knows_id", "int64"], ["pid1", "int64"],
                     ["pid2", "int64"], ["date", "date"]]},
    ],
    "graphs": ["social.ddl"],
}


def _date(rng: random.Random) -> str:
    return f"2024-{rng.randint(1, 12):02d}-{rng.randint(1, 28):02d}"


def _write_csv(path: Path, header: list[str], rows: list) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def generate(out_dir: str | Path, persons: int = 1000, *,
             places: int | None = None, messages: int | None = None,
             knows_degree: float = 6.0, likes_degree: float = 3.0,
             skew: float = 0.8, triangle_closing: float = 0.3,
             cliques: int = 0, seed: int = 42) -> dict:
    """Write the dataset into out_dir and return summary counts.

    knows_degree / likes_degree are average edges per person; skew is
    the power-law exponent for endpoint selection; triangle_closing
    scales how many wedge-closing Knows edges are attempted on top of
    the base edges; cliques plants that many Knows 4-cliques.
    """
    if persons < 1:
        raise ValueError("persons must be positive")
    if cliques and persons < 4:
        raise ValueError("cliques need at least four persons")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = random.Random(seed)
    n_place = max(1, persons // 50) if places is None else max(1, places)
    n_msg = persons if messages is None else max(1, messages)

    ranks = list(range(1, persons + 1))
    rng.shuffle(ranks)
    cum = list(accumulate(r ** -skew for r in ranks))

    def pick() -> int:
        return rng.choices(range(persons), cum_weights=cum)[0]

    person_rows = [[i + 1, f"person{i + 1}", rng.randrange(n_place) + 1]
                   for i in range(persons)]
    place_rows = [[j + 1, f"city{j + 1}"] for j in range(n_place)]
    message_rows = [[k + 1, f"post {k + 1}"] for k in range(n_msg)]

    # base Knows edges, unique (src, dst) pairs, no self-edges
    pairs: set[tuple[int, int]] = set()
    knows_rows: list = []
    adj: dict[int, set[int]] = {}

    def add_knows(u: int, v: int) -> bool:
        if u == v or (u, v) in pairs:
            return False
        pairs.add((u, v))
        knows_rows.append([len(knows_rows) + 1, u + 1, v + 1, _date(rng)])
        adj.setdefault(u, set()).add(v)
        adj.setdefault(v, set()).add(u)
        return True

    target = int(persons * knows_degree)
    attempts = 0
    while len(knows_rows) < target and attempts < 10 * target + 100:
        attempts += 1
        add_knows(pick(), pick())

    # close open wedges u-v, u-w into triangles
    closures = 0
    if triangle_closing > 0:
        base = len(knows_rows)
        for _ in range(int(base * triangle_closing) + 1):
            u = pick()
            nbrs = sorted(adj.get(u, ()))
            if len(nbrs) < 2:
                continue
            v, w = rng.sample(nbrs, 2)
            if (v, w) in pairs or (w, v) in pairs:
                continue
            if add_knows(v, w):
                closures += 1
        if closures == 0 and persons >= 3:
            # tiny or sparse graphs may close nothing by chance; the
            # contract is at least one triangle whenever closing > 0
            for a, b in ((0, 1), (1, 2), (0, 2)):
                if (a, b) not in pairs and (b, a) not in pairs:
                    add_knows(a, b)
                    closures += 1

    planted = 0
    for _ in range(cliques):
        members = sorted(rng.sample(range(persons), 4))
        for a, b in combinations(members, 2):
            if (a, b) not in pairs and (b, a) not in pairs:
                add_knows(a, b)
        planted += 1

    # Likes, unique (person, message) pairs
    liked: set[tuple[int, int]] = set()
    likes_rows: list = []
    target = int(persons * likes_degree)
    attempts = 0
    while len(likes_rows) < target and attempts < 10 * target + 100:
        attempts += 1
        u, m = pick(), rng.randrange(n_msg)
        if (u, m) in liked:
            continue
        liked.add((u, m))
        likes_rows.append([len(likes_rows) + 1, u + 1, m + 1, _date(rng)])

    _write_csv(out / "person.csv", ["person_id", "name", "place_id"],
               person_rows)
    _write_csv(out / "place.csv", ["place_id", "pl_name"], place_rows)
    _write_csv(out / "message.csv", ["message_id", "content"], message_rows)
    _write_csv(out / "knows.csv", ["knows_id", "pid1", "pid2", "date"],
               knows_rows)
    _write_csv(out / "likes.csv", ["likes_id", "pid", "mid", "date"],
               likes_rows)
    (out / "social.ddl").write_text(DDL)
    (out / "manifest.json").write_text(
        json.dumps(MANIFEST, indent=2) + "\n")

    return {
        "persons": persons,
        "places": n_place,
        "messages": n_msg,
        "knows": len(knows_rows),
        "likes": len(likes_rows),
        "closures": closures,
        "cliques": planted,
        "seed": seed,
        "out_dir": str(out),
    }
