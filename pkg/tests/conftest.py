import pathlib

import pytest

from relgraph.graphopt import build_catalog
from relgraph.session import load_manifest

DATA = pathlib.Path(__file__).parent / "data"
GOLDEN = pathlib.Path(__file__).parent / "golden"

TRIANGLE_Q = """
SELECT g.p_name, g.q_name, g.content
FROM GRAPH_TABLE (social
       MATCH (p:Person)-[k:Knows]->(q:Person),
             (p)-[l1:Likes]->(m:Message),
             (q)-[l2:Likes]->(m)
       COLUMNS (p.name AS p_name, q.name AS q_name, m.content AS content)) AS g
"""


@pytest.fixture(scope="session")
def fig2():
    return load_manifest(DATA / "fig2" / "manifest.json")


@pytest.fixture(scope="session")
def social(fig2):
    return fig2.graphs["social"]


@pytest.fixture(scope="session")
def pcat3(social):
    return build_catalog(social, k=3)


@pytest.fixture(scope="session")
def gen300(tmp_path_factory):
    """A 300-person generated dataset shared by index/engine tests."""
    out = tmp_path_factory.mktemp("gen300")
    from relgraph.datagen import generate

    generate(out, persons=300, knows_degree=4.0, skew=0.5,
             triangle_closing=0.3, cliques=2, seed=7)
    return load_manifest(out / "manifest.json")
