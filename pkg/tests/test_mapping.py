import numpy as np
import pytest

from relgraph.errors import (
    AmbiguousKeyError,
    DanglingEdgeError,
    MappingError,
    UnknownRelationError,
)
from relgraph.mapping import EdgeDecl, ElementId, GraphDecl, create_graph
from relgraph.session import Session
from relgraph.storage import Catalog, Column, TableSchema, relation_from_rows


def make_catalog(edge_rows, person_rows=((1,), (2,), (3,))):
    cat = Catalog()
    cat.register(relation_from_rows(
        TableSchema("P", (Column("pid", "int64"),)), person_rows))
    cat.register(relation_from_rows(
        TableSchema("E", (Column("eid", "int64"), Column("a", "int64"),
                          Column("b", "int64"))), edge_rows))
    return cat


def decl():
    return GraphDecl("g", ("P",), (
        EdgeDecl("E", "a", "P", "pid", "b", "P", "pid"),))


def test_element_id_round_trip():
    e = ElementId("Person", 7)
    assert str(e) == "Person#7"
    assert ElementId.parse("Person#7") == e
    assert ElementId("A", 1) < ElementId("A", 2) < ElementId("B", 0)


def test_endpoint_arrays_and_endpoints():
    view = create_graph(make_catalog([(10, 1, 2), (11, 2, 3), (12, 3, 3)]),
                        decl())
    info = view.edge_info["E"]
    assert list(info.src_rid) == [0, 1, 2]
    assert list(info.dst_rid) == [1, 2, 2]
    assert view.endpoints(ElementId("E", 0)) == (ElementId("P", 0),
                                                 ElementId("P", 1))
    # self-loop maps both ends to the same rid
    assert view.endpoints(ElementId("E", 2)) == (ElementId("P", 2),
                                                 ElementId("P", 2))


def test_dangling_edge_rejected():
    with pytest.raises(DanglingEdgeError) as ei:
        create_graph(make_catalog([(10, 1, 9)]), decl())
    assert ei.value.relation == "E" and ei.value.value == 9


def test_duplicate_key_rejected():
    with pytest.raises(AmbiguousKeyError):
        create_graph(make_catalog([(10, 1, 2)],
                                  person_rows=((1,), (1,), (3,))), decl())


def test_missing_column_and_duplicate_vertex_table():
    bad = GraphDecl("g", ("P",), (
        EdgeDecl("E", "a", "P", "nope", "b", "P", "pid"),))
    with pytest.raises(MappingError):
        create_graph(make_catalog([(10, 1, 2)]), bad)
    with pytest.raises(MappingError):
        create_graph(make_catalog([]), GraphDecl("g", ("P", "P"), ()))


def test_adjacency_against_endpoint_arrays():
    rows = [(10, 1, 2), (11, 1, 3), (12, 2, 1), (13, 3, 3), (14, 1, 2)]
    view = create_graph(make_catalog(rows), decl())
    info = view.edge_info["E"]
    out = view.adjacency("P", "E", "out")
    inn = view.adjacency("P", "E", "in")
    n = view.n_vertices("P")
    assert len(out.offsets) == n + 1 and out.offsets[-1] == len(rows)
    for v in range(n):
        nbrs, eids = out.slice_of(v)
        expect = sorted((int(info.dst_rid[e]), e)
                        for e in range(len(rows)) if info.src_rid[e] == v)
        assert list(zip(nbrs, eids)) == expect
        nbrs, eids = inn.slice_of(v)
        expect = sorted((int(info.src_rid[e]), e)
                        for e in range(len(rows)) if info.dst_rid[e] == v)
        assert list(zip(nbrs, eids)) == expect


def test_either_sorted_counts_self_loop_twice():
    view = create_graph(make_catalog([(10, 3, 3), (11, 1, 3)]), decl())
    both = view.either_sorted("P", "E")
    nbrs, eids = both.slice_of(2)  # vertex pid=3
    # loop edge 0 appears twice (once per direction), edge 1 once
    assert sorted(zip(nbrs, eids)) == [(0, 1), (2, 0), (2, 0)]
    runs = list(zip(nbrs, eids))
    assert runs == sorted(runs)  # sorted by (neighbor, edge)


def test_neighbors_api(social):
    tom = ElementId("Person", 0)
    out = social.neighbors(tom, "Knows", "out")
    assert out == [(ElementId("Knows", 0), ElementId("Person", 1))]
    either = social.neighbors(ElementId("Person", 1), "Knows", "either")
    assert (ElementId("Knows", 0), ElementId("Person", 0)) in either
    assert (ElementId("Knows", 1), ElementId("Person", 2)) in either


def test_session_ddl_and_unknown_graph(fig2):
    assert set(fig2.graphs) == {"social"}
    view = fig2.graphs["social"]
    assert view.vertex_labels == ("Person", "Message")
    assert view.edge_labels == ("Knows", "Likes")
    s = Session()
    with pytest.raises(UnknownRelationError):
        s.create_graph_from_ddl(
            "CREATE PROPERTY GRAPH g VERTEX TABLES (Nope) EDGE TABLES ("
            "E SOURCE KEY (a) REFERENCES Nope (pid)"
            "  DESTINATION KEY (b) REFERENCES Nope (pid));")
