import numpy as np
import pytest

from relgraph.errors import (
    CellTypeError,
    DuplicateRelationError,
    HeaderMismatchError,
    MissingFileError,
    RowOutOfRangeError,
    UnknownRelationError,
)
from relgraph.storage import (
    Catalog,
    Column,
    Relation,
    TableSchema,
    export_csv,
    load_csv,
    relation_from_rows,
)

SCHEMA = TableSchema("T", (Column("id", "int64"), Column("name", "string"),
                           Column("d", "date")))


def write(tmp_path, text):
    p = tmp_path / "t.csv"
    p.write_text(text)
    return p


def test_load_and_types(tmp_path):
    rel = load_csv(write(tmp_path, "id,name,d\n1,a,2024-01-01\n2,b,2024-02-03\n"),
                   SCHEMA)
    assert rel.n_rows == 2
    assert rel.column("id").dtype == np.int64
    assert rel.column("name").dtype == object
    assert rel.row(1) == (2, "b", "2024-02-03")
    assert list(rel.iter_rows()) == [(1, "a", "2024-01-01"),
                                     (2, "b", "2024-02-03")]


def test_empty_file_is_empty_relation(tmp_path):
    rel = load_csv(write(tmp_path, "id,name,d\n"), SCHEMA)
    assert rel.n_rows == 0 and len(rel.column("id")) == 0


def test_missing_file(tmp_path):
    with pytest.raises(MissingFileError):
        load_csv(tmp_path / "nope.csv", SCHEMA)


def test_header_mismatch(tmp_path):
    with pytest.raises(HeaderMismatchError):
        load_csv(write(tmp_path, "id,wrong,d\n"), SCHEMA)


def test_cell_type_error_carries_position(tmp_path):
    with pytest.raises(CellTypeError) as ei:
        load_csv(write(tmp_path, "id,name,d\n1,a,2024-01-01\nx,b,2024-01-02\n"),
                 SCHEMA)
    assert ei.value.row == 2 and ei.value.column == "id"


def test_row_out_of_range(tmp_path):
    rel = load_csv(write(tmp_path, "id,name,d\n1,a,2024-01-01\n"), SCHEMA)
    with pytest.raises(RowOutOfRangeError):
        rel.row(1)
    with pytest.raises(RowOutOfRangeError):
        rel.row(-1)


def test_export_round_trip(tmp_path):
    rel = relation_from_rows(SCHEMA, [(3, "x,y", "2024-05-05"),
                                      (4, 'quo"te', "2024-06-06")])
    out = tmp_path / "out.csv"
    export_csv(rel, out)
    again = load_csv(out, SCHEMA)
    assert list(again.iter_rows()) == list(rel.iter_rows())


def test_catalog_register_and_errors(tmp_path):
    cat = Catalog()
    rel = relation_from_rows(SCHEMA, [(1, "a", "2024-01-01")])
    cat.register(rel)
    assert cat.has_relation("T") and not cat.has_relation("U")
    assert cat.get_relation("T") is rel
    assert cat.fetch_row("T", 0) == (1, "a", "2024-01-01")
    assert cat.relation_names == ["T"]
    with pytest.raises(DuplicateRelationError):
        cat.register(Relation(SCHEMA, {c: rel.column(c)
                                       for c in SCHEMA.column_names}))
    with pytest.raises(UnknownRelationError):
        cat.get_relation("U")


def test_schema_rejects_bad_type_and_dup_columns():
    with pytest.raises(ValueError):
        Column("x", "float32")
    with pytest.raises(Exception):
        TableSchema("T", (Column("a", "int64"), Column("a", "int64")))
