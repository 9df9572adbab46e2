"""Columnar in-memory relations and the catalog that owns them.

Relations are loaded from CSV (comma separator, double-quote quoting,
header row required, UTF-8). Supported column types:

- ``int64``   signed 64-bit integers
- ``string``  arbitrary text
- ``date``    ISO-8601 calendar date, stored as a string and compared
              lexically (which equals chronological order for ISO dates)

Row ids (rids) are dense, 0-based and stable: they are the load order of
the CSV. The catalog is append-only; a relation, once registered, is
never mutated.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    CellTypeError,
    DuplicateRelationError,
    HeaderMismatchError,
    MissingFileError,
    RowOutOfRangeError,
    UnknownRelationError,
)

COLUMN_TYPES = ("int64", "string", "date")

_DATE_RE = re.compile(r"^\d{4}-\d{2}-\d{2}$")


@dataclass(frozen=True)
class Column:
    name: str
    ctype: str  # one of COLUMN_TYPES

    def __post_init__(self):
        if self.ctype not in COLUMN_TYPES:
            raise ValueError(f"unknown column type {self.ctype!r}")

    @property
    def value_kind(self) -> str:
        """The comparison domain: dates degrade to strings."""
        return "int64" if self.ctype == "int64" else "string"


@dataclass(frozen=True)
class TableSchema:
    name: str
    columns: tuple[Column, ...]

    def __post_init__(self):
        names = [c.name for c in self.columns]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate column names in schema {self.name!r}")

    def column(self, name: str) -> Column:
        for c in self.columns:
            if c.name == name:
                return c
        raise KeyError(name)

    def has_column(self, name: str) -> bool:
        return any(c.name == name for c in self.columns)

    @property
    def column_names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.columns)


class Relation:
    """One immutable table. Columns are numpy arrays: int64 for integers,
    object arrays of str for string/date columns."""

    def __init__(self, schema: TableSchema, columns: dict[str, np.ndarray]):
        self.schema = schema
        self._cols = columns
        lengths = {len(a) for a in columns.values()}
        if len(lengths) > 1:
            raise ValueError("ragged columns")
        self.n_rows = lengths.pop() if lengths else 0

    @property
    def name(self) -> str:
        return self.schema.name

    def column(self, name: str) -> np.ndarray:
        return self._cols[name]

    def row(self, rid: int) -> tuple:
        if not (0 <= rid < self.n_rows):
            raise RowOutOfRangeError(
                f"rid {rid} out of range for {self.name!r} ({self.n_rows} rows)"
            )
        out = []
        for c in self.schema.columns:
            v = self._cols[c.name][rid]
            out.append(int(v) if c.ctype == "int64" else str(v))
        return tuple(out)

    def iter_rows(self) -> Iterable[tuple]:
        for rid in range(self.n_rows):
            yield self.row(rid)


def _parse_cell(raw: str, col: Column, row_no: int) -> object:
    if col.ctype == "int64":
        try:
            return int(raw)
        except ValueError:
            raise CellTypeError(row_no, col.name, f"not an int64: {raw!r}") from None
    if col.ctype == "date":
        if not _DATE_RE.match(raw):
            raise CellTypeError(row_no, col.name, f"not an ISO-8601 date: {raw!r}")
        return raw
    return raw


def relation_from_rows(schema: TableSchema, rows: Sequence[Sequence]) -> Relation:
    """Build a relation from already-typed python rows (tests, generators)."""
    cols: dict[str, np.ndarray] = {}
    for i, c in enumerate(schema.columns):
        vals = [r[i] for r in rows]
        if c.ctype == "int64":
            cols[c.name] = np.asarray(vals, dtype=np.int64)
        else:
            cols[c.name] = np.asarray([str(v) for v in vals], dtype=object)
    return Relation(schema, cols)


def load_csv(path: str | Path, schema: TableSchema) -> Relation:
    """Load a CSV file against a declared schema.

    The header must match the schema's column names exactly (same order).
    """
    path = Path(path)
    if not path.is_file():
        raise MissingFileError(f"no such file: {path}")
    with path.open(newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        try:
            header = next(reader)
        except StopIteration:
            raise HeaderMismatchError(f"{path}: empty file, header required") from None
        if tuple(header) != schema.column_names:
            raise HeaderMismatchError(
                f"{path}: header {header!r} does not match schema "
                f"{list(schema.column_names)!r}"
            )
        raw_cols: list[list] = [[] for _ in schema.columns]
        for row_no, row in enumerate(reader, start=1):
            if len(row) != len(schema.columns):
                raise CellTypeError(
                    row_no, schema.columns[min(len(row), len(schema.columns) - 1)].name,
                    f"expected {len(schema.columns)} cells, got {len(row)}",
                )
            for i, col in enumerate(schema.columns):
                raw_cols[i].append(_parse_cell(row[i], col, row_no))
    cols: dict[str, np.ndarray] = {}
    for i, col in enumerate(schema.columns):
        if col.ctype == "int64":
            cols[col.name] = np.asarray(raw_cols[i], dtype=np.int64)
        else:
            cols[col.name] = np.asarray(raw_cols[i], dtype=object)
    return Relation(schema, cols)


def export_csv(rel: Relation, path: str | Path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(rel.schema.column_names)
        for row in rel.iter_rows():
            writer.writerow(row)


class Catalog:
    """Append-only registry of named relations."""

    def __init__(self):
        self._relations: dict[str, Relation] = {}

    def register(self, rel: Relation) -> None:
        if rel.name in self._relations:
            raise DuplicateRelationError(f"relation {rel.name!r} already registered")
        self._relations[rel.name] = rel

    def load_csv(self, name: str, path: str | Path, columns: Sequence[tuple[str, str]]) -> Relation:
        schema = TableSchema(name, tuple(Column(n, t) for n, t in columns))
        rel = load_csv(path, schema)
        self.register(rel)
        return rel

    def has_relation(self, name: str) -> bool:
        return name in self._relations

    def get_relation(self, name: str) -> Relation:
        try:
            return self._relations[name]
        except KeyError:
            raise UnknownRelationError(f"unknown relation {name!r}") from None

    def fetch_row(self, name: str, rid: int) -> tuple:
        return self.get_relation(name).row(rid)

    @property
    def relation_names(self) -> list[str]:
        return list(self._relations)
