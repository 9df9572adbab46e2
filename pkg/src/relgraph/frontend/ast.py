"""Syntax tree for the query dialect.

Nodes compare by content; source positions ride along for error messages
but are excluded from equality so parse(pretty(x)) == x can hold.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union


@dataclass(frozen=True)
class Pos:
    line: int
    col: int


def _pos_field():
    return field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Const:
    value: Union[int, str]
    pos: Optional[Pos] = _pos_field()

    @property
    def kind(self) -> str:
        return "int64" if isinstance(self.value, int) else "string"


@dataclass(frozen=True)
class ColRef:
    """qualifier.name, or a bare name when qualifier is None."""

    qualifier: Optional[str]
    name: str
    pos: Optional[Pos] = _pos_field()

    def describe(self) -> str:
        return f"{self.qualifier}.{self.name}" if self.qualifier else self.name


Operand = Union[ColRef, Const]


@dataclass(frozen=True)
class Comparison:
    left: Operand
    op: str  # = <> < <= > >=
    right: Operand
    pos: Optional[Pos] = _pos_field()


@dataclass(frozen=True)
class VertexTerm:
    var: str
    label: Optional[str]  # None = re-reference of an earlier vertex
    props: tuple[tuple[str, Const], ...] = ()
    pos: Optional[Pos] = _pos_field()


@dataclass(frozen=True)
class EdgeTerm:
    var: Optional[str]  # None = anonymous
    label: str
    arrow: str  # "right" (->), "left" (<-), "none" (undirected)
    props: tuple[tuple[str, Const], ...] = ()
    pos: Optional[Pos] = _pos_field()


@dataclass(frozen=True)
class PathExpr:
    first: VertexTerm
    steps: tuple[tuple[EdgeTerm, VertexTerm], ...]


@dataclass(frozen=True)
class MatchClause:
    distinct: str  # none | vertices | edges | all
    paths: tuple[PathExpr, ...]


@dataclass(frozen=True)
class ColumnItem:
    var: str
    attr: str  # attribute name, or pseudo "ID" / "LABEL"
    alias: str
    pos: Optional[Pos] = _pos_field()


@dataclass(frozen=True)
class GraphTableClause:
    graph: str
    match: MatchClause
    columns: tuple[ColumnItem, ...]
    alias: str
    pos: Optional[Pos] = _pos_field()


@dataclass(frozen=True)
class BaseTableRef:
    table: str
    alias: str
    pos: Optional[Pos] = _pos_field()


FromItem = Union[BaseTableRef, GraphTableClause]


@dataclass(frozen=True)
class JoinSpec:
    table: BaseTableRef
    conds: tuple[Comparison, ...]


@dataclass(frozen=True)
class SelectItem:
    ref: ColRef
    alias: Optional[str]


@dataclass(frozen=True)
class SelectQuery:
    items: tuple[SelectItem, ...]
    from_items: tuple[FromItem, ...]
    joins: tuple[JoinSpec, ...] = ()
    where: tuple[Comparison, ...] = ()


@dataclass(frozen=True)
class EdgeTableClause:
    relation: str
    src_key: str
    src_table: str
    src_ref_key: str
    dst_key: str
    dst_table: str
    dst_ref_key: str


@dataclass(frozen=True)
class CreatePropertyGraph:
    name: str
    vertex_tables: tuple[str, ...]
    edge_tables: tuple[EdgeTableClause, ...]


Statement = Union[SelectQuery, CreatePropertyGraph]
