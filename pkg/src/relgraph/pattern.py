"""Graph pattern model shared by the parser, the matcher and both planners.

A pattern is a small labeled multigraph over variables. Vertex and edge
variables share one namespace; labels name the backing relations. Edges
are either directed (src -> dst) or undirected, in which case a match may
bind the edge in either orientation.

Constraints are per-variable conjunctive comparisons against literals
(or another attribute of the same variable); anything wider stays in the
enclosing query's WHERE clause.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from itertools import combinations
from typing import Iterable, Literal, Optional

DISTINCT_MODES = ("none", "vertices", "edges", "all")

CompareOp = Literal["=", "<>", "<", "<=", ">", ">="]


@dataclass(frozen=True)
class Constraint:
    """var.attr <op> value, or var.attr <op> var.other_attr (same variable)."""

    var: str
    attr: str
    op: str
    value: object = None
    rhs_attr: Optional[str] = None  # set for attr-vs-attr form

    def describe(self) -> str:
        rhs = f".{self.rhs_attr}" if self.rhs_attr is not None else repr(self.value)
        return f"{self.var}.{self.attr} {self.op} {rhs}"


@dataclass(frozen=True)
class PatternEdge:
    var: str
    label: str
    src: str
    dst: str
    directed: bool = True

    def other(self, v: str) -> str:
        return self.dst if v == self.src else self.src

    def touches(self, v: str) -> bool:
        return v == self.src or v == self.dst

    def is_loop(self) -> bool:
        return self.src == self.dst


@dataclass(frozen=True)
class Pattern:
    """vertices maps variable -> label, in declaration order."""

    vertices: tuple[tuple[str, str], ...]
    edges: tuple[PatternEdge, ...]
    constraints: tuple[Constraint, ...] = ()
    distinct: str = "none"

    def __post_init__(self):
        if self.distinct not in DISTINCT_MODES:
            raise ValueError(f"bad distinct mode {self.distinct!r}")
        vnames = [v for v, _ in self.vertices]
        if len(set(vnames)) != len(vnames):
            raise ValueError("duplicate vertex variable")
        enames = [e.var for e in self.edges]
        names = vnames + enames
        if len(set(names)) != len(names):
            raise ValueError("vertex and edge variables must be distinct")

    # -- lookups ------------------------------------------------------------

    @property
    def vertex_vars(self) -> tuple[str, ...]:
        return tuple(v for v, _ in self.vertices)

    @property
    def edge_vars(self) -> tuple[str, ...]:
        return tuple(e.var for e in self.edges)

    def vertex_label(self, var: str) -> str:
        for v, lab in self.vertices:
            if v == var:
                return lab
        raise KeyError(var)

    def edge(self, var: str) -> PatternEdge:
        for e in self.edges:
            if e.var == var:
                return e
        raise KeyError(var)

    def var_label(self, var: str) -> str:
        for v, lab in self.vertices:
            if v == var:
                return lab
        return self.edge(var).label

    def is_vertex(self, var: str) -> bool:
        return any(v == var for v, _ in self.vertices)

    def constraints_on(self, var: str) -> tuple[Constraint, ...]:
        return tuple(c for c in self.constraints if c.var == var)

    def edges_at(self, var: str) -> tuple[PatternEdge, ...]:
        return tuple(e for e in self.edges if e.touches(var))

    def edges_between(self, a: str, b: str) -> tuple[PatternEdge, ...]:
        return tuple(
            e for e in self.edges
            if (e.src == a and e.dst == b) or (e.src == b and e.dst == a)
        )

    # -- structure ----------------------------------------------------------

    def neighbors_of(self, var: str) -> set[str]:
        out: set[str] = set()
        for e in self.edges:
            if e.src == var and e.dst != var:
                out.add(e.dst)
            elif e.dst == var and e.src != var:
                out.add(e.src)
        return out

    def is_connected(self, subset: Optional[Iterable[str]] = None) -> bool:
        verts = set(subset) if subset is not None else set(self.vertex_vars)
        if not verts:
            return False
        start = next(iter(sorted(verts)))
        seen = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for u in self.neighbors_of(v):
                if u in verts and u not in seen:
                    seen.add(u)
                    stack.append(u)
        return seen == verts

    def induced(self, subset: Iterable[str]) -> "Pattern":
        """Sub-pattern on a vertex subset with every edge whose endpoints
        both lie inside (self-loops included)."""
        verts = set(subset)
        vs = tuple((v, lab) for v, lab in self.vertices if v in verts)
        es = tuple(e for e in self.edges if e.src in verts and e.dst in verts)
        cons = tuple(
            c for c in self.constraints
            if c.var in verts or any(e.var == c.var for e in es)
        )
        return Pattern(vs, es, cons, self.distinct)

    def without_constraints(self) -> "Pattern":
        return replace(self, constraints=(), distinct="none")

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def describe(self) -> str:
        parts = [f"({v}:{lab})" for v, lab in self.vertices]
        for e in self.edges:
            arrow = "->" if e.directed else "-"
            parts.append(f"{e.src}-[{e.var}:{e.label}]{arrow}{e.dst}")
        return " ".join(parts)


def single_vertex(var: str, label: str) -> Pattern:
    return Pattern(((var, label),), ())


def repeated_element_pairs(p: Pattern) -> list[tuple[str, str]]:
    """Variable pairs the distinct mode forces apart: same-label vertex
    pairs and/or same-label edge pairs, by declaration order."""
    pairs: list[tuple[str, str]] = []
    if p.distinct in ("vertices", "all"):
        for a, b in combinations(p.vertex_vars, 2):
            if p.vertex_label(a) == p.vertex_label(b):
                pairs.append((a, b))
    if p.distinct in ("edges", "all"):
        for e1, e2 in combinations(p.edges, 2):
            if e1.label == e2.label:
                pairs.append((e1.var, e2.var))
    return pairs
