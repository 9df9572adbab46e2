"""Property-graph views over relations.

A graph declaration names vertex tables and edge tables; each edge table
carries two key clauses mapping its rows onto source and destination
vertex rows. Labels are simply the relation names. Building a view
validates the mapping and materializes two index families:

- endpoint index: edge rid -> (source vertex rid, destination vertex rid),
  one O(1) array pair per edge label;
- adjacency index: CSR lists per (vertex label, edge label, direction),
  each vertex's list sorted by (neighbor rid, edge rid). With direction
  "either" a lookup concatenates out then in, without deduplication, so a
  self-loop appears twice.

Totality is enforced at build time: every edge row must hit exactly one
vertex row on each side (DanglingEdgeError otherwise), and referenced key
columns must be duplicate-free (AmbiguousKeyError).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import total_ordering
from typing import Optional

import numpy as np

from .errors import (
    AmbiguousKeyError,
    DanglingEdgeError,
    MappingError,
    UnknownRelationError,
)
from .storage import Catalog, Relation


@total_ordering
@dataclass(frozen=True)
class ElementId:
    """Canonical identity of a graph element: (label, rid)."""

    label: str
    rid: int

    def __str__(self) -> str:
        return f"{self.label}#{self.rid}"

    def __lt__(self, other: "ElementId") -> bool:
        return (self.label, self.rid) < (other.label, other.rid)

    @staticmethod
    def parse(text: str) -> "ElementId":
        label, _, rid = text.rpartition("#")
        return ElementId(label, int(rid))


@dataclass(frozen=True)
class EdgeDecl:
    relation: str
    src_key: str
    src_table: str
    src_ref_key: str
    dst_key: str
    dst_table: str
    dst_ref_key: str


@dataclass(frozen=True)
class GraphDecl:
    name: str
    vertex_tables: tuple[str, ...]
    edges: tuple[EdgeDecl, ...]


@dataclass
class Csr:
    """Compressed adjacency: vertex rid -> slice of (neighbor, edge) pairs."""

    offsets: np.ndarray  # int64, len = n_vertices + 1
    neighbors: np.ndarray  # int64
    edges: np.ndarray  # int64

    def slice_of(self, rid: int) -> tuple[np.ndarray, np.ndarray]:
        lo, hi = self.offsets[rid], self.offsets[rid + 1]
        return self.neighbors[lo:hi], self.edges[lo:hi]


@dataclass
class EdgeInfo:
    decl: EdgeDecl
    src_rid: np.ndarray  # edge rid -> source vertex rid
    dst_rid: np.ndarray  # edge rid -> destination vertex rid

    @property
    def src_label(self) -> str:
        return self.decl.src_table

    @property
    def dst_label(self) -> str:
        return self.decl.dst_table


def _key_to_rid(vertex_rel: Relation, key: str, edge_rel: Relation,
                edge_key: str, endpoint: str) -> np.ndarray:
    """Map each edge row's key value to the unique matching vertex rid."""
    vcol = vertex_rel.column(key)
    ecol = edge_rel.column(edge_key)
    if vcol.dtype == np.int64:
        order = np.argsort(vcol, kind="stable")
        svals = vcol[order]
        dup = np.nonzero(svals[1:] == svals[:-1])[0]
        if dup.size:
            raise AmbiguousKeyError(
                f"vertex table {vertex_rel.name!r} key {key!r} has duplicate "
                f"value {int(svals[dup[0]])!r}"
            )
        if len(svals) == 0:
            if len(ecol):
                raise DanglingEdgeError(edge_rel.name, 0, endpoint, ecol[0])
            return np.empty(0, dtype=np.int64)
        idx = np.searchsorted(svals, ecol)
        idx_c = np.clip(idx, 0, len(svals) - 1)
        ok = (idx < len(svals)) & (svals[idx_c] == ecol)
        if not np.all(ok):
            bad = int(np.nonzero(~ok)[0][0])
            raise DanglingEdgeError(edge_rel.name, bad, endpoint, ecol[bad])
        return order[idx_c].astype(np.int64)
    # string keys: plain dict
    mapping: dict = {}
    for rid, v in enumerate(vcol):
        if v in mapping:
            raise AmbiguousKeyError(
                f"vertex table {vertex_rel.name!r} key {key!r} has duplicate "
                f"value {v!r}"
            )
        mapping[v] = rid
    out = np.empty(len(ecol), dtype=np.int64)
    for i, v in enumerate(ecol):
        rid = mapping.get(v)
        if rid is None:
            raise DanglingEdgeError(edge_rel.name, i, endpoint, v)
        out[i] = rid
    return out


def _build_csr(n_vertices: int, anchor: np.ndarray, nbr: np.ndarray,
               eid: np.ndarray) -> Csr:
    order = np.lexsort((eid, nbr, anchor))
    anchor, nbr, eid = anchor[order], nbr[order], eid[order]
    counts = np.bincount(anchor, minlength=n_vertices)
    offsets = np.zeros(n_vertices + 1, dtype=np.int64)
    np.cumsum(counts, out=offsets[1:])
    return Csr(offsets, nbr.astype(np.int64), eid.astype(np.int64))


class GraphView:
    """A validated property-graph view plus its indexes."""

    def __init__(self, catalog: Catalog, decl: GraphDecl):
        self.catalog = catalog
        self.decl = decl
        self.name = decl.name
        self.vertex_labels: tuple[str, ...] = decl.vertex_tables
        self.edge_labels: tuple[str, ...] = tuple(e.relation for e in decl.edges)
        self.edge_info: dict[str, EdgeInfo] = {}
        self._adjacency: dict[tuple[str, str, str], Csr] = {}
        self._either_sorted: dict[tuple[str, str], Csr] = {}
        self._validate_and_build()

    # -- construction ---------------------------------------------------

    def _validate_and_build(self) -> None:
        seen: set[str] = set()
        for t in self.vertex_labels:
            if t in seen:
                raise MappingError(f"vertex table {t!r} declared twice")
            seen.add(t)
            self.catalog.get_relation(t)
        for e in self.decl.edges:
            if e.relation in seen:
                raise MappingError(
                    f"label {e.relation!r} used as both vertex and edge table"
                )
            seen.add(e.relation)
            edge_rel = self.catalog.get_relation(e.relation)
            for tbl, key in ((e.src_table, e.src_ref_key), (e.dst_table, e.dst_ref_key)):
                if tbl not in self.vertex_labels:
                    raise MappingError(
                        f"edge {e.relation!r} references {tbl!r}, which is not a "
                        f"vertex table of graph {self.name!r}"
                    )
                if not self.catalog.get_relation(tbl).schema.has_column(key):
                    raise MappingError(f"{tbl!r} has no column {key!r}")
            for key in (e.src_key, e.dst_key):
                if not edge_rel.schema.has_column(key):
                    raise MappingError(f"{e.relation!r} has no column {key!r}")
            src_rel = self.catalog.get_relation(e.src_table)
            dst_rel = self.catalog.get_relation(e.dst_table)
            src_rid = _key_to_rid(src_rel, e.src_ref_key, edge_rel, e.src_key, "source")
            dst_rid = _key_to_rid(dst_rel, e.dst_ref_key, edge_rel, e.dst_key, "destination")
            self.edge_info[e.relation] = EdgeInfo(e, src_rid, dst_rid)

        for elabel, info in self.edge_info.items():
            n_edges = len(info.src_rid)
            eids = np.arange(n_edges, dtype=np.int64)
            n_src = self.catalog.get_relation(info.src_label).n_rows
            n_dst = self.catalog.get_relation(info.dst_label).n_rows
            self._adjacency[(info.src_label, elabel, "out")] = _build_csr(
                n_src, info.src_rid, info.dst_rid, eids
            )
            self._adjacency[(info.dst_label, elabel, "in")] = _build_csr(
                n_dst, info.dst_rid, info.src_rid, eids
            )

    # -- lookups ----------------------------------------------------------

    def n_vertices(self, label: str) -> int:
        return self.catalog.get_relation(label).n_rows

    def n_edges(self, label: str) -> int:
        return self.catalog.get_relation(label).n_rows

    def adjacency(self, vlabel: str, elabel: str, direction: str) -> Csr:
        """CSR for one (vertex label, edge label, direction) triple.

        direction "out"/"in" only; triples with no such edges yield an
        empty CSR. "either" is served by either_sorted / neighbors.
        """
        csr = self._adjacency.get((vlabel, elabel, direction))
        if csr is None:
            n = self.n_vertices(vlabel)
            csr = Csr(np.zeros(n + 1, dtype=np.int64),
                      np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64))
            self._adjacency[(vlabel, elabel, direction)] = csr
        return csr

    def either_sorted(self, vlabel: str, elabel: str) -> Csr:
        """Out and in lists merged and re-sorted by (neighbor, edge); used by
        intersection legs which need a single sorted run per vertex."""
        key = (vlabel, elabel)
        csr = self._either_sorted.get(key)
        if csr is not None:
            return csr
        out = self.adjacency(vlabel, elabel, "out")
        inn = self.adjacency(vlabel, elabel, "in")
        n = self.n_vertices(vlabel)
        counts = (out.offsets[1:] - out.offsets[:-1]) + (inn.offsets[1:] - inn.offsets[:-1])
        anchor = np.repeat(np.arange(n, dtype=np.int64), counts)
        nbr = np.empty(len(anchor), dtype=np.int64)
        eid = np.empty(len(anchor), dtype=np.int64)
        pos = 0
        for v in range(n):
            for csr_part in (out, inn):
                lo, hi = csr_part.offsets[v], csr_part.offsets[v + 1]
                k = int(hi - lo)
                nbr[pos:pos + k] = csr_part.neighbors[lo:hi]
                eid[pos:pos + k] = csr_part.edges[lo:hi]
                pos += k
        csr = _build_csr(n, anchor, nbr, eid)
        self._either_sorted[key] = csr
        return csr

    def neighbors(self, v: ElementId, elabel: Optional[str] = None,
                  direction: str = "out") -> list[tuple[ElementId, ElementId]]:
        """Adjacent (edge, vertex) pairs of v.

        Per direction the pairs are sorted by (edge label, neighbor rid,
        edge rid); "either" is the out list followed by the in list, no
        dedup, so a self-loop shows up once per direction.
        """
        if direction == "either":
            return (self.neighbors(v, elabel, "out")
                    + self.neighbors(v, elabel, "in"))
        labels = [elabel] if elabel is not None else sorted(self.edge_labels)
        out: list[tuple[ElementId, ElementId]] = []
        for el in labels:
            info = self.edge_info.get(el)
            if info is None:
                continue
            anchor_label = info.src_label if direction == "out" else info.dst_label
            if anchor_label != v.label:
                continue
            nbr_label = info.dst_label if direction == "out" else info.src_label
            csr = self.adjacency(v.label, el, direction)
            nbrs, eids = csr.slice_of(v.rid)
            out.extend(
                (ElementId(el, int(e)), ElementId(nbr_label, int(n)))
                for n, e in zip(nbrs, eids)
            )
        return out

    def endpoints(self, e: ElementId) -> tuple[ElementId, ElementId]:
        info = self.edge_info[e.label]
        return (
            ElementId(info.src_label, int(info.src_rid[e.rid])),
            ElementId(info.dst_label, int(info.dst_rid[e.rid])),
        )

    # -- statistics -------------------------------------------------------

    def avg_degree(self, vlabel: str, elabel: str, direction: str) -> float:
        """Mean adjacency-list length over vertices of vlabel. "either"
        sums both directions."""
        if direction == "either":
            return (self.avg_degree(vlabel, elabel, "out")
                    + self.avg_degree(vlabel, elabel, "in"))
        n = self.n_vertices(vlabel)
        if n == 0:
            return 0.0
        csr = self.adjacency(vlabel, elabel, direction)
        return float(len(csr.neighbors)) / n

    def global_avg_degree(self) -> float:
        """Fallback mean degree: total endpoint incidences over total
        vertices, every edge contributing one out and one in."""
        nv = sum(self.n_vertices(l) for l in self.vertex_labels)
        if nv == 0:
            return 0.0
        ne = sum(self.n_edges(l) for l in self.edge_labels)
        return 2.0 * ne / nv

    # -- debug dump --------------------------------------------------------

    def to_debug_json(self) -> dict:
        endpoint = {
            el: {"src": info.src_rid.tolist(), "dst": info.dst_rid.tolist()}
            for el, info in sorted(self.edge_info.items())
        }
        adjacency: dict = {}
        for (vlabel, elabel, direction), csr in sorted(self._adjacency.items()):
            adjacency.setdefault(vlabel, {}).setdefault(elabel, {})[direction] = {
                "offsets": csr.offsets.tolist(),
                "neighbors": csr.neighbors.tolist(),
                "edges": csr.edges.tolist(),
            }
        return {
            "graph": self.name,
            "vertex_labels": list(self.vertex_labels),
            "edge_labels": list(self.edge_labels),
            "endpoint_index": endpoint,
            "adjacency_index": adjacency,
        }


def create_graph(catalog: Catalog, decl: GraphDecl) -> GraphView:
    for t in decl.vertex_tables:
        if not catalog.has_relation(t):
            raise UnknownRelationError(f"unknown relation {t!r}")
    return GraphView(catalog, decl)
