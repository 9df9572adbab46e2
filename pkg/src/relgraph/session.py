"""Workspace loading: manifest-driven catalog construction plus graph DDL."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import StorageError
from .frontend import parse_ddl
from .frontend.ast import CreatePropertyGraph
from .mapping import EdgeDecl, GraphDecl, GraphView, create_graph
from .storage import Catalog


def decl_from_ast(stmt: CreatePropertyGraph) -> GraphDecl:
    return GraphDecl(
        stmt.name,
        stmt.vertex_tables,
        tuple(
            EdgeDecl(e.relation, e.src_key, e.src_table, e.src_ref_key,
                     e.dst_key, e.dst_table, e.dst_ref_key)
            for e in stmt.edge_tables
        ),
    )


@dataclass
class Session:
    catalog: Catalog = field(default_factory=Catalog)
    graphs: dict[str, GraphView] = field(default_factory=dict)

    def create_graph_from_ddl(self, text: str) -> list[GraphView]:
        views = []
        for stmt in parse_ddl(text):
            view = create_graph(self.catalog, decl_from_ast(stmt))
            self.graphs[view.name] = view
            views.append(view)
        return views


def load_manifest(path: str | Path) -> Session:
    """Manifest JSON: {"relations": [{name, path, columns: [[name, type]...]}],
    "graphs": [ddl file, ...]}. Paths resolve relative to the manifest."""
    path = Path(path)
    try:
        spec = json.loads(path.read_text())
    except FileNotFoundError:
        raise StorageError(f"no such manifest: {path}")
    except json.JSONDecodeError as e:
        raise StorageError(f"manifest is not valid JSON: {e}")
    base = path.parent
    session = Session()
    for rel in spec.get("relations", ()):
        session.catalog.load_csv(rel["name"], base / rel["path"],
                                 [tuple(c) for c in rel["columns"]])
    for ddl in spec.get("graphs", ()):
        ddl_path = base / ddl
        if not ddl_path.is_file():
            raise StorageError(f"manifest references missing DDL file: {ddl_path}")
        session.create_graph_from_ddl(ddl_path.read_text())
    return session
