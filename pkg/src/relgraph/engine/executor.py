"""Plan execution entry point."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..mapping import ElementId, GraphView
from .operators import ExecEnv, _concat_batches, compile_node
from .plan import PlanNode


@dataclass
class ResultTable:
    names: list[str]
    kinds: list[tuple]          # ("rid", relation) | ("val", "int64"/"string")
    columns: list[np.ndarray]

    @property
    def n_rows(self) -> int:
        return len(self.columns[0]) if self.columns else 0

    def rows(self) -> list[tuple]:
        out = []
        for i in range(self.n_rows):
            row = []
            for kind, col in zip(self.kinds, self.columns):
                v = col[i]
                row.append(int(v) if isinstance(v, np.integer) else v)
            out.append(tuple(row))
        return out

    def element_rows(self) -> list[tuple[ElementId, ...]]:
        """Rid columns as ElementIds; value columns pass through."""
        out = []
        for row in zip(*[c.tolist() for c in self.columns]) if self.columns else []:
            out.append(tuple(
                ElementId(kind[1], v) if kind[0] == "rid" else v
                for kind, v in zip(self.kinds, row)))
        return out

    def sorted_rows(self) -> list[tuple]:
        return sorted(self.rows(), key=lambda r: tuple(str(x) for x in r))

    def to_csv(self, fh=None) -> Optional[str]:
        own = fh is None
        if own:
            fh = io.StringIO()
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(self.names)
        for row in self.rows():
            w.writerow(row)
        return fh.getvalue() if own else None


def execute(plan: PlanNode, env: ExecEnv,
            view: Optional[GraphView] = None) -> ResultTable:
    """Run a plan to completion. `view` supplies the graph context when
    executing a bare graph subplan (tests and plan fragments); full query
    plans carry their graph via scan_graph_table params."""
    stream = compile_node(plan, env, view)
    batches = []
    for batch in stream.factory():
        env.check_deadline()
        batches.append(batch)
    merged = _concat_batches(stream.schema, batches)
    names = list(stream.schema)
    return ResultTable(
        names=names,
        kinds=[stream.schema[n] for n in names],
        columns=[merged[n] for n in names],
    )
