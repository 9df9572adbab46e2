"""Physical plan representation shared by both optimizers.

A plan is a tree of PlanNode(kind, params, children). The full parameter
schema is documented in README.md; the same JSON form is used by the CLI's
explain output and accepted back for execution.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from ..errors import PlanError

RELATIONAL_OPS = ("scan", "filter", "project", "hash_join", "union")
GRAPH_OPS = ("scan_vertex", "expand_edge", "get_vertex", "expand",
             "expand_intersect", "graph_hash_join", "scan_graph_table")
OP_KINDS = RELATIONAL_OPS + GRAPH_OPS


@dataclass
class PlanNode:
    kind: str
    params: dict
    children: tuple["PlanNode", ...] = ()
    estimate: float | None = None

    def __post_init__(self):
        if self.kind not in OP_KINDS:
            raise PlanError(f"unknown operator kind {self.kind!r}")

    def with_children(self, children: tuple["PlanNode", ...]) -> "PlanNode":
        return PlanNode(self.kind, self.params, children, self.estimate)

    # -- traversal helpers --------------------------------------------------

    def walk(self):
        yield self
        for c in self.children:
            yield from c.walk()

    def count_ops(self, kind: str) -> int:
        return sum(1 for n in self.walk() if n.kind == kind)


def to_json(plan: PlanNode) -> dict:
    out = {"op": plan.kind, "params": plan.params}
    if plan.estimate is not None:
        out["estimate"] = plan.estimate
    if plan.children:
        out["children"] = [to_json(c) for c in plan.children]
    return out


def from_json(obj: dict) -> PlanNode:
    if not isinstance(obj, dict) or "op" not in obj:
        raise PlanError("plan node must be an object with an 'op' field")
    children = tuple(from_json(c) for c in obj.get("children", ()))
    return PlanNode(obj["op"], obj.get("params", {}), children,
                    obj.get("estimate"))


def dumps(plan: PlanNode) -> str:
    return json.dumps(to_json(plan), indent=2, sort_keys=True)


def loads(text: str) -> PlanNode:
    return from_json(json.loads(text))


def _fmt_value(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, float):
        return f"{v:g}"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_fmt_value(x) for x in v) + "]"
    if isinstance(v, dict):
        return "{" + ", ".join(f"{k}={_fmt_value(v[k])}" for k in v) + "}"
    return str(v)


def explain(plan: PlanNode) -> str:
    """Deterministic indented plan rendering."""
    lines: list[str] = []

    def emit(node: PlanNode, depth: int):
        bits = []
        for k in sorted(node.params):
            bits.append(f"{k}={_fmt_value(node.params[k])}")
        est = "" if node.estimate is None else f"  ~{node.estimate:g} rows"
        lines.append("  " * depth + node.kind.upper()
                     + (" [" + " ".join(bits) + "]" if bits else "") + est)
        for c in node.children:
            emit(c, depth + 1)

    emit(plan, 0)
    return "\n".join(lines)
