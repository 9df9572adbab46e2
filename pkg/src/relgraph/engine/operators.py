"""Pull-based vectorized physical operators.

A compiled operator is a Stream: an output schema plus a factory that
yields batches. Batches are dicts mapping column keys to numpy arrays of
one shared length (capped at env.batch_size):

  - plain key "v"      -> int64 rid column into a named relation
  - dotted key "g.out" -> materialized value column (int64 or object)

Attribute access on rid columns gathers lazily from the backing relation,
so only scan_graph_table / project ever materialize values.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional

import numpy as np

from ..errors import PlanError, QueryTimeoutError, SchemaMismatchError
from ..mapping import GraphView
from ..storage import Catalog
from .kernels import expand_ranges, join_pairs, probe_runs, repeat_ranges
from .plan import GRAPH_OPS, PlanNode

Batch = dict  # str -> np.ndarray
DEFAULT_BATCH_SIZE = 1024


@dataclass
class ExecEnv:
    catalog: Catalog
    graphs: dict[str, GraphView] = field(default_factory=dict)
    use_index: bool = True
    batch_size: int = DEFAULT_BATCH_SIZE
    deadline: Optional[float] = None  # time.monotonic() cutoff

    def check_deadline(self):
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise QueryTimeoutError("query exceeded its time budget")


@dataclass
class Stream:
    schema: dict[str, tuple]  # key -> ("rid", relation) | ("val", kind)
    factory: Callable[[], Iterator[Batch]]


def _batch_len(batch: Batch) -> int:
    for arr in batch.values():
        return len(arr)
    return 0


def _take(batch: Batch, idx: np.ndarray) -> Batch:
    return {k: v[idx] for k, v in batch.items()}


def _slice_batches(batch: Batch, size: int) -> Iterator[Batch]:
    n = _batch_len(batch)
    if n == 0:
        return
    if n <= size:
        yield batch
        return
    for lo in range(0, n, size):
        yield {k: v[lo:lo + size] for k, v in batch.items()}


def _concat_batches(schema: dict, batches: list[Batch]) -> Batch:
    if not batches:
        out = {}
        for key, entry in schema.items():
            dtype = np.int64 if entry[0] == "rid" or entry[1] == "int64" else object
            out[key] = np.empty(0, dtype=dtype)
        return out
    keys = list(batches[0])
    return {k: np.concatenate([b[k] for b in batches]) for k in keys}


# -- operand resolution ------------------------------------------------------

def _operand_kind(env: ExecEnv, schema: dict, spec: dict) -> str:
    if "value" in spec:
        return "int64" if isinstance(spec["value"], int) else "string"
    var, attr = spec["var"], spec.get("attr")
    if attr is None:
        entry = schema.get(var)
        if entry is None or entry[0] != "rid":
            raise SchemaMismatchError(f"no rid column {var!r} in input schema")
        return "int64"
    key = f"{var}.{attr}"
    if key in schema:
        return schema[key][1]
    entry = schema.get(var)
    if entry is None or entry[0] != "rid":
        raise SchemaMismatchError(f"cannot resolve {var}.{attr} against input schema")
    if attr in ("ID", "LABEL"):
        return "string"
    rel = env.catalog.get_relation(entry[1])
    if not rel.schema.has_column(attr):
        raise SchemaMismatchError(f"relation {entry[1]!r} has no column {attr!r}")
    return rel.schema.column(attr).value_kind


def _fetch(env: ExecEnv, schema: dict, batch: Batch, spec: dict, n: int) -> np.ndarray:
    if "value" in spec:
        v = spec["value"]
        if isinstance(v, int):
            return np.full(n, v, dtype=np.int64)
        return np.full(n, v, dtype=object)
    var, attr = spec["var"], spec.get("attr")
    if attr is None:
        return batch[var]
    key = f"{var}.{attr}"
    if key in batch:
        return batch[key]
    if attr in ("ID", "LABEL"):
        label = schema[var][1]
        out = np.empty(n, dtype=object)
        if attr == "LABEL":
            out[:] = label
        else:
            rids = batch[var]
            for i in range(n):
                out[i] = f"{label}#{rids[i]}"
        return out
    relation = schema[var][1]
    col = env.catalog.get_relation(relation).column(attr)
    return col[batch[var]]


_CMP = {
    "=": lambda a, b: a == b,
    "<>": lambda a, b: a != b,
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
}


# -- relational operators ----------------------------------------------------

def _compile_scan(node: PlanNode, env: ExecEnv, view) -> Stream:
    relation, var = node.params["relation"], node.params["var"]
    rel = env.catalog.get_relation(relation)
    schema = {var: ("rid", relation)}

    def gen():
        for lo in range(0, rel.n_rows, env.batch_size):
            env.check_deadline()
            hi = min(lo + env.batch_size, rel.n_rows)
            yield {var: np.arange(lo, hi, dtype=np.int64)}

    return Stream(schema, gen)


def _compile_scan_vertex(node: PlanNode, env: ExecEnv, view) -> Stream:
    if view is None:
        raise SchemaMismatchError("scan_vertex outside a graph context")
    label = node.params["label"]
    if label not in view.vertex_labels:
        raise SchemaMismatchError(f"{label!r} is not a vertex label of {view.name!r}")
    return _compile_scan(
        PlanNode("scan", {"relation": label, "var": node.params["var"]}), env, view)


def _compile_filter(node: PlanNode, env: ExecEnv, view) -> Stream:
    child = compile_node(node.children[0], env, view)
    preds = node.params["preds"]
    for p in preds:
        lk = _operand_kind(env, child.schema, p["left"])
        rk = _operand_kind(env, child.schema, p["right"])
        if lk != rk:
            raise SchemaMismatchError(
                f"filter compares {lk} with {rk}: {p}")
        if p["op"] not in _CMP:
            raise PlanError(f"unknown comparison operator {p['op']!r}")

    def gen():
        for batch in child.factory():
            env.check_deadline()
            n = _batch_len(batch)
            if n == 0:
                continue
            mask = np.ones(n, dtype=bool)
            for p in preds:
                left = _fetch(env, child.schema, batch, p["left"], n)
                right = _fetch(env, child.schema, batch, p["right"], n)
                mask &= _CMP[p["op"]](left, right).astype(bool)
            if mask.all():
                yield batch
            elif mask.any():
                yield _take(batch, np.flatnonzero(mask))

    return Stream(dict(child.schema), gen)


def _project_kind(env: ExecEnv, schema: dict, spec: dict) -> str:
    return _operand_kind(env, schema, spec)


def _project_values(env: ExecEnv, schema: dict, batch: Batch, spec: dict,
                    n: int) -> np.ndarray:
    return _fetch(env, schema, batch, spec, n)


def _compile_project(node: PlanNode, env: ExecEnv, view) -> Stream:
    child = compile_node(node.children[0], env, view)
    cols = node.params["cols"]
    schema = {}
    for c in cols:
        if c["out"] in schema:
            raise SchemaMismatchError(f"duplicate output column {c['out']!r}")
        schema[c["out"]] = ("val", _project_kind(env, child.schema, c))

    def gen():
        for batch in child.factory():
            env.check_deadline()
            n = _batch_len(batch)
            if n == 0:
                continue
            yield {c["out"]: _project_values(env, child.schema, batch, c, n)
                   for c in cols}

    return Stream(schema, gen)


def _merge_schemas(left: dict, right: dict, shared: set[str]) -> dict:
    out = dict(left)
    for k, v in right.items():
        if k in shared:
            continue
        if k in out:
            raise SchemaMismatchError(f"column {k!r} appears on both join sides")
        out[k] = v
    return out


def _compile_hash_join(node: PlanNode, env: ExecEnv, view) -> Stream:
    left = compile_node(node.children[0], env, view)
    right = compile_node(node.children[1], env, view)
    lkeys, rkeys = node.params["left_keys"], node.params["right_keys"]
    if len(lkeys) != len(rkeys) or not lkeys:
        raise PlanError("hash_join needs matching non-empty key lists")
    for lk, rk in zip(lkeys, rkeys):
        a = _operand_kind(env, left.schema, lk)
        b = _operand_kind(env, right.schema, rk)
        if a != b:
            raise SchemaMismatchError(f"join key type mismatch: {lk} vs {rk}")
    build_side = node.params.get("build", "left")
    schema = _merge_schemas(left.schema, right.schema, set())

    hint = node.params.get("index_hint")
    if hint is not None and env.use_index:
        return _index_serviced_join(node, env, left, right, schema, hint)

    def gen():
        if build_side == "left":
            build, probe, bspecs, pspecs = left, right, lkeys, rkeys
        else:
            build, probe, bspecs, pspecs = right, left, rkeys, lkeys
        built = []
        for batch in build.factory():
            env.check_deadline()
            built.append(batch)
        bbatch = _concat_batches(build.schema, built)
        nb = _batch_len(bbatch)
        bkey_cols = [_fetch(env, build.schema, bbatch, s, nb) for s in bspecs]
        for pbatch in probe.factory():
            env.check_deadline()
            npr = _batch_len(pbatch)
            if npr == 0 or nb == 0:
                continue
            pkey_cols = [_fetch(env, probe.schema, pbatch, s, npr) for s in pspecs]
            prow, brow = join_pairs(bkey_cols, pkey_cols)
            if len(prow) == 0:
                continue
            out = _take(pbatch, prow)
            out.update(_take(bbatch, brow))
            yield from _slice_batches(out, env.batch_size)

    return Stream(schema, gen)


def _index_serviced_join(node: PlanNode, env: ExecEnv, left: Stream,
                         right: Stream, schema: dict, hint: dict) -> Stream:
    """Service an edge-to-vertex key join with an endpoint-index lookup.

    Requires: one side streams the edge alias, the other is an unfiltered
    scan of the referenced vertex relation. Each edge row matches exactly
    one vertex row (mapping totality), so the join degenerates to a gather
    from the endpoint arrays.
    """
    gview = env.graphs[hint["graph"]]
    info = gview.edge_info[hint["elabel"]]
    endpoint = info.src_rid if hint["endpoint"] == "src" else info.dst_rid
    edge_var, vertex_var = hint["edge_var"], hint["vertex_var"]
    if hint["edge_side"] == "left":
        edge_stream, vertex_stream = left, right
    else:
        edge_stream, vertex_stream = right, left
    if edge_var not in edge_stream.schema or len(vertex_stream.schema) != 1 \
            or vertex_var not in vertex_stream.schema:
        raise SchemaMismatchError("index hint does not match join inputs")

    def gen():
        for batch in edge_stream.factory():
            env.check_deadline()
            if _batch_len(batch) == 0:
                continue
            out = dict(batch)
            out[vertex_var] = endpoint[batch[edge_var]]
            yield out

    return Stream(schema, gen)


def _compile_union(node: PlanNode, env: ExecEnv, view) -> Stream:
    children = [compile_node(c, env, view) for c in node.children]
    if not children:
        raise PlanError("union needs at least one child")
    schema = children[0].schema
    for c in children[1:]:
        if c.schema != schema:
            raise SchemaMismatchError("union children have different schemas")

    def gen():
        for c in children:
            yield from c.factory()

    return Stream(dict(schema), gen)


# -- graph operators ---------------------------------------------------------

def _edge_dirs(direction: str) -> list[str]:
    if direction == "either":
        return ["out", "in"]
    if direction in ("out", "in"):
        return [direction]
    raise PlanError(f"bad direction {direction!r}")


def _anchor_label(child: Stream, anchor: str) -> str:
    entry = child.schema.get(anchor)
    if entry is None or entry[0] != "rid":
        raise SchemaMismatchError(f"anchor {anchor!r} not bound in input")
    return entry[1]


def _compile_expand_edge(node: PlanNode, env: ExecEnv, view) -> Stream:
    if view is None:
        raise SchemaMismatchError("expand_edge outside a graph context")
    child = compile_node(node.children[0], env, view)
    p = node.params
    anchor, elabel, direction, edge_var = p["anchor"], p["elabel"], p["dir"], p["edge_var"]
    alabel = _anchor_label(child, anchor)
    if elabel not in view.edge_labels:
        raise SchemaMismatchError(f"{elabel!r} is not an edge label of {view.name!r}")
    if edge_var in child.schema:
        raise SchemaMismatchError(f"edge variable {edge_var!r} already bound")
    csrs = [view.adjacency(alabel, elabel, d) for d in _edge_dirs(direction)]
    schema = dict(child.schema)
    schema[edge_var] = ("rid", elabel)

    def gen():
        for batch in child.factory():
            env.check_deadline()
            if _batch_len(batch) == 0:
                continue
            for csr in csrs:
                row, pos = expand_ranges(csr.offsets, batch[anchor])
                if len(row) == 0:
                    continue
                out = _take(batch, row)
                out[edge_var] = csr.edges[pos]
                yield from _slice_batches(out, env.batch_size)

    return Stream(schema, gen)


def _compile_get_vertex(node: PlanNode, env: ExecEnv, view) -> Stream:
    if view is None:
        raise SchemaMismatchError("get_vertex outside a graph context")
    child = compile_node(node.children[0], env, view)
    p = node.params
    edge_var, vertex_var, mode = p["edge_var"], p["vertex_var"], p["mode"]
    entry = child.schema.get(edge_var)
    if entry is None or entry[0] != "rid":
        raise SchemaMismatchError(f"edge variable {edge_var!r} not bound")
    info = view.edge_info.get(entry[1])
    if info is None:
        raise SchemaMismatchError(f"{entry[1]!r} is not an edge relation here")
    if vertex_var in child.schema:
        raise SchemaMismatchError(f"vertex variable {vertex_var!r} already bound")
    if mode == "src":
        vlabel = info.src_label
    elif mode == "dst":
        vlabel = info.dst_label
    else:  # other: endpoint opposite the anchor of the preceding expansion
        anchor = p["anchor"]
        albl = _anchor_label(child, anchor)
        if info.src_label == info.dst_label:
            vlabel = info.src_label
        elif albl == info.src_label:
            vlabel = info.dst_label
        else:
            vlabel = info.src_label
    schema = dict(child.schema)
    schema[vertex_var] = ("rid", vlabel)

    def gen():
        for batch in child.factory():
            env.check_deadline()
            n = _batch_len(batch)
            if n == 0:
                continue
            eids = batch[edge_var]
            if mode == "src":
                v = info.src_rid[eids]
            elif mode == "dst":
                v = info.dst_rid[eids]
            else:
                s, d = info.src_rid[eids], info.dst_rid[eids]
                v = np.where(s == batch[p["anchor"]], d, s)
            out = dict(batch)
            out[vertex_var] = v
            yield out

    return Stream(schema, gen)


def _compile_expand(node: PlanNode, env: ExecEnv, view) -> Stream:
    if view is None:
        raise SchemaMismatchError("expand outside a graph context")
    child = compile_node(node.children[0], env, view)
    p = node.params
    anchor, elabel, direction, vertex_var = p["anchor"], p["elabel"], p["dir"], p["vertex_var"]
    alabel = _anchor_label(child, anchor)
    info = view.edge_info[elabel]
    if vertex_var in child.schema:
        raise SchemaMismatchError(f"vertex variable {vertex_var!r} already bound")
    targets = []
    for d in _edge_dirs(direction):
        nlabel = info.dst_label if d == "out" else info.src_label
        targets.append((view.adjacency(alabel, elabel, d), nlabel))
    vlabel = None
    for d in _edge_dirs(direction):
        want = info.dst_label if d == "out" else info.src_label
        anchor_side = info.src_label if d == "out" else info.dst_label
        if anchor_side == alabel:
            if vlabel is None:
                vlabel = want
            elif vlabel != want:
                raise SchemaMismatchError(
                    f"expand on {elabel!r} from {alabel!r} has ambiguous target label")
    if vlabel is None:
        raise SchemaMismatchError(
            f"edge {elabel!r} never touches vertex label {alabel!r}")
    schema = dict(child.schema)
    schema[vertex_var] = ("rid", vlabel)

    def gen():
        for batch in child.factory():
            env.check_deadline()
            if _batch_len(batch) == 0:
                continue
            for csr, _ in targets:
                row, pos = expand_ranges(csr.offsets, batch[anchor])
                if len(row) == 0:
                    continue
                out = _take(batch, row)
                out[vertex_var] = csr.neighbors[pos]
                yield from _slice_batches(out, env.batch_size)

    return Stream(schema, gen)


def _leg_csr(view: GraphView, alabel: str, leg: dict):
    if leg["dir"] == "either":
        return view.either_sorted(alabel, leg["elabel"])
    return view.adjacency(alabel, leg["elabel"], leg["dir"])


def _compile_expand_intersect(node: PlanNode, env: ExecEnv, view) -> Stream:
    if view is None:
        raise SchemaMismatchError("expand_intersect outside a graph context")
    child = compile_node(node.children[0], env, view)
    p = node.params
    target, legs = p["target"], p["legs"]
    if len(legs) < 2:
        raise PlanError("expand_intersect needs at least two legs")
    if target in child.schema:
        raise SchemaMismatchError(f"target {target!r} already bound")
    tlabel = None
    compiled = []
    for leg in legs:
        alabel = _anchor_label(child, leg["anchor"])
        info = view.edge_info[leg["elabel"]]
        if leg["dir"] == "out":
            want = info.dst_label
        elif leg["dir"] == "in":
            want = info.src_label
        else:
            want = info.dst_label if alabel == info.src_label else info.src_label
        if tlabel is None:
            tlabel = want
        elif tlabel != want:
            raise SchemaMismatchError("expand_intersect legs target different labels")
        if leg["edge_var"] in child.schema:
            raise SchemaMismatchError(f"edge variable {leg['edge_var']!r} already bound")
        compiled.append((leg["anchor"], _leg_csr(view, alabel, leg), leg["edge_var"]))
    schema = dict(child.schema)
    for (_, _, evar), leg in zip(compiled, legs):
        schema[evar] = ("rid", leg["elabel"])
    schema[target] = ("rid", tlabel)

    def gen():
        for batch in child.factory():
            env.check_deadline()
            n = _batch_len(batch)
            if n == 0:
                continue
            anchor0, csr0, evar0 = compiled[0]
            row, pos = expand_ranges(csr0.offsets, batch[anchor0])
            if len(row) == 0:
                continue
            tgt = csr0.neighbors[pos]
            evals = [csr0.edges[pos]]
            for anchor, csr, evar in compiled[1:]:
                env.check_deadline()
                anchors = batch[anchor][row]
                starts, counts = probe_runs(csr.offsets, csr.neighbors, anchors, tgt)
                sub, pos2 = repeat_ranges(starts, counts)
                if len(sub) == 0:
                    row = sub
                    break
                row = row[sub]
                tgt = tgt[sub]
                evals = [e[sub] for e in evals]
                evals.append(csr.edges[pos2])
            if len(row) == 0:
                continue
            out = _take(batch, row)
            for (anchor, csr, evar), e in zip(compiled, evals):
                out[evar] = e
            out[target] = tgt
            yield from _slice_batches(out, env.batch_size)

    return Stream(schema, gen)


def _compile_graph_hash_join(node: PlanNode, env: ExecEnv, view) -> Stream:
    left = compile_node(node.children[0], env, view)
    right = compile_node(node.children[1], env, view)
    on = node.params["on"]
    if not on:
        raise PlanError("graph_hash_join needs shared variables")
    for v in on:
        le, re_ = left.schema.get(v), right.schema.get(v)
        if le is None or re_ is None or le[0] != "rid" or re_[0] != "rid":
            raise SchemaMismatchError(f"shared variable {v!r} missing on a side")
        if le[1] != re_[1]:
            raise SchemaMismatchError(f"shared variable {v!r} label mismatch")
    dup = (set(left.schema) & set(right.schema)) - set(on)
    if dup:
        raise SchemaMismatchError(f"non-shared columns on both sides: {sorted(dup)}")
    schema = _merge_schemas(left.schema, right.schema, set(on))
    build_side = node.params.get("build", "right")

    def gen():
        if build_side == "left":
            build, probe = left, right
        else:
            build, probe = right, left
        built = []
        for batch in build.factory():
            env.check_deadline()
            built.append(batch)
        bbatch = _concat_batches(build.schema, built)
        nb = _batch_len(bbatch)
        bkeys = [bbatch[v] for v in on]
        extra = [k for k in build.schema if k not in on]
        for pbatch in probe.factory():
            env.check_deadline()
            npr = _batch_len(pbatch)
            if npr == 0 or nb == 0:
                continue
            pkeys = [pbatch[v] for v in on]
            prow, brow = join_pairs(bkeys, pkeys)
            if len(prow) == 0:
                continue
            out = _take(pbatch, prow)
            for k in extra:
                out[k] = bbatch[k][brow]
            yield from _slice_batches(out, env.batch_size)

    return Stream(schema, gen)


def _compile_scan_graph_table(node: PlanNode, env: ExecEnv, view) -> Stream:
    p = node.params
    gview = env.graphs.get(p["graph"])
    if gview is None:
        raise SchemaMismatchError(f"unknown graph {p['graph']!r}")
    child = compile_node(node.children[0], env, gview)
    alias, cols = p["alias"], p["cols"]
    schema = {}
    for c in cols:
        key = f"{alias}.{c['out']}"
        if key in schema:
            raise SchemaMismatchError(f"duplicate graph-table column {c['out']!r}")
        schema[key] = ("val", _project_kind(env, child.schema, c))

    def gen():
        for batch in child.factory():
            env.check_deadline()
            n = _batch_len(batch)
            if n == 0:
                continue
            yield {f"{alias}.{c['out']}": _project_values(env, child.schema, batch, c, n)
                   for c in cols}

    return Stream(schema, gen)


_COMPILERS = {
    "scan": _compile_scan,
    "scan_vertex": _compile_scan_vertex,
    "filter": _compile_filter,
    "project": _compile_project,
    "hash_join": _compile_hash_join,
    "union": _compile_union,
    "expand_edge": _compile_expand_edge,
    "get_vertex": _compile_get_vertex,
    "expand": _compile_expand,
    "expand_intersect": _compile_expand_intersect,
    "graph_hash_join": _compile_graph_hash_join,
    "scan_graph_table": _compile_scan_graph_table,
}


def compile_node(node: PlanNode, env: ExecEnv, view: Optional[GraphView] = None) -> Stream:
    return _COMPILERS[node.kind](node, env, view)
