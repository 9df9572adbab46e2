"""Command-line front door.

    relgraph load --manifest DIR/manifest.json
    relgraph create-graph --manifest M --ddl extra.ddl
    relgraph query --manifest M 'SELECT ...' [--optimizer converged]
    relgraph explain --manifest M 'SELECT ...' [--no-graph-index]
    relgraph gen --out DIR --persons 10000 [--cliques 8 --seed 7]
    relgraph bench --manifest M --queries queries.json [--reps 3]
    relgraph space [--family path --sizes 2..8] [--output space.csv]
    relgraph verify [--graphs 20 --queries 4 --seed 0]

Exit codes: 0 success, 1 runtime failure, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import statistics
import sys
import time
from collections import Counter
from pathlib import Path

from . import datagen, planspace, verify
from .agnostic import plan_agnostic
from .engine import ExecEnv, dumps, execute, explain
from .errors import ParseError, QueryTimeoutError, RelgraphError, ValidationError
from .frontend import parse_query, validate
from .graphopt import build_catalog, plan_converged
from .session import Session, load_manifest

OPTIMIZERS = ("agnostic", "converged")


class UsageError(Exception):
    """Bad input that is the caller's fault: maps to exit code 2."""


def _err(msg: str) -> None:
    print(f"error: {msg}", file=sys.stderr)


# -- shared plumbing ---------------------------------------------------------


def _load(args) -> Session:
    return load_manifest(args.manifest)


def _plan_query(session: Session, query: str, optimizer: str,
                graph_index: bool, k: int):
    """Parse, validate and plan. Returns (plan, resolved, optimize_us);
    catalog statistics are built before the clock starts."""
    rq = validate(parse_query(query), session.catalog, session.graphs)
    view = session.graphs[rq.graph_name]
    pcat = build_catalog(view, k=k) if optimizer == "converged" else None
    t0 = time.perf_counter()
    if optimizer == "converged":
        plan = plan_converged(rq, session.catalog, view, pcat,
                              graph_index=graph_index)
    else:
        plan = plan_agnostic(rq, session.catalog, view,
                             graph_index=graph_index)
    opt_us = int(round((time.perf_counter() - t0) * 1e6))
    return plan, rq, opt_us


def _execute(session: Session, plan, graph_index: bool,
             timeout_ms: int | None):
    deadline = (time.monotonic() + timeout_ms / 1000.0
                if timeout_ms else None)
    env = ExecEnv(session.catalog, session.graphs, use_index=graph_index,
                  deadline=deadline)
    t0 = time.perf_counter()
    table = execute(plan, env)
    exec_us = int(round((time.perf_counter() - t0) * 1e6))
    return table, exec_us


# -- subcommands -------------------------------------------------------------


def cmd_load(args) -> int:
    session = _load(args)
    for name in sorted(session.catalog.relation_names):
        rel = session.catalog.get_relation(name)
        cols = ",".join(c.name for c in rel.schema.columns)
        print(f"relation {name} rows={rel.n_rows} columns={cols}")
    for gname in sorted(session.graphs):
        view = session.graphs[gname]
        print(f"graph {gname} vertices={','.join(view.vertex_labels)} "
              f"edges={','.join(view.edge_labels)}")
    return 0


def cmd_create_graph(args) -> int:
    session = _load(args)
    ddl_path = Path(args.ddl)
    if not ddl_path.is_file():
        raise UsageError(f"no such DDL file: {ddl_path}")
    views = session.create_graph_from_ddl(ddl_path.read_text())
    for view in views:
        print(f"graph {view.name}")
        for lab in view.vertex_labels:
            n = session.catalog.get_relation(lab).n_rows
            print(f"  vertex {lab} rows={n}")
        for lab in view.edge_labels:
            info = view.edge_info[lab]
            n = session.catalog.get_relation(lab).n_rows
            print(f"  edge {lab} rows={n} "
                  f"src={info.src_label} dst={info.dst_label}")
    return 0


def cmd_query(args) -> int:
    session = _load(args)
    plan, _, opt_us = _plan_query(session, args.query, args.optimizer,
                                  args.graph_index, args.k)
    table, exec_us = _execute(session, plan, args.graph_index,
                              args.timeout_ms)
    if args.output:
        with open(args.output, "w") as fh:
            table.to_csv(fh)
    else:
        table.to_csv(sys.stdout)
    print(f"optimize_us={opt_us} execute_us={exec_us} rows={table.n_rows}")
    return 0


def cmd_explain(args) -> int:
    session = _load(args)
    plan, _, _ = _plan_query(session, args.query, args.optimizer,
                             args.graph_index, args.k)
    text = explain(plan) + "\n\n" + dumps(plan) + "\n"
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_gen(args) -> int:
    summary = datagen.generate(
        args.out, persons=args.persons, places=args.places,
        messages=args.messages, knows_degree=args.knows_degree,
        likes_degree=args.likes_degree, skew=args.skew,
        triangle_closing=args.closing, cliques=args.cliques,
        seed=args.seed)
    print(json.dumps(summary, sort_keys=True))
    return 0


def _parse_sizes(text: str) -> list[int]:
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            out = list(range(int(lo), int(hi) + 1))
        else:
            out = [int(p) for p in text.split(",") if p]
    except ValueError:
        raise UsageError(f"bad sizes {text!r}: use N,M,... or LO..HI")
    if not out:
        raise UsageError(f"bad sizes {text!r}: empty")
    return out


def cmd_space(args) -> int:
    if args.family == "standard":
        if args.sizes:
            raise UsageError("--sizes requires --family path or cycle")
        rows = planspace.standard_report()
    else:
        sizes = _parse_sizes(args.sizes) if args.sizes else (
            list(range(2, 9)) if args.family == "path"
            else list(range(3, 7)))
        rows = planspace.report(args.family, sizes)
    print(planspace.render_text(rows), end="")
    if args.output:
        Path(args.output).write_text(planspace.render_csv(rows))
    return 0


def cmd_verify(args) -> int:
    res = verify.run_suite(graphs=args.graphs,
                           queries_per_graph=args.queries,
                           seed=args.seed, log=print)
    for f in res.failures:
        print(f"MISMATCH {f}")
    status = "all plans agree with the oracle" if res.ok else \
        f"{len(res.failures)} mismatches"
    print(f"checked {res.cases} cases in {res.elapsed_s:.1f}s: {status}")
    return 0 if res.ok else 1


# -- bench -------------------------------------------------------------------

BENCH_COLUMNS = ("name", "family",
                 "converged_optimize_us", "converged_execute_us",
                 "converged_total_us",
                 "agnostic_optimize_us", "agnostic_execute_us",
                 "agnostic_total_us", "speedup")


def _bench_one(session: Session, query: str, optimizer: str,
               graph_index: bool, k: int, reps: int, timeout_ms: int):
    """Mean optimize/execute micros over reps, or None on timeout.
    Returns (opt_us, exec_us, rows_counter)."""
    opts, execs = [], []
    counter = None
    for _ in range(reps):
        plan, _, opt_us = _plan_query(session, query, optimizer,
                                      graph_index, k)
        try:
            table, exec_us = _execute(session, plan, graph_index,
                                      timeout_ms)
        except QueryTimeoutError:
            return None, None, None
        opts.append(opt_us)
        execs.append(exec_us)
        if counter is None:
            counter = Counter(table.rows())
    return (int(round(statistics.fmean(opts))),
            int(round(statistics.fmean(execs))), counter)


def cmd_bench(args) -> int:
    qpath = Path(args.queries)
    if not qpath.is_file():
        raise UsageError(f"no such queries file: {qpath}")
    try:
        spec = json.loads(qpath.read_text())
    except json.JSONDecodeError as e:
        raise UsageError(f"queries file is not valid JSON: {e}")
    if not isinstance(spec, list) or any(
            not isinstance(q, dict) or "name" not in q or "query" not in q
            for q in spec):
        raise UsageError(
            'queries file must be a JSON array of {"name", "query"} objects')

    session = _load(args)
    table_rows = []
    mismatches = []
    for q in spec:
        name, family = q["name"], q.get("family", "")
        # parse errors in a bench query are the file author's problem
        validate(parse_query(q["query"]), session.catalog, session.graphs)
        cells = {"name": name, "family": family}
        counters = {}
        for opt in ("converged", "agnostic"):
            o_us, e_us, counter = _bench_one(
                session, q["query"], opt, args.graph_index, args.k,
                args.reps, args.timeout_ms)
            counters[opt] = counter
            if o_us is None:
                cells[f"{opt}_optimize_us"] = "OT"
                cells[f"{opt}_execute_us"] = "OT"
                cells[f"{opt}_total_us"] = "OT"
            else:
                cells[f"{opt}_optimize_us"] = o_us
                cells[f"{opt}_execute_us"] = e_us
                cells[f"{opt}_total_us"] = o_us + e_us
        ct, at = cells["converged_total_us"], cells["agnostic_total_us"]
        if ct == "OT" or at == "OT":
            cells["speedup"] = "OT"
        else:
            cells["speedup"] = f"{at / ct:.2f}" if ct else "inf"
        if counters["converged"] is not None \
                and counters["agnostic"] is not None \
                and counters["converged"] != counters["agnostic"]:
            mismatches.append(name)
        table_rows.append(cells)

    lines = [" ".join(BENCH_COLUMNS)]
    for cells in table_rows:
        lines.append(" ".join(str(cells[c]) for c in BENCH_COLUMNS))
    widths = [max(len(line.split(" ")[i]) for line in lines)
              for i in range(len(BENCH_COLUMNS))]
    for line in lines:
        parts = line.split(" ")
        print("  ".join(p.ljust(w) for p, w in zip(parts, widths)).rstrip())
    if args.output:
        import csv
        with open(args.output, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(BENCH_COLUMNS)
            for cells in table_rows:
                w.writerow([cells[c] for c in BENCH_COLUMNS])
    if mismatches:
        _err("optimizers disagree on: " + ", ".join(mismatches))
        return 1
    return 0


# -- argument parsing --------------------------------------------------------


def _add_manifest(sp) -> None:
    sp.add_argument("--manifest", required=True,
                    help="manifest JSON describing relations and graph DDL")


def _add_planning(sp) -> None:
    sp.add_argument("--optimizer", choices=OPTIMIZERS, default="converged")
    sp.add_argument("--graph-index", dest="graph_index", default=True,
                    action="store_true",
                    help="allow adjacency-index operators (default)")
    sp.add_argument("--no-graph-index", dest="graph_index",
                    action="store_false",
                    help="plan with hash joins only")
    sp.add_argument("--k", type=int, choices=(2, 3), default=3,
                    help="max pattern size in the cardinality catalog")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="relgraph",
        description="relational-graph query engine")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("load", help="load a manifest and list its contents")
    _add_manifest(sp)
    sp.set_defaults(fn=cmd_load)

    sp = sub.add_parser("create-graph",
                        help="apply extra graph DDL to a loaded manifest")
    _add_manifest(sp)
    sp.add_argument("--ddl", required=True, help="DDL file to apply")
    sp.set_defaults(fn=cmd_create_graph)

    sp = sub.add_parser("query", help="run a query and print CSV rows")
    _add_manifest(sp)
    _add_planning(sp)
    sp.add_argument("query", help="SQL text")
    sp.add_argument("--timeout-ms", type=int, default=None)
    sp.add_argument("--output", help="write result CSV here instead of stdout")
    sp.set_defaults(fn=cmd_query)

    sp = sub.add_parser("explain",
                        help="print the plan tree and its JSON form")
    _add_manifest(sp)
    _add_planning(sp)
    sp.add_argument("query", help="SQL text")
    sp.add_argument("--output", help="write the plan here instead of stdout")
    sp.set_defaults(fn=cmd_explain)

    sp = sub.add_parser("gen", help="generate a seeded social dataset")
    sp.add_argument("--out", required=True, help="output directory")
    sp.add_argument("--persons", type=int, default=1000)
    sp.add_argument("--places", type=int, default=None)
    sp.add_argument("--messages", type=int, default=None)
    sp.add_argument("--knows-degree", type=float, default=6.0)
    sp.add_argument("--likes-degree", type=float, default=3.0)
    sp.add_argument("--skew", type=float, default=0.8)
    sp.add_argument("--closing", type=float, default=0.3,
                    help="triangle-closing effort as a fraction of edges")
    sp.add_argument("--cliques", type=int, default=0,
                    help="number of planted 4-cliques")
    sp.add_argument("--seed", type=int, default=42)
    sp.set_defaults(fn=cmd_gen)

    sp = sub.add_parser("bench",
                        help="time both optimizers over a query file")
    _add_manifest(sp)
    sp.add_argument("--queries", required=True,
                    help='JSON array of {"name", "query", "family"}')
    sp.add_argument("--reps", type=int, default=3)
    sp.add_argument("--timeout-ms", type=int, default=60_000)
    sp.add_argument("--k", type=int, choices=(2, 3), default=3)
    sp.add_argument("--graph-index", dest="graph_index", default=True,
                    action="store_true")
    sp.add_argument("--no-graph-index", dest="graph_index",
                    action="store_false")
    sp.add_argument("--output", help="also write the report as CSV here")
    sp.set_defaults(fn=cmd_bench)

    sp = sub.add_parser("space",
                        help="count both plan spaces for pattern families")
    sp.add_argument("--family", choices=("standard", "path", "cycle"),
                    default="standard")
    sp.add_argument("--sizes", help="sizes as N,M,... or LO..HI")
    sp.add_argument("--output", help="also write the report as CSV here")
    sp.set_defaults(fn=cmd_space)

    sp = sub.add_parser("verify",
                        help="check optimizer equivalence against the oracle")
    sp.add_argument("--graphs", type=int, default=20)
    sp.add_argument("--queries", type=int, default=4,
                    help="random queries per graph")
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(fn=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2
    try:
        return args.fn(args)
    except UsageError as e:
        _err(str(e))
        return 2
    except (ParseError, ValidationError) as e:
        _err(str(e))
        return 2
    except RelgraphError as e:
        _err(str(e))
        return 1
    except OSError as e:
        _err(str(e))
        return 1


if __name__ == "__main__":
    sys.exit(main())
