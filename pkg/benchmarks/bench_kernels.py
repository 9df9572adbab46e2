"""Compare the numba kernels against the numpy fallback.

Generates a seeded dataset, then times the same queries in fresh
subprocesses with RELGRAPH_KERNELS forced each way (the kernel mode is
fixed at import, so each measurement needs its own interpreter). The
first numba run includes JIT compilation; a warmup rep absorbs it.

    python3 benchmarks/bench_kernels.py [--persons 5000] [--reps 3]
"""

import argparse
import json
import os
import re
import statistics
import subprocess
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
QUERIES = json.loads((ROOT / "benchmarks" / "queries.json").read_text())


def run_query(manifest: str, query: str, mode: str) -> int:
    env = dict(os.environ, RELGRAPH_KERNELS=mode)
    r = subprocess.run(
        [sys.executable, "-m", "relgraph.cli", "query",
         "--manifest", manifest, "--output", os.devnull, query],
        capture_output=True, text=True, env=env, cwd=ROOT)
    if r.returncode != 0:
        raise SystemExit(f"query failed under {mode}: {r.stderr}")
    m = re.search(r"execute_us=(\d+)", r.stdout)
    return int(m.group(1))


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--persons", type=int, default=5000)
    ap.add_argument("--reps", type=int, default=3)
    ap.add_argument("--seed", type=int, default=42)
    args = ap.parse_args()

    with tempfile.TemporaryDirectory() as td:
        gen = subprocess.run(
            [sys.executable, "-m", "relgraph.cli", "gen", "--out", td,
             "--persons", str(args.persons), "--cliques", "5",
             "--knows-degree", "3.0", "--skew", "0.4",
             "--seed", str(args.seed)],
            capture_output=True, text=True, cwd=ROOT)
        if gen.returncode != 0:
            raise SystemExit(f"gen failed: {gen.stderr}")
        manifest = str(Path(td) / "manifest.json")

        print(f"{'query':<14}{'numpy_us':>12}{'numba_us':>12}{'ratio':>8}")
        for q in QUERIES:
            means = {}
            for mode in ("numpy", "numba"):
                run_query(manifest, q["query"], mode)  # warmup / JIT
                times = [run_query(manifest, q["query"], mode)
                         for _ in range(args.reps)]
                means[mode] = statistics.fmean(times)
            ratio = means["numpy"] / means["numba"] if means["numba"] else 0.0
            print(f"{q['name']:<14}{means['numpy']:>12.0f}"
                  f"{means['numba']:>12.0f}{ratio:>8.2f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
