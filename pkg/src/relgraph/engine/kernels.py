"""Vectorized building blocks for the graph operators.

Two implementations of every kernel: a numba-compiled fast path and a
pure-numpy fallback. Selection order:

  1. RELGRAPH_KERNELS=numpy forces the fallback
  2. RELGRAPH_KERNELS=numba forces compilation (ImportError if missing)
  3. default: numba when importable, else numpy

All kernels are pure functions of int64 arrays. CSR inputs follow the
adjacency-index layout: per-anchor slices sorted by (neighbor rid, edge rid).
"""

from __future__ import annotations

import os

import numpy as np

_EMPTY = np.empty(0, dtype=np.int64)


def _mode() -> str:
    want = os.environ.get("RELGRAPH_KERNELS", "").strip().lower()
    if want in ("numpy", "numba"):
        return want
    try:
        import numba  # noqa: F401
        return "numba"
    except ImportError:
        return "numpy"


KERNEL_MODE = _mode()


# -- numpy reference implementations ---------------------------------------

def _repeat_ranges_np(starts: np.ndarray, counts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """For each i emit (i, starts[i] + j) for j < counts[i]."""
    total = int(counts.sum())
    if total == 0:
        return _EMPTY, _EMPTY
    row = np.repeat(np.arange(len(counts), dtype=np.int64), counts)
    ends = np.cumsum(counts)
    # position within the run: global index minus the run's first global index
    within = np.arange(total, dtype=np.int64) - np.repeat(ends - counts, counts)
    return row, np.repeat(starts, counts) + within


def _expand_ranges_np(offsets: np.ndarray, anchors: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    starts = offsets[anchors]
    counts = offsets[anchors + 1] - starts
    return _repeat_ranges_np(starts, counts)


def _probe_runs_np(offsets: np.ndarray, nbrs: np.ndarray, anchors: np.ndarray,
                   targets: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per row i: locate targets[i] inside the sorted neighbor slice of
    anchors[i]. Returns (starts, counts) as global positions into nbrs."""
    n = len(anchors)
    starts = np.empty(n, dtype=np.int64)
    counts = np.empty(n, dtype=np.int64)
    for i in range(n):
        lo = offsets[anchors[i]]
        hi = offsets[anchors[i] + 1]
        s = lo + np.searchsorted(nbrs[lo:hi], targets[i], side="left")
        e = lo + np.searchsorted(nbrs[lo:hi], targets[i], side="right")
        starts[i] = s
        counts[i] = e - s
    return starts, counts


# -- numba fast paths -------------------------------------------------------

if KERNEL_MODE == "numba":
    from numba import njit

    @njit(cache=True)
    def _repeat_ranges_nb(starts, counts):  # pragma: no cover - exercised via dispatch
        total = 0
        for i in range(len(counts)):
            total += counts[i]
        row = np.empty(total, dtype=np.int64)
        pos = np.empty(total, dtype=np.int64)
        k = 0
        for i in range(len(counts)):
            s = starts[i]
            for j in range(counts[i]):
                row[k] = i
                pos[k] = s + j
                k += 1
        return row, pos

    @njit(cache=True)
    def _expand_ranges_nb(offsets, anchors):  # pragma: no cover
        n = len(anchors)
        total = 0
        for i in range(n):
            a = anchors[i]
            total += offsets[a + 1] - offsets[a]
        row = np.empty(total, dtype=np.int64)
        pos = np.empty(total, dtype=np.int64)
        k = 0
        for i in range(n):
            a = anchors[i]
            for p in range(offsets[a], offsets[a + 1]):
                row[k] = i
                pos[k] = p
                k += 1
        return row, pos

    @njit(cache=True)
    def _probe_runs_nb(offsets, nbrs, anchors, targets):  # pragma: no cover
        n = len(anchors)
        starts = np.empty(n, dtype=np.int64)
        counts = np.empty(n, dtype=np.int64)
        for i in range(n):
            lo = offsets[anchors[i]]
            hi = offsets[anchors[i] + 1]
            t = targets[i]
            # lower bound
            a, b = lo, hi
            while a < b:
                m = (a + b) // 2
                if nbrs[m] < t:
                    a = m + 1
                else:
                    b = m
            s = a
            # upper bound
            a, b = s, hi
            while a < b:
                m = (a + b) // 2
                if nbrs[m] <= t:
                    a = m + 1
                else:
                    b = m
            starts[i] = s
            counts[i] = a - s
        return starts, counts

    def repeat_ranges(starts, counts):
        if len(counts) == 0:
            return _EMPTY, _EMPTY
        return _repeat_ranges_nb(np.ascontiguousarray(starts), np.ascontiguousarray(counts))

    def expand_ranges(offsets, anchors):
        if len(anchors) == 0:
            return _EMPTY, _EMPTY
        return _expand_ranges_nb(np.ascontiguousarray(offsets), np.ascontiguousarray(anchors))

    def probe_runs(offsets, nbrs, anchors, targets):
        if len(anchors) == 0:
            return _EMPTY, _EMPTY
        return _probe_runs_nb(np.ascontiguousarray(offsets), np.ascontiguousarray(nbrs),
                              np.ascontiguousarray(anchors), np.ascontiguousarray(targets))
else:
    repeat_ranges = _repeat_ranges_np
    expand_ranges = _expand_ranges_np
    probe_runs = _probe_runs_np


# -- join key encoding (shared, numpy) --------------------------------------

def encode_column(arr: np.ndarray) -> np.ndarray:
    """Map one key column to int64 codes. int64 columns pass through,
    object (string) columns get dictionary codes in first-seen order."""
    if arr.dtype == np.int64:
        return arr
    codes = np.empty(len(arr), dtype=np.int64)
    seen: dict = {}
    for i, v in enumerate(arr):
        c = seen.get(v)
        if c is None:
            c = len(seen)
            seen[v] = c
        codes[i] = c
    return codes


def group_codes(cols: list[np.ndarray]) -> np.ndarray:
    """Row-group codes for a multi-column key: equal rows get equal codes."""
    n = len(cols[0])
    if n == 0:
        return _EMPTY
    if len(cols) == 1:
        return cols[0]
    order = np.lexsort(cols[::-1])
    boundary = np.zeros(n, dtype=bool)
    for col in cols:
        sorted_col = col[order]
        boundary[1:] |= sorted_col[1:] != sorted_col[:-1]
    grouped = np.cumsum(boundary.astype(np.int64))
    codes = np.empty(n, dtype=np.int64)
    codes[order] = grouped
    return codes


def join_pairs(build_keys: list[np.ndarray],
               probe_keys: list[np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
    """Equality join: (probe_row, build_row) index pairs, probe-major order,
    build rows in original order within each probe row. String columns are
    co-encoded so codes agree across sides."""
    nb = len(build_keys[0])
    npr = len(probe_keys[0])
    if nb == 0 or npr == 0:
        return _EMPTY, _EMPTY
    cols = []
    for b, p in zip(build_keys, probe_keys):
        both = encode_column(np.concatenate([b, p]))
        cols.append(both)
    codes = group_codes(cols) if len(cols) > 1 else cols[0]
    bc, pc = codes[:nb], codes[nb:]
    order = np.argsort(bc, kind="stable")
    bc_sorted = bc[order]
    starts = np.searchsorted(bc_sorted, pc, side="left")
    ends = np.searchsorted(bc_sorted, pc, side="right")
    probe_row, pos = repeat_ranges(starts, ends - starts)
    return probe_row, order[pos]
