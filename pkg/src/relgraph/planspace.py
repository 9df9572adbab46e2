"""Exact search-space counts for the two optimizer families.

Two plan spaces are counted for the same pattern:

* count_agnostic: the match-to-join rewrite turns a pattern with n
  vertices and m edges into a join among n vertex aliases and m edge
  aliases, where each edge alias carries key-equality conditions to its
  two endpoint aliases; the join graph is the pattern's incidence graph.
  We count binary join trees over those n+m relations in which every
  internal node joins two connected subsets of the join graph (no cross
  products). Operand order is significant, so a single join of two
  relations counts twice; the single-edge pattern (a chain of three
  relations) therefore counts 8 trees.

* count_aware: decomposition trees that start from a single-vertex leaf
  and grow one complete-star center at a time, i.e. trees whose right
  children are all leaves. Each such tree is exactly one vertex ordering
  whose prefixes are all connected, so a single edge counts 2 (expansion
  from either endpoint) and a path with m edges counts 2^m. Trees that
  hash-join two multi-vertex subtrees are still explored by the plan
  search, but they are excluded from this count: the vertex-at-a-time
  family is the one with a 4^(n-1)-style cap, and it is the family the
  adjacency operators are built around.

Counts are exact big integers. Both counters have naive no-memoization
twins (naive_agnostic, naive_aware) that generate every tree / ordering
explicitly; tests cross-check the fast counters against them on small
patterns.
"""

from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass
from itertools import permutations
from typing import Iterable, Iterator, Optional

from .errors import PlanError, SizeLimitError
from .pattern import Pattern, PatternEdge

# The relation cap admits the path family up to eight pattern edges
# (9 + 8 = 17 relations). Dense patterns near the cap would still need
# billions of split enumerations, so the counter also meters its own
# submask iterations and gives up past AGNOSTIC_WORK_CAP of them.
AGNOSTIC_RELATION_CAP = 17
AGNOSTIC_WORK_CAP = 5_000_000
AWARE_VERTEX_CAP = 10


# -- bitmask graph helpers ------------------------------------------------


def _bit_connected(mask: int, adj: list[int]) -> bool:
    if mask == 0:
        return False
    seen = mask & -mask
    frontier = seen
    while frontier:
        reach = 0
        m = frontier
        while m:
            b = m & -m
            m ^= b
            reach |= adj[b.bit_length() - 1]
        frontier = reach & mask & ~seen
        seen |= frontier
    return seen == mask


def _incidence(p: Pattern) -> tuple[list[str], list[int]]:
    """The join graph of the match-to-join rewrite: one node per vertex
    alias and per edge alias, an edge wherever a key equality holds."""
    names = list(p.vertex_vars) + list(p.edge_vars)
    idx = {v: i for i, v in enumerate(names)}
    adj = [0] * len(names)
    for e in p.edges:
        ei = idx[e.var]
        for v in {e.src, e.dst}:
            vi = idx[v]
            adj[ei] |= 1 << vi
            adj[vi] |= 1 << ei
    return names, adj


def _vertex_adjacency(p: Pattern) -> tuple[list[str], list[int]]:
    verts = list(p.vertex_vars)
    idx = {v: i for i, v in enumerate(verts)}
    adj = [0] * len(verts)
    for e in p.edges:
        if e.is_loop():
            continue
        i, j = idx[e.src], idx[e.dst]
        adj[i] |= 1 << j
        adj[j] |= 1 << i
    return verts, adj


def _require_connected(p: Pattern) -> None:
    if not p.is_connected():
        raise PlanError("search-space counting needs a connected pattern")


# -- the relational (join-order) space ------------------------------------


def count_agnostic(p: Pattern) -> int:
    """Cross-product-free binary join trees over the n+m relations of
    the rewritten match, counted exactly (ordered operands)."""
    _require_connected(p)
    names, adj = _incidence(p)
    k = len(names)
    if k > AGNOSTIC_RELATION_CAP:
        raise SizeLimitError(
            f"{k} relations exceed the {AGNOSTIC_RELATION_CAP}-relation "
            f"cap for exact join-tree counting")
    if k == 1:
        return 1

    conn: dict[int, bool] = {}

    def connected(mask: int) -> bool:
        hit = conn.get(mask)
        if hit is None:
            hit = conn[mask] = _bit_connected(mask, adj)
        return hit

    memo: dict[int, int] = {}
    work = 0

    def trees(mask: int) -> int:
        nonlocal work
        if mask & (mask - 1) == 0:
            return 1
        hit = memo.get(mask)
        if hit is not None:
            return hit
        total = 0
        sub = (mask - 1) & mask
        while sub:
            work += 1
            if work > AGNOSTIC_WORK_CAP:
                raise SizeLimitError(
                    "join-tree counting exceeded the split-enumeration "
                    f"budget ({AGNOSTIC_WORK_CAP} submasks); the pattern "
                    "is too dense for an exact count")
            rest = mask ^ sub
            if connected(sub) and connected(rest):
                total += trees(sub) * trees(rest)
            sub = (sub - 1) & mask
        memo[mask] = total
        return total

    return trees((1 << k) - 1)


def naive_agnostic(p: Pattern) -> int:
    """Same count by generating every join tree, no memoization. Only
    sensible for small patterns; the cross-check oracle in tests."""
    _require_connected(p)
    names, adj = _incidence(p)
    k = len(names)

    def gen(mask: int) -> Iterator[object]:
        if mask & (mask - 1) == 0:
            yield mask
            return
        sub = (mask - 1) & mask
        while sub:
            rest = mask ^ sub
            if _bit_connected(sub, adj) and _bit_connected(rest, adj):
                for lt in gen(sub):
                    for rt in gen(rest):
                        yield (lt, rt)
            sub = (sub - 1) & mask

    return sum(1 for _ in gen((1 << k) - 1))


# -- the graph (decomposition-tree) space ----------------------------------


def count_aware(p: Pattern) -> int:
    """Vertex-at-a-time decomposition trees, counted exactly. Equals the
    number of vertex orderings with all prefixes connected; self-loops
    ride along with their vertex and do not affect the count."""
    _require_connected(p)
    verts, adj = _vertex_adjacency(p)
    n = len(verts)
    if n > AWARE_VERTEX_CAP:
        raise SizeLimitError(
            f"{n} pattern vertices exceed the {AWARE_VERTEX_CAP}-vertex "
            f"cap for exact decomposition-tree counting")

    conn: dict[int, bool] = {}

    def connected(mask: int) -> bool:
        hit = conn.get(mask)
        if hit is None:
            hit = conn[mask] = _bit_connected(mask, adj)
        return hit

    memo: dict[int, int] = {}

    def orders(mask: int) -> int:
        if mask & (mask - 1) == 0:
            return 1
        hit = memo.get(mask)
        if hit is not None:
            return hit
        total = 0
        m = mask
        while m:
            b = m & -m
            m ^= b
            rest = mask ^ b
            if connected(rest):
                total += orders(rest)
        memo[mask] = total
        return total

    return orders((1 << n) - 1)


def naive_aware(p: Pattern) -> int:
    """Same count by filtering every vertex permutation for connected
    prefixes; the cross-check oracle in tests."""
    _require_connected(p)
    verts, adj = _vertex_adjacency(p)
    n = len(verts)
    count = 0
    for perm in permutations(range(n)):
        mask = 0
        ok = True
        for i in perm:
            if mask and not (adj[i] & mask):
                ok = False
                break
            mask |= 1 << i
        if ok:
            count += 1
    return count


# -- pattern families -------------------------------------------------------


def path_pattern(m: int) -> Pattern:
    """Path with m edges (m+1 vertices); m=0 is a single vertex."""
    if m < 0:
        raise ValueError("a path needs a non-negative edge count")
    verts = tuple((f"v{i}", "V") for i in range(m + 1))
    edges = tuple(PatternEdge(f"e{i}", "E", f"v{i - 1}", f"v{i}")
                  for i in range(1, m + 1))
    return Pattern(verts, edges)


def cycle_pattern(n: int) -> Pattern:
    """Simple directed cycle over n vertices."""
    if n < 3:
        raise ValueError("a cycle needs at least three vertices")
    verts = tuple((f"v{i}", "V") for i in range(n))
    edges = tuple(PatternEdge(f"e{i}", "E", f"v{i}", f"v{(i + 1) % n}")
                  for i in range(n))
    return Pattern(verts, edges)


_FAMILIES = {"path": path_pattern, "cycle": cycle_pattern}


# -- reporting ---------------------------------------------------------------


@dataclass
class SpaceReport:
    """One measured pattern: both counts, their ratio, and wall time."""

    family: str
    size: int
    agnostic_count: Optional[int]
    aware_count: Optional[int]
    micros_agnostic: Optional[int]
    micros_aware: Optional[int]
    note: str = ""

    @property
    def descriptor(self) -> str:
        return f"{self.family}({self.size})"

    @property
    def ratio(self) -> Optional[float]:
        if not self.agnostic_count or not self.aware_count:
            return None
        return self.agnostic_count / self.aware_count


def measure(family: str, size: int) -> SpaceReport:
    build = _FAMILIES.get(family)
    if build is None:
        raise ValueError(
            f"unknown pattern family {family!r}; expected one of "
            f"{sorted(_FAMILIES)}")
    p = build(size)
    agnostic = aware = None
    mic_agn = mic_aw = None
    notes = []
    t0 = time.perf_counter_ns()
    try:
        agnostic = count_agnostic(p)
        mic_agn = (time.perf_counter_ns() - t0) // 1000
    except SizeLimitError:
        notes.append("agnostic: SizeLimit")
    t0 = time.perf_counter_ns()
    try:
        aware = count_aware(p)
        mic_aw = (time.perf_counter_ns() - t0) // 1000
    except SizeLimitError:
        notes.append("aware: SizeLimit")
    return SpaceReport(family, size, agnostic, aware, mic_agn, mic_aw,
                       "; ".join(notes))


def report(family: str, sizes: Iterable[int]) -> list[SpaceReport]:
    return [measure(family, s) for s in sizes]


def standard_report() -> list[SpaceReport]:
    """The stock comparison: path family m=2..8, cycle family n=3..6."""
    return report("path", range(2, 9)) + report("cycle", range(3, 7))


CSV_COLUMNS = ("family", "size", "agnostic_count", "aware_count", "ratio",
               "micros_agnostic", "micros_aware")


def _cells(r: SpaceReport) -> list[str]:
    return [
        r.family,
        str(r.size),
        "SizeLimit" if r.agnostic_count is None else str(r.agnostic_count),
        "SizeLimit" if r.aware_count is None else str(r.aware_count),
        "" if r.ratio is None else f"{r.ratio:.6g}",
        "" if r.micros_agnostic is None else str(r.micros_agnostic),
        "" if r.micros_aware is None else str(r.micros_aware),
    ]


def render_csv(rows: list[SpaceReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow(_cells(r))
    return buf.getvalue()


def render_text(rows: list[SpaceReport]) -> str:
    table = [list(CSV_COLUMNS)] + [_cells(r) for r in rows]
    widths = [max(len(line[i]) for line in table) for i in range(len(CSV_COLUMNS))]
    out = []
    for line in table:
        out.append("  ".join(c.rjust(w) for c, w in zip(line, widths)).rstrip())
    return "\n".join(out) + "\n"
