import itertools
import random

from relgraph.graphopt.canon import canonical_key, canonical_order, isomorphic_bruteforce
from relgraph.pattern import Pattern, PatternEdge


def P(verts, edges):
    return Pattern(tuple(verts), tuple(edges))


tri1 = P([("p", "Person"), ("q", "Person"), ("m", "Message")],
         [PatternEdge("k", "Knows", "p", "q"),
          PatternEdge("l1", "Likes", "p", "m"),
          PatternEdge("l2", "Likes", "q", "m")])
# same triangle, renamed and reordered
tri2 = P([("x", "Message"), ("a", "Person"), ("b", "Person")],
         [PatternEdge("e2", "Likes", "b", "x"),
          PatternEdge("e0", "Knows", "a", "b"),
          PatternEdge("e1", "Likes", "a", "x")])
assert canonical_key(tri1) == canonical_key(tri2)
# flipped Knows is a different directed pattern only if asymmetric: here p,q
# are distinguished by k's direction but the whole shape maps a<->b; flipping
# Knows gives an isomorphic pattern (swap p,q)
tri3 = P([("p", "Person"), ("q", "Person"), ("m", "Message")],
         [PatternEdge("k", "Knows", "q", "p"),
          PatternEdge("l1", "Likes", "p", "m"),
          PatternEdge("l2", "Likes", "q", "m")])
assert canonical_key(tri1) == canonical_key(tri3)
# undirected Knows differs from directed
tri4 = P([("p", "Person"), ("q", "Person"), ("m", "Message")],
         [PatternEdge("k", "Knows", "p", "q", directed=False),
          PatternEdge("l1", "Likes", "p", "m"),
          PatternEdge("l2", "Likes", "q", "m")])
assert canonical_key(tri1) != canonical_key(tri4)
# one Likes reversed: genuinely different (m points at q)
tri5 = P([("p", "Person"), ("q", "Person"), ("m", "Message")],
         [PatternEdge("k", "Knows", "p", "q"),
          PatternEdge("l1", "Likes", "p", "m"),
          PatternEdge("l2", "Likes", "m", "q")])
assert canonical_key(tri1) != canonical_key(tri5)
ordr = canonical_order(tri1)
assert set(ordr) == {"p", "q", "m"}
print("hand cases OK")

# randomized cross-check against brute force
rng = random.Random(7)
VL = ["A", "B"]
EL = ["e", "f"]


def rand_pattern(n):
    verts = [(f"v{i}", rng.choice(VL)) for i in range(n)]
    pairs = list(itertools.combinations(range(n), 2))
    edges = []
    while True:
        edges = []
        used = set()
        for i, (a, b) in enumerate(pairs):
            if rng.random() < 0.6:
                lab = rng.choice(EL)
                kind = rng.randrange(3)
                if kind == 0:
                    edges.append(PatternEdge(f"e{i}", lab, f"v{a}", f"v{b}"))
                elif kind == 1:
                    edges.append(PatternEdge(f"e{i}", lab, f"v{b}", f"v{a}"))
                else:
                    edges.append(PatternEdge(f"e{i}", lab, f"v{a}", f"v{b}", directed=False))
                used.update((a, b))
        if edges:
            break
    return P(verts, edges)


def relabel(p, seed):
    r = random.Random(seed)
    vs = list(p.vertices)
    r.shuffle(vs)
    names = {v: f"w{i}" for i, (v, _) in enumerate(vs)}
    verts = [(names[v], lab) for v, lab in vs]
    edges = []
    for e in p.edges:
        src, dst = names[e.src], names[e.dst]
        if not e.directed and r.random() < 0.5:
            src, dst = dst, src
        edges.append(PatternEdge(e.var, e.label, src, dst, e.directed))
    r.shuffle(edges)
    return P(verts, edges)


agree = mismatch = 0
for trial in range(300):
    n = rng.randrange(2, 5)
    p1 = rand_pattern(n)
    if trial % 3 == 0:
        p2 = relabel(p1, trial)
    else:
        p2 = rand_pattern(n)
    same_key = canonical_key(p1) == canonical_key(p2)
    same_bf = isomorphic_bruteforce(p1, p2)
    if same_key != same_bf:
        print("MISMATCH", p1.describe(), "||", p2.describe(), same_key, same_bf)
        mismatch += 1
    else:
        agree += 1
print(f"cross-check: {agree} agree, {mismatch} mismatch")
assert mismatch == 0
print("canon smoke OK")
