"""Hand-built plans on the fig2 fixture, checked against the oracle."""
from relgraph.engine import ExecEnv, PlanNode, execute, explain
from relgraph.mapping import ElementId
from relgraph.oracle import match_bruteforce
from relgraph.pattern import Pattern, PatternEdge
from relgraph.session import load_manifest

s = load_manifest("tests/data/fig2/manifest.json")
env = ExecEnv(s.catalog, s.graphs)
view = s.graphs["social"]

# triangle: (p)-[k:Knows]->(q), (p)-[l1:Likes]->(m), (q)-[l2:Likes]->(m)
# plan A: scan p, expand k to q, expand_intersect l1/l2 into m
planA = PlanNode("expand_intersect", {
    "target": "m",
    "legs": [
        {"anchor": "p", "elabel": "Likes", "dir": "out", "edge_var": "l1"},
        {"anchor": "q", "elabel": "Likes", "dir": "out", "edge_var": "l2"},
    ]}, (
    PlanNode("get_vertex", {"edge_var": "k", "vertex_var": "q", "mode": "dst"}, (
        PlanNode("expand_edge", {"anchor": "p", "elabel": "Knows", "dir": "out",
                                 "edge_var": "k"}, (
            PlanNode("scan_vertex", {"label": "Person", "var": "p"}),
        )),
    )),
))
resA = execute(planA, env, view)
print("plan A columns:", resA.names)
print("plan A rows:", resA.element_rows())

# plan B: hash lowering - M(P_k) join M(P_l1) join M(P_l2) via graph_hash_join
def edge_component(evar, svar, dvar, elabel):
    # scan edge rel + bind endpoints via relational joins on key attrs
    src_rel = view.edge_info[elabel].src_label
    dst_rel = view.edge_info[elabel].dst_label
    decl = view.edge_info[elabel].decl
    e_scan = PlanNode("scan", {"relation": elabel, "var": evar})
    s_scan = PlanNode("scan", {"relation": src_rel, "var": svar})
    j1 = PlanNode("hash_join", {
        "left_keys": [{"var": evar, "attr": decl.src_key}],
        "right_keys": [{"var": svar, "attr": decl.src_ref_key}],
        "build": "right"}, (e_scan, s_scan))
    d_scan = PlanNode("scan", {"relation": dst_rel, "var": dvar})
    return PlanNode("hash_join", {
        "left_keys": [{"var": evar, "attr": decl.dst_key}],
        "right_keys": [{"var": dvar, "attr": decl.dst_ref_key}],
        "build": "right"}, (j1, d_scan))

mk = edge_component("k", "p", "q", "Knows")
ml1 = edge_component("l1", "p", "m", "Likes")
ml2 = edge_component("l2", "q", "m", "Likes")
j = PlanNode("graph_hash_join", {"on": ["p"]}, (mk, ml1))
planB = PlanNode("graph_hash_join", {"on": ["q", "m"]}, (j, ml2))
resB = execute(planB, env, view)
rowsB = resB.element_rows()
print("plan B rows:", rowsB)

pat = Pattern((("p", "Person"), ("q", "Person"), ("m", "Message")),
              (PatternEdge("k", "Knows", "p", "q", True),
               PatternEdge("l1", "Likes", "p", "m", True),
               PatternEdge("l2", "Likes", "q", "m", True)), (), "none")
bt = match_bruteforce(view, pat)
oracle_rows = set()
for row in bt.rows:
    d = dict(zip([c.var for c in bt.columns], row))
    oracle_rows.add((d["p"], d["k"], d["q"], d["l1"], d["l2"], d["m"]))

resA_set = set()
for r in resA.element_rows():
    d = dict(zip(resA.names, r))
    resA_set.add((d["p"], d["k"], d["q"], d["l1"], d["l2"], d["m"]))
resB_set = set()
for r in rowsB:
    d = dict(zip(resB.names, r))
    resB_set.add((d["p"], d["k"], d["q"], d["l1"], d["l2"], d["m"]))

assert resA_set == oracle_rows, (resA_set, oracle_rows)
assert resB_set == oracle_rows, (resB_set, oracle_rows)
expected = (ElementId("Person", 0), ElementId("Knows", 0), ElementId("Person", 1),
            ElementId("Likes", 0), ElementId("Likes", 1), ElementId("Message", 0))
assert oracle_rows == {expected}
print("triangle OK via intersect and hash lowering")

# fused expand + either direction + filter + project + scan_graph_table
inner = PlanNode("expand", {"anchor": "a", "elabel": "Knows", "dir": "either",
                            "vertex_var": "b"}, (
    PlanNode("scan_vertex", {"label": "Person", "var": "a"}),
))
sgt = PlanNode("scan_graph_table", {
    "alias": "g", "graph": "social",
    "cols": [{"var": "a", "attr": "name", "out": "an"},
             {"var": "b", "attr": "name", "out": "bn"},
             {"var": "b", "attr": "ID", "out": "bid"},
             {"var": "b", "attr": "LABEL", "out": "bl"}]}, (inner,))
res = execute(sgt, env)
print("graph_table rows:", sorted(res.rows()))
assert len(res.rows()) == 4

# outer join to Place through value columns
sgt2 = PlanNode("scan_graph_table", {
    "alias": "g", "graph": "social",
    "cols": [{"var": "b", "attr": "name", "out": "pname"},
             {"var": "b", "attr": "place_id", "out": "pid"}]}, (
    PlanNode("get_vertex", {"edge_var": "k", "vertex_var": "b", "mode": "dst"}, (
        PlanNode("expand_edge", {"anchor": "a", "elabel": "Knows", "dir": "out",
                                 "edge_var": "k"}, (
            PlanNode("scan_vertex", {"label": "Person", "var": "a"}),
        )),
    )),
))
outer = PlanNode("project", {"cols": [
    {"var": "g", "attr": "pname", "out": "pname"},
    {"var": "pl", "attr": "pl_name", "out": "city"}]}, (
    PlanNode("filter", {"preds": [
        {"left": {"var": "pl", "attr": "pl_name"}, "op": "=",
         "right": {"value": "Beijing"}}]}, (
        PlanNode("hash_join", {
            "left_keys": [{"var": "g", "attr": "pid"}],
            "right_keys": [{"var": "pl", "attr": "place_id"}],
            "build": "right"}, (
            sgt2,
            PlanNode("scan", {"relation": "Place", "var": "pl"}),
        )),
    )),
))
res2 = execute(outer, env)
print("hybrid rows:", res2.rows())
assert res2.rows() == [("Jerry", "Beijing")], res2.rows()
print(explain(outer))
print("engine smoke OK")
