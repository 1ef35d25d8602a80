"""Executing a compiled tree, including stopping early.

Every node of a default tree carries a decision, so processing can end at
any time: answer the questions you have time for, then take the current
default. The trace records every node visited.
"""
import numpy as np

from defaulttrees import (
    ChanceNode,
    CompilerConfig,
    DecisionNode,
    InfluenceDiagram,
    ValueNode,
    compile_dd,
)

typ = ChanceNode("Typ", ("t1", "t2", "t3"), (), np.array([[0.5, 0.3, 0.2]]))
a = ChanceNode("A", ("a1", "a2", "a3"), ("Typ",),
               np.array([[0.7, 0.2, 0.1], [0.2, 0.6, 0.2], [0.1, 0.3, 0.6]]))
b = ChanceNode("B", ("b1", "b2"), ("Typ",),
               np.array([[0.8, 0.2], [0.3, 0.7], [0.5, 0.5]]))
net = InfluenceDiagram(
    (typ, a, b),
    DecisionNode("D", ("d1", "d2", "d3"), observed=("A", "B")),
    ValueNode(("Typ", "D"), np.array([1.0, 0.2, 0.0, 0.1, 0.9, 0.3, 0.0, 0.4, 0.8])),
)

tree, _ = compile_dd(net, CompilerConfig(min_gain=0.0))

print("full run, answering everything:")
trace = tree.walk(["a2", "b2"])
print("  visited:", trace.visited, "->", trace.decisions, f"({trace.status})")

print("\nstopping at the root (no time for any observation):")
trace = tree.walk(["stop"])
print("  visited:", trace.visited, "->", trace.decisions, f"({trace.status})")

print("\nstopping after one answer (a2 leads to a second question):")
trace = tree.walk(["a2", "stop"])
print("  visited:", trace.visited, "->", trace.decisions, f"({trace.status})")

print("\nthe same trace as the CLI and the browser walker emit:")
import json

print(json.dumps(trace.to_dict(), indent=2))
