"""Exact inference and the value of observing evidence before deciding.

evoi(path, item) is the expected gain in utility from examining one more
item; eu_expand scales it by the probability of ever reaching that path, so
it measures what one tree expansion is worth globally.
"""
import numpy as np

from defaulttrees import (
    ChanceNode,
    DecisionNode,
    InferenceEngine,
    InfluenceDiagram,
    ValueNode,
)

h = ChanceNode("H", ("h1", "h2"), (), np.array([[0.6, 0.4]]))
a = ChanceNode("A", ("a1", "a2"), ("H",), np.array([[0.9, 0.1], [0.2, 0.8]]))
noise = ChanceNode("N", ("n1", "n2"), (), np.array([[0.5, 0.5]]))
net = InfluenceDiagram(
    (h, a, noise),
    DecisionNode("D", ("d1", "d2"), observed=("A", "N")),
    ValueNode(("H", "D"), np.array([1.0, 0.5, 0.0, 0.5])),
)

eng = InferenceEngine(net)

print("P(A=a1) =", eng.prob_of_path({"A": "a1"}))
print("EU(d1 | nothing observed) =", eng.expected_utility("d1", {}))
print("EU(d1 | A=a1) =", eng.expected_utility("d1", {"A": "a1"}))
print("best decisions given nothing:", eng.best_decisions({}))
print("best decisions given A=a2:", eng.best_decisions({"A": "a2"}))

print("\nvalue of information:")
print("  evoi(A | {}) =", eng.evoi({}, "A"))
print("  evoi(N | {}) =", eng.evoi({}, "N"), " (pure noise)")
print("  max-evoi picks:", eng.max_evoi({}))

print("\nexpansion gains (path probability times evoi):")
print("  eu_expand({}, A) =", eng.eu_expand({}, "A"))
print("  eu_expand({A=a1}, N) =", eng.eu_expand({"A": "a1"}, "N"))

print("\nnetwork evaluations so far:", eng.counter.calls)
print("(each evaluation is one pass over the joint space; repeated queries hit the cache)")
