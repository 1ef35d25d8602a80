"""Build a small decision network by hand, validate it, and round-trip it
through the JSON model format.

The running example: a hidden condition H, one observable symptom A, and a
choice between a targeted treatment d1 (great if H is present, useless
otherwise) and a safe default d2.
"""
import numpy as np

from defaulttrees import (
    ChanceNode,
    DecisionNode,
    InfluenceDiagram,
    ValueNode,
    diagram_to_dict,
    enumerate_evidence_states,
    evidence_items,
    model_fingerprint,
    validate,
)

h = ChanceNode("H", values=("present", "absent"), parents=(), cpt=np.array([[0.6, 0.4]]))
a = ChanceNode(
    "A",
    values=("positive", "negative"),
    parents=("H",),
    cpt=np.array([[0.9, 0.1], [0.2, 0.8]]),
)
decision = DecisionNode("Treat", alternatives=("targeted", "safe"), observed=("A",))
value = ValueNode(parents=("H", "Treat"), utility=np.array([1.0, 0.5, 0.0, 0.5]))
net = InfluenceDiagram((h, a), decision, value)

print("violations:", validate(net) or "none")
print("evidence items:", evidence_items(net))
print("evidence states:", [s.as_dict() for s in enumerate_evidence_states(net)])
print("fingerprint:", model_fingerprint(net)[:16], "…")

doc = diagram_to_dict(net)
print("\nJSON document keys:", sorted(doc))
print("CPT of A, flat row-major:", doc["chance_nodes"][1]["cpt"])

# validation treats problems as data, not exceptions
broken = InfluenceDiagram(
    (h, ChanceNode("A", ("positive", "negative"), ("H",),
                   np.array([[0.9, 0.2], [0.2, 0.8]]))),
    decision,
    value,
)
print("\na deliberately broken CPT reports:")
for v in validate(broken):
    print("  -", v)
