"""Where one-step greed fails and lookahead rescues it.

Two hidden bits; the task is to call whether they agree. Each observable
reports one bit, so either observation alone is worthless: the myopic
compiler sees zero gain everywhere and stops immediately. Looking two levels
deep, the pair is decisive, and the mean gain of the two-level subtree is
strictly positive.
"""
import numpy as np

from defaulttrees import (
    ChanceNode,
    CompilerConfig,
    DecisionNode,
    InfluenceDiagram,
    ValueNode,
    compile_dd,
    compile_ddn,
    optimal_policy_eu,
    DTree,
    InferenceEngine,
)

g1 = ChanceNode("G1", ("up", "down"), (), np.array([[0.5, 0.5]]))
g2 = ChanceNode("G2", ("up", "down"), (), np.array([[0.5, 0.5]]))
gate = np.array([[0.9, 0.1], [0.1, 0.9]])
x1 = ChanceNode("X1", ("hi", "lo"), ("G1",), gate)
x2 = ChanceNode("X2", ("hi", "lo"), ("G2",), gate.copy())
net = InfluenceDiagram(
    (g1, g2, x1, x2),
    DecisionNode("D", ("same", "differ"), observed=("X1", "X2")),
    ValueNode(("G1", "G2", "D"),
              np.array([1.0, 0.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0])),
)

eng = InferenceEngine(net)
print("evoi(X1 alone) =", eng.evoi({}, "X1"))
print("evoi(X1 after X2=hi) =", eng.evoi({"X2": "hi"}, "X1"))
print("so the descending-gain condition fails:")
ok, violations = DTree.initial(net, eng).is_e_descending(1)
print("  e-descending:", ok, "| first witness:", violations[0])

t_greedy, s_greedy = compile_dd(net, CompilerConfig(algorithm="dd", max_enodes=3))
t_deep, s_deep = compile_ddn(
    net, CompilerConfig(algorithm="ddn", depth=2, max_enodes=3)
)

print("\nmyopic compiler:   ", s_greedy.enodes, "evidence nodes, EU", t_greedy.eu_direct())
print("depth-2 lookahead: ", s_deep.enodes, "evidence nodes, EU", t_deep.eu_direct())
print("fully informed EU: ", optimal_policy_eu(net))
