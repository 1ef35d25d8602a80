"""The brute-force oracle: independent ground truth at desk scale.

Nothing here shares code with the engine's value-of-information logic; the
oracle enumerates, which is exactly why it can referee the greedy compilers.
"""
from defaulttrees import (
    CompilerConfig,
    DTree,
    NetworkGenSpec,
    compile_dd,
    generate_network,
    optimal_dtree,
    optimal_policy_eu,
    verify_property3,
)

spec = NetworkGenSpec(seed=4, hidden=2, items=3, item_card=(2, 2),
                      alternatives=3, sharpness=1.0)
net = generate_network(spec)
print("generated a 3-item network; evidence items:", list(net.decision.observed))

bound = optimal_policy_eu(net)
print("fully informed policy EU:", bound)

for budget in range(4):
    _, eu = optimal_dtree(net, budget)
    print(f"best tree with <= {budget} evidence nodes: EU {eu:.6f}"
          f"  ({eu / bound:.1%} of the optimum)")

tree, stats = compile_dd(net, CompilerConfig(min_gain=0.0, max_enodes=3))
_, best_eu = optimal_dtree(net, stats.enodes)
print(f"\ngreedy tree with {stats.enodes} evidence nodes: EU {tree.eu_direct():.6f}")
print(f"oracle optimum at that budget:        EU {best_eu:.6f}")

report = verify_property3(net, DTree.initial(net), budget=2)
print("\noptimal-expansion check on the fresh tree:", report.status)
print("  maximal-gain nodes:", list(report.max_gain_dnodes))
print("  optimal expansions found:", report.optimal_count,
      "| expanding a maximal-gain node:", report.optimal_expanding_max_set)

same_again = generate_network(spec)
print("\nsame seed, same bytes:",
      same_again.chance("E1").cpt.tolist() == net.chance("E1").cpt.tolist())
