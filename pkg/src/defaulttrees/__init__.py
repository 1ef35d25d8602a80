"""Compile discrete decision networks into anytime default trees.

A default tree is a humanly-executable decision procedure: evidence nodes
examine one observable item each and carry a default decision, default nodes
decide. Processing may stop at any node, so the tree is an anytime procedure
whose expected utility grows with every expansion, up to the fully informed
optimum.
"""

from .compiler import (
    CompilationStats,
    CompilerConfig,
    compile_dd,
    compile_ddn,
    compile_diagram,
    enumerate_candidates,
    mean_eu_expand,
    stopping,
)
from .diagram import (
    ChanceNode,
    DecisionNode,
    EvidencePath,
    EvidenceState,
    InfluenceDiagram,
    ValueNode,
    Violation,
    diagram_from_dict,
    diagram_to_dict,
    enumerate_evidence_states,
    evidence_items,
    load_model,
    model_fingerprint,
    save_model,
    validate,
)
from .dtree import (
    DTree,
    DTreeNode,
    ExpansionSubtree,
    Shape,
    STOP,
    WalkTrace,
    dt_compiles,
    dtree_eu_direct,
    dtree_eu_theorem1,
    evid_path,
    expand,
    expand_subtree,
    is_e_descending,
    path,
    walk,
)
from .errors import (
    BudgetTooLargeError,
    ClosedNodeError,
    DefaultTreeError,
    FingerprintMismatchError,
    IllegalAssignmentError,
    IllegalResponseError,
    InvalidDiagramError,
    ItemAlreadyObservedError,
    NoEvidenceItemsWarning,
    OracleCapError,
    SchemaError,
    ZeroProbabilityPathError,
)
from .inference import (
    DecisionSet,
    InferenceCounter,
    InferenceEngine,
    best_decisions,
    eu_expand,
    evoi,
    expected_utility,
    joint_prob,
    max_evoi,
    prob_of_path,
)
from .oracle import (
    BruteForce,
    NetworkGenSpec,
    Property3Report,
    generate_network,
    optimal_dtree,
    optimal_policy_eu,
    verify_property3,
)

__version__ = "0.1.0"
