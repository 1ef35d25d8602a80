"""Randomized invariants over generated networks."""

from hypothesis import given, settings, strategies as st

from defaulttrees import (
    DTree,
    InferenceEngine,
    NetworkGenSpec,
    enumerate_evidence_states,
    generate_network,
    validate,
)
from defaulttrees.diagram import canonical_model_bytes

specs = st.builds(
    NetworkGenSpec,
    seed=st.integers(0, 10_000),
    hidden=st.integers(1, 2),
    items=st.integers(1, 3),
    alternatives=st.integers(2, 3),
    sharpness=st.sampled_from([0.3, 1.0, 3.0]),
)


@given(specs)
@settings(max_examples=40, deadline=None)
def test_generated_networks_validate(spec):
    assert validate(generate_network(spec)) == []


@given(specs)
@settings(max_examples=25, deadline=None)
def test_generator_is_pure(spec):
    assert canonical_model_bytes(generate_network(spec)) == canonical_model_bytes(
        generate_network(spec)
    )


@given(specs)
@settings(max_examples=25, deadline=None)
def test_state_count_is_the_product_of_cardinalities(spec):
    d = generate_network(spec)
    states = enumerate_evidence_states(d)
    expected = 1
    for item in d.decision.observed:
        expected *= d.chance(item).card
    assert len(states) == expected
    assert len({tuple(s.assignments) for s in states}) == expected


@given(specs, st.randoms(use_true_random=False))
@settings(max_examples=25, deadline=None)
def test_theorem1_identity_on_random_expansions(spec, rnd):
    d = generate_network(spec)
    eng = InferenceEngine(d)
    tree = DTree.initial(d, eng)
    for _ in range(3):
        open_nodes = tree.open_dnodes()
        if not open_nodes:
            break
        e = rnd.choice(open_nodes)
        free = [i for i in d.decision.observed if i not in dict(e.path)]
        tree = tree.expand(e.id, rnd.choice(free))
        assert abs(tree.eu_direct() - tree.eu_theorem1()) <= 1e-9


@given(specs)
@settings(max_examples=20, deadline=None)
def test_evoi_nonnegative_everywhere(spec):
    d = generate_network(spec)
    eng = InferenceEngine(d)
    items = d.decision.observed
    for state in enumerate_evidence_states(d):
        for k in range(len(items)):
            path = dict(state.assignments[:k])
            if eng.prob_of_path(path) <= 0:
                continue
            for item in items:
                if item not in path:
                    assert eng.evoi(path, item) >= -1e-12
