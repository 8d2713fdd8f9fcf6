import numpy as np
import pytest

import checks
from relgrl.encoding import Encoder, EncodingLayout, LayoutError, encode_action, encode_state
from relgrl.envs import generate_instance, sample_state_space
from relgrl.features import Feature, PrimitiveConcept, enumerate_features
from relgrl.relational import GroundAction, ObjectUniverse, RelationalState, action, fact

SYS = generate_instance("sysadmin", [2], 0).domain
F_UP = Feature(PrimitiveConcept("running"), 0)
LAYOUT = EncodingLayout.for_domain(SYS, [F_UP])
U2 = ObjectUniverse(("c0", "c1"))
S_EG = RelationalState.of([fact("running", "c0"), fact("link", "c0", "c1"), fact("link", "c1", "c0")])


def test_running_example_vectors():
    assert encode_state(LAYOUT, S_EG, U2).tolist() == [1]
    assert encode_action(LAYOUT, GroundAction("nop"), S_EG, U2).tolist() == [1, 0, 0]
    assert encode_action(LAYOUT, action("reboot", "c0"), S_EG, U2).tolist() == [0, 1, 1]
    assert encode_action(LAYOUT, action("reboot", "c1"), S_EG, U2).tolist() == [0, 1, 0]


def test_other_computer_up_gives_same_abstract_state():
    swapped = RelationalState.of([fact("running", "c1"), fact("link", "c0", "c1"), fact("link", "c1", "c0")])
    assert encode_state(LAYOUT, swapped, U2).tolist() == [1]


def test_empty_state_is_all_zero():
    assert encode_state(LAYOUT, RelationalState(), U2).tolist() == [0]


def test_dimension_contract_across_instance_sizes():
    spec = generate_instance("game_of_life", [2, 2], 0)
    feats = enumerate_features(spec.domain, sample_state_space(spec, 20, 0), 4, spec.universe)
    layout = EncodingLayout.for_domain(spec.domain, feats)
    nf, na, n = len(feats), len(spec.domain.action_names), spec.domain.max_action_arity
    assert layout.input_dim == nf + na + n * nf
    for size in ([2, 2], [3, 4], [5, 5]):
        big = generate_instance("game_of_life", size, 1)
        x = Encoder(layout, big.universe).inputs(big.initial_state(), big.actions)
        assert x.shape == (len(big.actions), layout.input_dim)
        # exactly one action-name bit per row
        assert (x[:, nf:nf + na].sum(axis=1) == 1).all()


def test_unused_parameter_blocks_are_zero():
    spec = generate_instance("wildfire", [2, 2], 0)
    feats = enumerate_features(spec.domain, sample_state_space(spec, 20, 0), 3, spec.universe)
    layout = EncodingLayout.for_domain(spec.domain, feats)
    v = encode_action(layout, GroundAction("nop"), spec.initial_state(), spec.universe)
    assert v[layout.action_index("nop")] == 1
    assert not v[len(layout.action_names):].any()


def test_unknown_action_schema():
    with pytest.raises(LayoutError):
        encode_action(LAYOUT, action("put_out", "c0"), S_EG, U2)
    with pytest.raises(LayoutError):
        LAYOUT.check_domain(generate_instance("wildfire", [2, 2], 0).domain)


def test_layout_text_round_trip():
    spec = generate_instance("academic_advising", [2, 2, 2], 0)
    feats = enumerate_features(spec.domain, sample_state_space(spec, 20, 0), 4, spec.universe)
    layout = EncodingLayout.for_domain(spec.domain, feats)
    assert EncodingLayout.from_text(layout.to_text()) == layout
    with pytest.raises(LayoutError):
        EncodingLayout.from_text("nonsense")
    with pytest.raises(LayoutError):
        EncodingLayout(layout.features, ("z", "a"), 1)


def test_encoder_rows_match_functional_encoding():
    spec = generate_instance("sysadmin", [4], 2)
    feats = enumerate_features(spec.domain, sample_state_space(spec, 30, 0), 5, spec.universe)
    layout = EncodingLayout.for_domain(spec.domain, feats)
    enc = Encoder(layout, spec.universe)
    for s in sorted(sample_state_space(spec, 10, 3), key=lambda s: s.key()):
        x = enc.inputs(s, spec.actions)
        for row, a in zip(x, spec.actions):
            want = np.concatenate([encode_state(layout, s, spec.universe),
                                   encode_action(layout, a, s, spec.universe)])
            assert row.tolist() == want.tolist()


def test_normalization_is_opt_in():
    spec = generate_instance("sysadmin", [3], 0)
    layout = EncodingLayout.for_domain(spec.domain, [F_UP])
    raw = Encoder(layout, spec.universe).inputs(spec.initial_state(), spec.actions)
    assert raw[0, 0] == 3
    norm = Encoder(layout, spec.universe, normalize=True).inputs(spec.initial_state(), spec.actions)
    assert norm[0, 0] == 1.0


@pytest.mark.parametrize("name", checks.RENAMING_DOMAINS)
def test_renaming_invariance(name):
    assert checks.renaming_failures(name, triples=25) == []
