"""
Abstract state and action vectors
=================================

The network never sees object names. A state becomes the vector of feature
values, an action becomes a one-hot action name plus, per parameter, the
membership of the argument in each feature. The size does not depend on
the number of objects.
"""

from relgrl.encoding import Encoder, EncodingLayout, encode_action, encode_state
from relgrl.envs import generate_instance, sample_state_space
from relgrl.features import Feature, PrimitiveConcept, enumerate_features
from relgrl.relational import GroundAction, ObjectUniverse, RelationalState, action, fact

small = generate_instance("sysadmin", [2], 0)
layout = EncodingLayout.for_domain(small.domain, [Feature(PrimitiveConcept("running"), 0)])
u = ObjectUniverse(("c0", "c1"))
s = RelationalState.of([fact("running", "c0"), fact("link", "c0", "c1"), fact("link", "c1", "c0")])
print(encode_state(layout, s, u))                          # [1]
print(encode_action(layout, GroundAction("nop"), s, u))    # [1 0 0]
print(encode_action(layout, action("reboot", "c0"), s, u))  # [0 1 1]
print(encode_action(layout, action("reboot", "c1"), s, u))  # [0 1 0]

# %%
# A full feature set learned on SYS(3) encodes SYS(30) with the same width.
spec = generate_instance("sysadmin", [3], 0)
feats = enumerate_features(spec.domain, sample_state_space(spec, 100, 0), 5, spec.universe)
layout = EncodingLayout.for_domain(spec.domain, feats)
print("input size", layout.input_dim)
for n in (3, 10, 30):
    inst = generate_instance("sysadmin", [n], 0)
    x = Encoder(layout, inst.universe).inputs(inst.initial_state(), inst.actions)
    print(n, x.shape)
