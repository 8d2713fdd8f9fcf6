"""
Description-logic features
==========================

Features are concept expressions built from the domain's predicates. They
are enumerated up to a complexity bound over sampled states, and features
with identical denotations on every sample are merged.
"""

from relgrl.envs import generate_instance, sample_state_space
from relgrl.features import (
    ExistsConcept, PrimitiveConcept, PrimitiveRole, dump_features, enumerate_features, eval_concept, parse_node,
)
from relgrl.relational import ObjectUniverse, RelationalState, fact

u = ObjectUniverse(("c0", "c1"))
s = RelationalState.of([fact("running", "c0"), fact("link", "c0", "c1"), fact("link", "c1", "c0")])

up = PrimitiveConcept("running")
print(eval_concept(up, s, u))                                           # {'c0'}
print(eval_concept(ExistsConcept(PrimitiveRole("link"), up), s, u))     # computers with a running neighbour
print(eval_concept(parse_node("Not(running)"), s, u))

# %%
# Enumerate over the states reached by random walks on a small instance.
spec = generate_instance("sysadmin", [3], 0)
samples = sample_state_space(spec, episodes=100, seed=0)
for k in range(1, 6):
    print(k, len(enumerate_features(spec.domain, samples, k, spec.universe)))

print(dump_features(enumerate_features(spec.domain, samples, 5, spec.universe)))

# %%
# Richer domains give more distinct features at the same bound.
for name, size in [("academic_advising", [2, 2, 2]), ("game_of_life", [2, 2]), ("wildfire", [2, 2])]:
    inst = generate_instance(name, size, 0)
    feats = enumerate_features(inst.domain, sample_state_space(inst, 100, 0), 5, inst.universe)
    print(name, len(feats), [str(f) for f in feats[:6]])
