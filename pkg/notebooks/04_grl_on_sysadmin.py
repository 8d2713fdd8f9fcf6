"""
Generalized Q-learning with a leapfrog curriculum
=================================================

Tabular Q-learning whose table entries are initialised by a network over
abstract vectors. The network is trained from a replay buffer of table
values and carried from one instance to the next, larger one.

Set ``EPISODES`` to 1250 for the full protocol (about a minute).
"""

import numpy as np

from relgrl.envs import generate_instance
from relgrl.grl import CurriculumStage, GrlSession, Hyper, run_leapfrog
from relgrl.harness import evaluate_random, evaluate_zero_shot
from relgrl.relational import RelationalState, fact

EPISODES = 300

hyper = Hyper.for_domain("sysadmin")
stages = [CurriculumStage("sysadmin", (n,), EPISODES) for n in (3, 4, 6)]


def first_look(i, spec, net, layout):
    rec = evaluate_zero_shot(net, layout, spec, 5, seed=0, hyper=hyper)
    print(f"before stage {i} on {spec.name}: greedy return {rec.mean:.1f}")


res = run_leapfrog(stages, hyper, seed=0, before_stage=first_look)
for st in res.stages:
    rets = [r.ret for r in st.records]
    print(st.spec.name, "first 50:", np.mean(rets[:50]).round(1), "last 50:", np.mean(rets[-50:]).round(1))

# %%
# What does the network think of a state with one computer up?
spec = generate_instance("sysadmin", [6], 0)
sess = GrlSession(spec, res.net, res.layout, hyper)
s = RelationalState(spec.static_facts | {fact("running", "c0")})
q = sess.q_values(s)
for a, v in sorted(zip(spec.actions, q), key=lambda t: -t[1])[:4]:
    print(f"{str(a):<12} {v:8.2f}")

# %%
# Zero-shot on bigger networks, against the uniform random policy.
for n in (10, 15):
    test = generate_instance("sysadmin", [n], 1000)
    g = evaluate_zero_shot(res.net, res.layout, test, 50, seed=0)
    r = evaluate_random(test, 50, seed=0)
    print(f"SYS({n}): greedy {g.mean:.1f} +- {g.std:.1f}, random {r.mean:.1f} +- {r.std:.1f}")
