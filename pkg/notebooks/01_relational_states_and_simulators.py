"""
Relational states and the benchmark simulators
==============================================

A state is a set of ground facts over named objects. The four benchmark
domains share one functional interface: ``step(spec, state, action, rng)``.
"""

import numpy as np

from relgrl.envs import format_instance, generate_instance, parse_instance, step
from relgrl.relational import action, fact

# %%
# The two-computer network where only c0 is up.
spec = parse_instance("""
domain: sysadmin
objects: c0 c1
static: link(c0,c1) link(c1,c0)
init: running(c0)
""")
s = spec.initial_state()
print(s.key())
print([str(a) for a in spec.actions])  # nop first, then reboots in name order

# %%
# One step of rebooting the down computer. Reward is counted on the
# current state: one computer up minus the reboot cost.
rng = np.random.default_rng(0)
res = step(spec, s, action("reboot", "c1"), rng)
print(res.reward, res.next_state.key())

# %%
# Generated instances are plain data and can be written to disk.
for name, size in [("sysadmin", [4]), ("academic_advising", [2, 2, 1]),
                   ("game_of_life", [2, 2]), ("wildfire", [2, 2])]:
    inst = generate_instance(name, size, seed=0)
    print(format_instance(inst))

# %%
# Monte-Carlo view of the shutdown rule on a 6-computer network: how often
# each computer is still up after one nop from the all-up state.
big = generate_instance("sysadmin", [6], seed=1)
counts = np.zeros(6)
for _ in range(5000):
    nxt = step(big, big.initial_state(), action("nop"), rng).next_state
    counts += [fact("running", c) in nxt for c in big.universe]
print(dict(zip(big.universe.objects, np.round(counts / 5000, 3))))
