"""Sysadmin: computers on a network that fail and can be rebooted."""

from __future__ import annotations

import numpy as np

from relgrl.envs.base import DEFAULT_HORIZON, InstanceSpec, Simulator, register_simulator
from relgrl.relational import Domain, GroundFact, ObjectUniverse, RelationalState


class Sysadmin(Simulator):
    """A running computer stays up with probability

        stay_base + stay_scale * (1 + #running in-neighbours) / (1 + #in-neighbours)

    a down computer stays down unless rebooted, and ``reboot(c)`` brings ``c``
    up with certainty. Reward is the number of running computers minus
    ``reboot_cost`` when the action is a reboot.
    """

    name = "sysadmin"
    domain = Domain.create("sysadmin", [("link", 2), ("running", 1)], [("nop", 0), ("reboot", 1)])
    default_params = {"stay_base": 0.45, "stay_scale": 0.5, "reboot_cost": 0.75}
    static_predicates = frozenset({"link"})
    link_prob = 0.3  # extra edges beyond the random spanning tree

    def _in_neighbours(self, spec: InstanceSpec) -> list[tuple[str, tuple[str, ...]]]:
        nb = spec._cache.get("sys_nb")
        if nb is None:
            incoming: dict[str, list[str]] = {c: [] for c in spec.universe}
            for f in spec.static_facts:
                if f.predicate == "link":
                    incoming[f.args[1]].append(f.args[0])
            nb = [(c, tuple(sorted(incoming[c]))) for c in spec.universe]
            spec._cache["sys_nb"] = nb
        return nb

    def default_initial_facts(self, universe):
        return {GroundFact("running", (c,)) for c in universe}

    def transition(self, spec, state, action, rng):
        p = spec.param_map
        running = {f.args[0] for f in state.facts if f.predicate == "running"}
        target = action.args[0] if action.schema == "reboot" else None
        u = rng.random(len(spec.universe))
        nxt = []
        for i, (c, nbrs) in enumerate(self._in_neighbours(spec)):
            if c == target:
                up = True
            elif c in running:
                alive = sum(1 for d in nbrs if d in running)
                up = u[i] < p["stay_base"] + p["stay_scale"] * (1 + alive) / (1 + len(nbrs))
            else:
                up = False
            if up:
                nxt.append(GroundFact("running", (c,)))
        return self.build_state(spec, nxt)

    def reward(self, spec, state, action):
        n_up = sum(1 for f in state.facts if f.predicate == "running")
        return n_up - (spec.param_map["reboot_cost"] if action.schema == "reboot" else 0.0)

    def size_signature(self) -> str:
        return "SYS(n)"

    def generate(self, size_params, seed):
        if len(size_params) != 1:
            raise ValueError("sysadmin expects size parameters (n)")
        (n,) = size_params
        rng = np.random.default_rng([seed, n, 1])
        names = [f"c{i}" for i in range(n)]
        edges: set[tuple[int, int]] = set()
        order = rng.permutation(n)
        for k in range(1, n):
            parent = order[int(rng.integers(k))]
            child = order[k]
            edges.add((min(parent, child), max(parent, child)))
        for i in range(n):
            for j in range(i + 1, n):
                draw = rng.random()
                if (i, j) not in edges and draw < self.link_prob:
                    edges.add((i, j))
        static = set()
        for i, j in edges:
            static.add(GroundFact("link", (names[i], names[j])))
            static.add(GroundFact("link", (names[j], names[i])))
        universe = ObjectUniverse(tuple(names))
        return InstanceSpec(self.domain, universe, frozenset(self.default_initial_facts(universe)), frozenset(static),
                            DEFAULT_HORIZON, seed, name=f"sysadmin_{n}_s{seed}")


register_simulator(Sysadmin())
