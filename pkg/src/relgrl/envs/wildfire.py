"""Wildfire: fire spreads between neighbouring fuelled cells."""

from __future__ import annotations

import math

import numpy as np

from relgrl.envs.base import DEFAULT_HORIZON, InstanceSpec, Simulator, register_simulator
from relgrl.envs.grid import grid_cells, neighbor_facts, neighbour_table
from relgrl.relational import Domain, GroundFact, ObjectUniverse


class Wildfire(Simulator):
    """Per step and cell:

    * ``put_out(l)`` extinguishes ``l``; otherwise a burning cell keeps burning.
    * An unburnt cell with fuel that is not being cut out ignites with
      probability ``1 - exp(-ignite_rate * #burning neighbours)``.
    * A cell loses its fuel once it has burnt or been cut out.

    Reward is ``-burn_cost`` per burning cell and ``-action_cost`` for any
    action other than ``nop``.
    """

    name = "wildfire"
    domain = Domain.create(
        "wildfire",
        [("burning", 1), ("neighbor", 2), ("out_of_fuel", 1)],
        [("cut_out", 1), ("nop", 0), ("put_out", 1)],
    )
    default_params = {"ignite_rate": 0.4, "burn_cost": 5.0, "action_cost": 1.0}
    static_predicates = frozenset({"neighbor"})

    def transition(self, spec, state, action, rng):
        rate = spec.param_map["ignite_rate"]
        burning = {f.args[0] for f in state.facts if f.predicate == "burning"}
        no_fuel = {f.args[0] for f in state.facts if f.predicate == "out_of_fuel"}
        target = action.args[0] if action.args else None
        u = rng.random(len(spec.universe))
        nxt = []
        for i, (c, nbrs) in enumerate(neighbour_table(spec)):
            put_out = action.schema == "put_out" and c == target
            cut = action.schema == "cut_out" and c == target
            if put_out:
                burn = False
            elif c in burning:
                burn = True
            elif c in no_fuel or cut:
                burn = False
            else:
                n = sum(1 for d in nbrs if d in burning)
                burn = u[i] < 1.0 - math.exp(-rate * n)
            if burn:
                nxt.append(GroundFact("burning", (c,)))
            if c in no_fuel or c in burning or cut:
                nxt.append(GroundFact("out_of_fuel", (c,)))
        return self.build_state(spec, nxt)

    def reward(self, spec, state, action):
        p = spec.param_map
        n = sum(1 for f in state.facts if f.predicate == "burning")
        return -p["burn_cost"] * n - (p["action_cost"] if action.schema != "nop" else 0.0)

    def size_signature(self) -> str:
        return "WF(x,y)"

    def generate(self, size_params, seed):
        if len(size_params) != 2:
            raise ValueError("wildfire expects size parameters (x, y)")
        x, y = size_params
        rng = np.random.default_rng([seed, x, y, 4])
        cells = grid_cells(x, y)
        start = cells[int(rng.integers(len(cells)))]
        init = {GroundFact("burning", (start,))}
        return InstanceSpec(self.domain, ObjectUniverse(tuple(cells)), frozenset(init),
                            frozenset(neighbor_facts(x, y)), DEFAULT_HORIZON, seed,
                            name=f"wildfire_{x}_{y}_s{seed}")


register_simulator(Wildfire())
