"""Game of Life with transition noise on a binary neighbour graph."""

from __future__ import annotations

import numpy as np

from relgrl.envs.base import DEFAULT_HORIZON, InstanceSpec, Simulator, register_simulator
from relgrl.envs.grid import grid_cells, neighbor_facts, neighbour_table
from relgrl.relational import Domain, GroundFact, ObjectUniverse


class GameOfLife(Simulator):
    """Conway's rule per cell, then each cell flips with probability ``noise``;
    ``set_alive(l)`` forces ``l`` alive. Reward is the number of live cells
    minus ``set_cost`` for a ``set_alive`` action.
    """

    name = "game_of_life"
    domain = Domain.create("game_of_life", [("alive", 1), ("neighbor", 2)], [("nop", 0), ("set_alive", 1)])
    default_params = {"noise": 0.1, "set_cost": 1.0}
    static_predicates = frozenset({"neighbor"})
    init_alive_prob = 0.5

    def transition(self, spec, state, action, rng):
        noise = spec.param_map["noise"]
        alive = {f.args[0] for f in state.facts if f.predicate == "alive"}
        forced = action.args[0] if action.schema == "set_alive" else None
        u = rng.random(len(spec.universe))
        nxt = []
        for i, (c, nbrs) in enumerate(neighbour_table(spec)):
            n = sum(1 for d in nbrs if d in alive)
            live = n in (2, 3) if c in alive else n == 3
            if u[i] < noise:
                live = not live
            if c == forced or live:
                nxt.append(GroundFact("alive", (c,)))
        return self.build_state(spec, nxt)

    def reward(self, spec, state, action):
        n = sum(1 for f in state.facts if f.predicate == "alive")
        return n - (spec.param_map["set_cost"] if action.schema == "set_alive" else 0.0)

    def size_signature(self) -> str:
        return "GoL(x,y)"

    def generate(self, size_params, seed):
        if len(size_params) != 2:
            raise ValueError("game_of_life expects size parameters (x, y)")
        x, y = size_params
        rng = np.random.default_rng([seed, x, y, 3])
        cells = grid_cells(x, y)
        draws = rng.random(len(cells))
        init = {GroundFact("alive", (c,)) for c, u in zip(cells, draws) if u < self.init_alive_prob}
        return InstanceSpec(self.domain, ObjectUniverse(tuple(cells)), frozenset(init),
                            frozenset(neighbor_facts(x, y)), DEFAULT_HORIZON, seed,
                            name=f"game_of_life_{x}_{y}_s{seed}")


register_simulator(GameOfLife())
