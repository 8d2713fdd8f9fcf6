"""Academic Advising: take courses whose pass chance depends on passed prerequisites."""

from __future__ import annotations

import numpy as np

from relgrl.envs.base import DEFAULT_HORIZON, InstanceSpec, Simulator, register_simulator
from relgrl.relational import Domain, GroundFact, ObjectUniverse


class AcademicAdvising(Simulator):
    """``take_course(c)`` passes ``c`` with probability

        pass_prob * (1 + #passed prerequisites) / (1 + #prerequisites)

    Each step costs ``step_cost``; re-taking a course that was taken and not
    passed costs ``retake_cost`` on top. Once every required course is passed
    the reward is zero.
    """

    name = "academic_advising"
    domain = Domain.create(
        "academic_advising",
        [("passed", 1), ("prereq", 2), ("required", 1), ("taken", 1)],
        [("nop", 0), ("take_course", 1)],
    )
    default_params = {"pass_prob": 0.8, "step_cost": 1.0, "retake_cost": 5.0}
    static_predicates = frozenset({"prereq", "required"})

    def prerequisites(self, spec: InstanceSpec) -> dict[str, tuple[str, ...]]:
        pre = spec._cache.get("aa_pre")
        if pre is None:
            acc: dict[str, list[str]] = {c: [] for c in spec.universe}
            for f in spec.static_facts:
                if f.predicate == "prereq":
                    acc[f.args[1]].append(f.args[0])
            pre = {c: tuple(sorted(v)) for c, v in acc.items()}
            spec._cache["aa_pre"] = pre
        return pre

    def transition(self, spec, state, action, rng):
        u = rng.random()
        passed = {f.args[0] for f in state.facts if f.predicate == "passed"}
        taken = {f.args[0] for f in state.facts if f.predicate == "taken"}
        if action.schema == "take_course":
            c = action.args[0]
            taken.add(c)
            if c not in passed:
                pre = self.prerequisites(spec)[c]
                done = sum(1 for p in pre if p in passed)
                if u < spec.param_map["pass_prob"] * (1 + done) / (1 + len(pre)):
                    passed.add(c)
        dyn = [GroundFact("passed", (c,)) for c in passed] + [GroundFact("taken", (c,)) for c in taken]
        return self.build_state(spec, dyn)

    def reward(self, spec, state, action):
        p = spec.param_map
        passed = {f.args[0] for f in state.facts if f.predicate == "passed"}
        required = {f.args[0] for f in spec.static_facts if f.predicate == "required"}
        if required <= passed:
            return 0.0
        r = -p["step_cost"]
        if action.schema == "take_course":
            c = action.args[0]
            if GroundFact("taken", (c,)) in state.facts and c not in passed:
                r -= p["retake_cost"]
        return r

    def size_signature(self) -> str:
        return "AA(l,c,p)"

    def generate(self, size_params, seed):
        if len(size_params) != 3:
            raise ValueError("academic_advising expects size parameters (l, c, p)")
        levels, per_level, n_pre = size_params
        rng = np.random.default_rng([seed, levels, per_level, n_pre, 2])
        names = [[f"crs{lv}_{i}" for i in range(per_level)] for lv in range(1, levels + 1)]
        static = set()
        for lv in range(1, levels):
            below = names[lv - 1] if n_pre <= per_level else [c for row in names[:lv] for c in row]
            for c in names[lv]:
                k = min(n_pre, len(below))
                picks = rng.choice(len(below), size=k, replace=False)
                for j in sorted(int(x) for x in picks):
                    static.add(GroundFact("prereq", (below[j], c)))
        for c in names[-1]:
            static.add(GroundFact("required", (c,)))
        objects = tuple(c for row in names for c in row)
        return InstanceSpec(self.domain, ObjectUniverse(objects), frozenset(), frozenset(static),
                            DEFAULT_HORIZON, seed, name=f"academic_advising_{levels}_{per_level}_{n_pre}_s{seed}")


register_simulator(AcademicAdvising())
