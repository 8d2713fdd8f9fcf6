"""Experiment orchestration: leapfrog training, zero-shot evaluation, statistics and result files.

Config files are line oriented ``key = value`` pairs; ``#`` starts a comment.

=================  ===========================================================
key                meaning
=================  ===========================================================
domain             sysadmin | academic_advising | game_of_life | wildfire
stages             curriculum sizes, ``;`` between stages, ``,`` inside one
                   (``3;4;6`` or ``2,2,2;3,3,3``)
stage_episodes     training episodes per stage (default 1250)
test_instances     generated test sizes, same syntax as ``stages``
test_files         instance files to evaluate on, ``;`` separated
test_seed          generator seed of the first test instance (default 1000)
runs               independent training runs (default 10)
eval_episodes      greedy episodes per test instance (default 100)
seed               base seed; run ``r`` uses ``seed + r`` (default 0)
output_dir         where files are written (default ``$GRL_OUTPUT_DIR`` or
                   ``results``)
hyper.<name>       override a field of :class:`relgrl.grl.Hyper`
=================  ===========================================================
"""

from __future__ import annotations

import csv
import io
import logging
import math
import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from scipy import stats

from relgrl.encoding import EncodingLayout
from relgrl.envs.base import InstanceSpec, episode_rng, generate_instance, step
from relgrl.envs.instance_format import load_instance
from relgrl.grl import CurriculumStage, GrlSession, Hyper, run_leapfrog
from relgrl.qnet import QNet
from relgrl.relational import GroundAction, RelationalState

log = logging.getLogger(__name__)

OUTPUT_ENV = "GRL_OUTPUT_DIR"
EVAL_SEED_OFFSET = 104_729


def default_output_dir() -> Path:
    return Path(os.environ.get(OUTPUT_ENV, "results"))


@dataclass
class ExperimentConfig:
    domain: str = "sysadmin"
    stages: list[tuple[int, ...]] = field(default_factory=lambda: [(3,), (4,), (6,)])
    stage_episodes: int = 1250
    test_instances: list[tuple[int, ...]] = field(default_factory=lambda: [(10,), (15,)])
    test_files: list[str] = field(default_factory=list)
    test_seed: int = 1000
    runs: int = 10
    eval_episodes: int = 100
    seed: int = 0
    output_dir: Path | None = None
    hyper: dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        if self.runs < 1:
            raise ValueError("runs must be at least 1")
        if self.eval_episodes < 1:
            raise ValueError("eval_episodes must be at least 1")
        if not self.stages:
            raise ValueError("at least one curriculum stage is required")
        if not self.test_instances and not self.test_files:
            raise ValueError("no test instances configured")
        self.hyperparameters()  # validates overrides early

    @property
    def run_seeds(self) -> list[int]:
        return [self.seed + r for r in range(self.runs)]

    @property
    def out(self) -> Path:
        return Path(self.output_dir) if self.output_dir is not None else default_output_dir()

    def hyperparameters(self) -> Hyper:
        return Hyper.for_domain(self.domain, **self.hyper)

    def curriculum(self) -> list[CurriculumStage]:
        return [CurriculumStage(self.domain, tuple(s), self.stage_episodes) for s in self.stages]

    def test_specs(self) -> list[InstanceSpec]:
        specs = [generate_instance(self.domain, list(s), self.test_seed + j)
                 for j, s in enumerate(self.test_instances)]
        for path in self.test_files:
            spec = load_instance(path)
            if spec.domain.name != self.domain:
                raise ValueError(f"{path}: instance of {spec.domain.name!r}, expected {self.domain!r}")
            specs.append(spec)
        return specs


def _sizes(text: str) -> list[tuple[int, ...]]:
    out = []
    for part in text.split(";"):
        part = part.strip()
        if part:
            out.append(tuple(int(x) for x in part.split(",")))
    return out


_HYPER_TYPES = {f.name: f.type for f in fields(Hyper)}


def _hyper_value(name: str, raw: str):
    if name not in _HYPER_TYPES:
        raise ValueError(f"unknown hyperparameter {name!r}")
    kind = str(_HYPER_TYPES[name])
    if name == "hidden":
        return tuple(int(x) for x in raw.split(",") if x.strip())
    if kind == "bool":
        if raw.lower() not in ("true", "false", "1", "0", "yes", "no"):
            raise ValueError(f"hyper.{name}: expected a boolean, got {raw!r}")
        return raw.lower() in ("true", "1", "yes")
    if kind.startswith("int"):
        return None if raw.lower() == "none" else int(raw)
    return float(raw)


def parse_config(text: str) -> ExperimentConfig:
    kw: dict[str, object] = {}
    hyper: dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key = value")
        key, value = (x.strip() for x in line.split("=", 1))
        try:
            if key.startswith("hyper."):
                hyper[key[6:]] = _hyper_value(key[6:], value)
            elif key in ("stages", "test_instances"):
                kw[key] = _sizes(value)
            elif key == "test_files":
                kw[key] = [p.strip() for p in value.split(";") if p.strip()]
            elif key in ("stage_episodes", "test_seed", "runs", "eval_episodes", "seed"):
                kw[key] = int(value)
            elif key == "domain":
                kw[key] = value
            elif key == "output_dir":
                kw[key] = Path(value)
            else:
                raise ValueError(f"unknown key {key!r}")
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    kw["hyper"] = hyper
    return ExperimentConfig(**kw)


def load_config(path) -> ExperimentConfig:
    return parse_config(Path(path).read_text())


@dataclass
class ResultRecord:
    instance: str
    run_seed: int
    returns: list[float]
    policy: str = "grl"
    status: str = "ok"

    @property
    def mean(self) -> float:
        return float(np.mean(self.returns)) if self.returns else math.nan

    @property
    def std(self) -> float:
        return float(np.std(self.returns)) if self.returns else math.nan


def evaluate_policy(spec: InstanceSpec, choose: Callable[[RelationalState], GroundAction],
                    episodes: int, seed: int = 0) -> list[float]:
    """Undiscounted returns of ``episodes`` horizon-length episodes under ``choose``."""
    out = []
    for ep in range(episodes):
        rng = episode_rng(spec, seed * 1_000_003 + EVAL_SEED_OFFSET + ep)
        s = spec.initial_state()
        total = 0.0
        for t in range(spec.horizon):
            res = step(spec, s, choose(s), rng, t)
            total += res.reward
            s = res.next_state
        out.append(total)
    return out


def evaluate_zero_shot(net: QNet, layout: EncodingLayout, spec: InstanceSpec, episodes: int = 100,
                       seed: int = 0, hyper: Hyper | None = None) -> ResultRecord:
    """Greedy rollouts of the frozen network on ``spec``; ties are broken at random.

    Q-values are cached per state but never updated, and the network is not
    trained. Raises ``LayoutError`` when the layout does not fit the domain.
    """
    if episodes < 1:
        raise ValueError("episodes must be at least 1")
    hyper = hyper or Hyper.for_domain(spec.domain.name)
    before = net.checksum()
    session = GrlSession(spec, net, layout, hyper, seed=seed)
    returns = evaluate_policy(spec, lambda s: session.actions[session.greedy_index(s)], episodes, seed)
    if net.checksum() != before:
        raise RuntimeError("evaluation modified the network")
    return ResultRecord(spec.name, seed, returns, "grl")


def evaluate_random(spec: InstanceSpec, episodes: int = 100, seed: int = 0) -> ResultRecord:
    """Uniformly random ground actions."""
    actions = spec.actions
    rng = np.random.default_rng([seed, 0xA11])
    returns = evaluate_policy(spec, lambda s: actions[int(rng.integers(len(actions)))], episodes, seed)
    return ResultRecord(spec.name, seed, returns, "random")


def welch_greater(a: Sequence[float], b: Sequence[float]) -> tuple[float, float]:
    """One-sided Welch t-test of mean(a) > mean(b); returns (t, p)."""
    res = stats.ttest_ind(np.asarray(a, float), np.asarray(b, float), equal_var=False, alternative="greater")
    return float(res.statistic), float(res.pvalue)


@dataclass
class CurvePoint:
    run_seed: int
    stage: int
    instance: str
    episode: int
    ret: float
    epsilon: float
    loss: float


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    records: list[ResultRecord]
    curves: list[CurvePoint]
    files: dict[str, Path]

    def returns(self, policy: str, instance: str | None = None) -> list[float]:
        """Per-run mean returns of ``policy``, optionally on one instance."""
        return [r.mean for r in self.records
                if r.policy == policy and r.status == "ok" and (instance is None or r.instance == instance)]


def _fmt(x: float) -> str:
    return repr(float(x))


def _results_csv(records: list[ResultRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["instance", "run_seed", "policy", "status", "episodes", "mean", "std", "returns"])
    for r in records:
        w.writerow([r.instance, r.run_seed, r.policy, r.status, len(r.returns), _fmt(r.mean), _fmt(r.std),
                    ";".join(_fmt(x) for x in r.returns)])
    return buf.getvalue()


def _curves_csv(points: list[CurvePoint]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["run_seed", "stage", "instance", "episode", "return", "epsilon", "loss"])
    for p in points:
        w.writerow([p.run_seed, p.stage, p.instance, p.episode, _fmt(p.ret), _fmt(p.epsilon), _fmt(p.loss)])
    return buf.getvalue()


def _plot_data(records: list[ResultRecord], instances: list[str]) -> str:
    """gnuplot data: one block per (instance, policy), columns run_index mean std."""
    lines = []
    for name in instances:
        for policy in ("grl", "random"):
            rows = [r for r in records if r.instance == name and r.policy == policy and r.status == "ok"]
            lines.append(f"# {name} {policy}")
            lines.append("# run mean std")
            for i, r in enumerate(rows):
                lines.append(f"{i} {_fmt(r.mean)} {_fmt(r.std)}")
            lines.extend(["", ""])
    return "\n".join(lines)


def summary_table(records: list[ResultRecord], instances: list[str]) -> str:
    """Mean over runs of per-run mean returns; spread is the population std over runs."""
    rows = [f"{'instance':<28} {'policy':<7} {'runs':>4} {'mean':>10} {'std':>9} {'p(grl>rnd)':>11}"]
    for name in instances:
        per = {}
        for policy in ("grl", "random"):
            per[policy] = [r.mean for r in records if r.instance == name and r.policy == policy and r.status == "ok"]
        p = math.nan
        if len(per["grl"]) > 1 and len(per["random"]) > 1:
            p = welch_greater(per["grl"], per["random"])[1]
        for policy, vals in per.items():
            m = float(np.mean(vals)) if vals else math.nan
            s = float(np.std(vals)) if vals else math.nan
            ptxt = f"{p:11.3g}" if policy == "grl" else ""
            rows.append(f"{name:<28} {policy:<7} {len(vals):>4} {m:10.3f} {s:9.3f} {ptxt}")
    return "\n".join(rows)


def run_experiment(config: ExperimentConfig, echo: Callable[[str], None] | None = print,
                   test_specs: list[InstanceSpec] | None = None) -> ExperimentResult:
    """Leapfrog training then zero-shot evaluation for every run seed; writes the result files."""
    hyper = config.hyperparameters()
    specs = test_specs if test_specs is not None else config.test_specs()
    names = [s.name for s in specs]
    records: list[ResultRecord] = []
    curves: list[CurvePoint] = []
    for run_seed in config.run_seeds:
        run_curves: list[CurvePoint] = []
        try:
            stage_names = {}

            def before(i, spec, net, layout):
                stage_names[i] = spec.name

            def on_episode(i, rec):
                run_curves.append(CurvePoint(run_seed, i, stage_names[i], rec.episode, rec.ret,
                                             rec.epsilon, rec.loss))

            res = run_leapfrog(config.curriculum(), hyper, seed=run_seed, before_stage=before,
                               on_episode=on_episode)
            for spec in specs:
                records.append(evaluate_zero_shot(res.net, res.layout, spec, config.eval_episodes, run_seed, hyper))
                records.append(evaluate_random(spec, config.eval_episodes, run_seed))
        except Exception as exc:  # a failing run is reported, not fatal to the experiment
            log.exception("run %d failed", run_seed)
            records.append(ResultRecord("*", run_seed, [], "grl", f"failed: {type(exc).__name__}: {exc}"))
        curves.extend(run_curves)
        if echo is not None:
            done = [r for r in records if r.run_seed == run_seed]
            echo(f"run {run_seed}: " + ", ".join(f"{r.instance}/{r.policy}={r.mean:.2f}" for r in done))

    out = config.out
    out.mkdir(parents=True, exist_ok=True)
    files = {"results": out / "results.csv", "curves": out / "training_curves.csv", "plot": out / "plot_data.dat"}
    files["results"].write_text(_results_csv(records))
    files["curves"].write_text(_curves_csv(curves))
    files["plot"].write_text(_plot_data(records, names))
    if echo is not None:
        echo(summary_table(records, names))
    return ExperimentResult(config, records, curves, files)


def with_overrides(config: ExperimentConfig, **kw) -> ExperimentConfig:
    return replace(config, **kw)
