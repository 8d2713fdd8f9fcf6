"""Command-line entry point: ``relgrl {train,eval,features,gen,bench}``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from relgrl import checkpoint
from relgrl.envs.base import generate_instance, known_domains, sample_state_space
from relgrl.envs.instance_format import format_instance, load_instance
from relgrl.features.enumerate import enumerate_features
from relgrl.features.grammar import dump_features
from relgrl.grl import CurriculumStage, Hyper, run_leapfrog
from relgrl.harness import (
    ExperimentConfig, _curves_csv, _hyper_value, _results_csv, _sizes, CurvePoint, default_output_dir,
    evaluate_random, evaluate_zero_shot, load_config, run_experiment, summary_table,
)


def _size(text: str) -> list[int]:
    return [int(x) for x in text.split(",")]


def _overrides(pairs: list[str]) -> dict:
    out = {}
    for p in pairs or []:
        if "=" not in p:
            raise SystemExit(f"--hyper expects name=value, got {p!r}")
        k, v = p.split("=", 1)
        out[k.strip()] = _hyper_value(k.strip(), v.strip())
    return out


def cmd_train(args) -> int:
    hyper = Hyper.for_domain(args.domain, **_overrides(args.hyper))
    stages = [CurriculumStage(args.domain, s, args.episodes) for s in _sizes(args.stages)]
    curves = []
    names = {}

    def before(i, spec, net, layout):
        names[i] = spec.name
        print(f"stage {i}: {spec.name} ({len(spec.universe)} objects, {len(spec.actions)} actions)")

    def on_episode(i, rec):
        curves.append(CurvePoint(args.seed, i, names[i], rec.episode, rec.ret, rec.epsilon, rec.loss))

    res = run_leapfrog(stages, hyper, seed=args.seed, before_stage=before, on_episode=on_episode)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    checkpoint.save(out, res.net, res.layout)
    print(f"{res.layout.n_features} features, input size {res.layout.input_dim}; wrote {out}")
    if args.curves:
        Path(args.curves).write_text(_curves_csv(curves))
    return 0


def cmd_eval(args) -> int:
    net, layout = checkpoint.load(args.checkpoint)
    records = []
    for path in args.instances:
        spec = load_instance(path)
        records.append(evaluate_zero_shot(net, layout, spec, args.episodes, args.seed))
        if args.random:
            records.append(evaluate_random(spec, args.episodes, args.seed))
    out = Path(args.output_dir) if args.output_dir else default_output_dir()
    out.mkdir(parents=True, exist_ok=True)
    (out / "results.csv").write_text(_results_csv(records))
    for r in records:
        print(f"{r.instance:<28} {r.policy:<7} mean {r.mean:10.3f} std {r.std:9.3f}")
    print(f"wrote {out / 'results.csv'}")
    return 0


def cmd_features(args) -> int:
    if args.instance:
        spec = load_instance(args.instance)
    else:
        spec = generate_instance(args.domain, _size(args.size), args.seed)
    samples = sample_state_space(spec, args.episodes, args.seed)
    feats = enumerate_features(spec.domain, samples, args.complexity, spec.universe)
    text = dump_features(feats)
    if args.out:
        Path(args.out).write_text(text)
        print(f"{len(feats)} features from {len(samples)} states; wrote {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def cmd_gen(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for i in range(args.count):
        spec = generate_instance(args.domain, _size(args.size), args.seed + i)
        path = out / f"{spec.name}.inst"
        path.write_text(format_instance(spec))
        print(path)
    return 0


def cmd_bench(args) -> int:
    config = load_config(args.config)
    if args.output_dir:
        config.output_dir = Path(args.output_dir)
    res = run_experiment(config)
    for f in res.files.values():
        print(f"wrote {f}")
    return 0 if all(r.status == "ok" for r in res.records) else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="relgrl", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("train", help="leapfrog training, writes a checkpoint")
    t.add_argument("--domain", default="sysadmin", choices=known_domains())
    t.add_argument("--stages", default="3;4;6", help="sizes per stage, e.g. '3;4;6' or '2,2;3,3'")
    t.add_argument("--episodes", type=int, default=1250, help="episodes per stage")
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--hyper", action="append", metavar="NAME=VALUE")
    t.add_argument("--out", default="model.ckpt")
    t.add_argument("--curves", help="also write per-episode training records to this CSV")
    t.set_defaults(func=cmd_train)

    e = sub.add_parser("eval", help="zero-shot greedy evaluation of a checkpoint")
    e.add_argument("checkpoint")
    e.add_argument("instances", nargs="+")
    e.add_argument("--episodes", type=int, default=100)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--random", action="store_true", help="also evaluate the uniform random policy")
    e.add_argument("--output-dir")
    e.set_defaults(func=cmd_eval)

    f = sub.add_parser("features", help="enumerate and dump a feature set")
    f.add_argument("--domain", default="sysadmin", choices=known_domains())
    f.add_argument("--size", default="3")
    f.add_argument("--instance", help="instance file instead of a generated instance")
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--complexity", "-k", type=int, default=5)
    f.add_argument("--episodes", type=int, default=100, help="random-walk episodes for state sampling")
    f.add_argument("--out")
    f.set_defaults(func=cmd_features)

    g = sub.add_parser("gen", help="write generated instance files")
    g.add_argument("--domain", default="sysadmin", choices=known_domains())
    g.add_argument("--size", required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--count", type=int, default=1)
    g.add_argument("--out", default="instances")
    g.set_defaults(func=cmd_gen)

    b = sub.add_parser("bench", help="full experiment from a config file")
    b.add_argument("config")
    b.add_argument("--output-dir")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
