"""Command-line interface.

Subcommands:

- ``forge gen-data --dataset D0 --per-class 100 --seed 7 --out data.jsonl``
- ``forge train --spec run.toml --out model.policy``
- ``forge eval --ckpt model.policy --episodes 15 --out logs.jsonl``
- ``forge ablate --suite suite.toml --out reports/``
- ``forge report --in reports/``
- ``forge config --out run.toml``  (write the documented defaults)

Exit codes: 0 success, 2 configuration error, 3 runtime error.  The
``FORGE_MASTER_SEED`` environment variable overrides every seed source.
All commands are deterministic: rerunning with the same inputs reproduces
output files byte for byte.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import rng as _rng
from .config import (
    ConfigError,
    RunConfig,
    default_config_text,
    load_config,
    load_suite,
)
from .harness.ablation import run_ablation_suite, write_reports
from .harness.experiments import ExperimentConfigError, ExperimentSpec, build_experiment
from .marl.env import ConjectureEnv, episode_log_to_dict
from .marl.maddpg import execute, load_policies, save_policies, train
from .prover.premises import PremiseConsistencyError
from .surfaces.complexes import ParameterError
from .surfaces.datapoints import write_dataset

_CONFIG_ERRORS = (
    ConfigError,
    ExperimentConfigError,
    ParameterError,
    PremiseConsistencyError,
)


def _size_kwargs(cfg: RunConfig) -> dict:
    s = cfg.surfaces
    return {
        "sizes": {
            "sphere": tuple(s.sphere_points),
            "torus": tuple(s.grid_side),
            "klein": tuple(s.grid_side),
        },
        "union_sizes": {
            "sphere": tuple(s.union_sphere_points),
            "torus": tuple(s.union_grid_side),
            "klein": tuple(s.union_grid_side),
        },
        "union_parts": tuple(s.union_parts),
    }


def _cmd_gen_data(args) -> int:
    cfg = load_config(args.spec)
    seed = cfg.master_seed(args.seed)
    per_class = args.per_class or cfg.surfaces.per_class
    count = write_dataset(
        args.out, args.dataset, per_class, seed, **_size_kwargs(cfg)
    )
    print(f"wrote {count} records to {args.out}")
    return 0


def _experiment_pieces(cfg: RunConfig, dataset: str, model: str, seed: int,
                       per_class: int | None = None):
    spec = ExperimentSpec(
        dataset_id=dataset,
        model=model,
        per_class=per_class or cfg.harness.per_class,
        seeds=(seed,),
        eval_episodes=cfg.harness.eval_episodes,
    )
    data_seed = _rng.derive_seed(seed, "data", dataset, spec.per_class)
    data, premises, wiring = build_experiment(spec, data_seed)
    return spec, data, premises, wiring, data_seed


def _cmd_train(args) -> int:
    cfg = load_config(args.spec)
    seed = cfg.master_seed(args.seed)
    exp = cfg.experiment
    spec, data, premises, wiring, data_seed = _experiment_pieces(
        cfg, exp.dataset, exp.model, seed
    )
    if not wiring.rl:
        raise ConfigError(f"model {exp.model} has no trainable agents")
    env = ConjectureEnv(
        data, premises, wiring, cfg.regression, cfg.marl,
        run_seed=_rng.derive_seed(seed, "train"),
    )
    policies = train(env, seed=_rng.derive_seed(seed, "learner"))
    policies.stats["experiment"] = {
        "dataset": exp.dataset,
        "model": exp.model,
        "per_class": spec.per_class,
        "seed": seed,
        "data_seed": data_seed,
    }
    out = args.out or f"{exp.dataset}_{exp.model}_seed{seed}.policy"
    save_policies(out, policies)
    print(f"trained {exp.model} on {exp.dataset} for {cfg.marl.total_steps} steps")
    print(f"episodes: {policies.stats['episodes']}, "
          f"proof terminations: {policies.stats['proof_terminations']}")
    print(f"checkpoint: {out}")
    return 0


def _cmd_eval(args) -> int:
    cfg = load_config(args.spec)
    policies = load_policies(args.ckpt)
    meta = policies.stats.get("experiment")
    if meta is None:
        raise ConfigError("checkpoint carries no experiment metadata")
    seed = cfg.master_seed(args.seed if args.seed is not None else meta["seed"])
    _, data, premises, wiring, _ = _experiment_pieces(
        cfg, meta["dataset"], meta["model"], seed, per_class=meta["per_class"]
    )
    env = ConjectureEnv(
        data, premises, wiring, cfg.regression, cfg.marl,
        run_seed=_rng.derive_seed(seed, "eval"),
    )
    logs = execute(env, policies if wiring.rl else None, args.episodes)
    out = args.out or "eval_logs.jsonl"
    with open(out, "w", encoding="utf-8") as fh:
        for log in logs:
            fh.write(json.dumps(episode_log_to_dict(log), sort_keys=True,
                                separators=(",", ":")) + "\n")
    proven = sum(
        1 for log in logs for step in log.steps
        if step.rho >= 1.0 and step.checks_passed
    )
    print(f"{len(logs)} episodes, {sum(l.n_statements for l in logs)} statements, "
          f"{proven} proven terminals")
    print(f"logs: {out}")
    return 0


def _cmd_ablate(args) -> int:
    cfg = load_config(args.suite)
    seed = cfg.master_seed(args.seed)
    cells = load_suite(args.suite)
    specs = [
        ExperimentSpec(
            dataset_id=dataset,
            model=model,
            per_class=cfg.harness.per_class,
            seeds=tuple(cfg.harness.seeds),
            eval_episodes=cfg.harness.eval_episodes,
        )
        for dataset, model in cells
    ]
    run_ablation_suite(
        specs, seed, args.out,
        marl_cfg=cfg.marl, reg_cfg=cfg.regression,
        resamples=cfg.harness.resamples,
        concept_mode=cfg.harness.concept_premises,
    )
    print(f"ablation suite complete: {args.out}")
    return 0


def _cmd_report(args) -> int:
    cfg = load_config(args.spec)
    seed = cfg.master_seed(args.seed)
    summary = write_reports(
        args.in_dir, resamples=cfg.harness.resamples, seed=seed,
        concept_mode=cfg.harness.concept_premises,
    )
    print(f"report rebuilt for {len(summary['cells'])} cell(s): {args.in_dir}")
    return 0


def _cmd_config(args) -> int:
    text = default_config_text()
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"wrote defaults to {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="forge",
        description="Surface data, conjecture search, proving, and ablations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-data", help="generate a dataset file")
    p.add_argument("--dataset", required=True, choices=["D0", "D1", "D2", "D3"])
    p.add_argument("--per-class", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--spec", default=None, help="run-config TOML")
    p.set_defaults(func=_cmd_gen_data)

    p = sub.add_parser("train", help="train one model on one dataset")
    p.add_argument("--spec", required=True, help="run-config TOML")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None, help="checkpoint path")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("eval", help="run evaluation episodes from a checkpoint")
    p.add_argument("--ckpt", required=True)
    p.add_argument("--episodes", type=int, default=15)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--spec", default=None, help="run-config TOML")
    p.add_argument("--out", default=None, help="episode-log JSONL path")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("ablate", help="run an ablation suite")
    p.add_argument("--suite", required=True, help="suite TOML")
    p.add_argument("--out", required=True, help="report directory")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_ablate)

    p = sub.add_parser("report", help="rebuild reports from persisted logs")
    p.add_argument("--in", dest="in_dir", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--spec", default=None)
    p.set_defaults(func=_cmd_report)

    p = sub.add_parser("config", help="print or write the default run-config")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_config)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _CONFIG_ERRORS as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
