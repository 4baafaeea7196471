"""Ablation suites: train and evaluate every cell, emit comparison tables.

A cell is one (dataset, model) pair; each is trained and evaluated across
the spec's seeds and its evaluation logs are persisted as line-delimited
JSON, one episode per line.  Reports are always rebuilt from the persisted
logs, so recomputed metrics are the report by construction.  Per-cell
failures leave an error file behind and do not stop the suite.
"""

from __future__ import annotations

import json
from pathlib import Path

from .. import rng as _rng
from ..marl.env import ConjectureEnv, EpisodeLog, MarlConfig, episode_log_from_dict, episode_log_to_dict
from ..marl.maddpg import execute, save_policies, train
from ..prover.lean import export_lean, lean_file_name
from ..regression.config import RegressorConfig
from ..statements.concepts import detect_concepts
from ..statements.parse import parse
from .experiments import ExperimentSpec, build_experiment, concept_premises_for
from .metrics import MetricsRow, compute_metrics, ratio_of_sums
from .stats import cluster_bootstrap, pairwise_sigma

#: (metric label, numerator index into EpisodeCounts, denominator index)
TABLE_METRICS = (
    ("chi_pct", 1, 0),
    ("b1_pct", 3, 0),
    ("proven_with_concept_pct", 6, 5),
)


def run_ablation_suite(
    specs: list[ExperimentSpec],
    seed: int,
    out_dir,
    marl_cfg: MarlConfig | None = None,
    reg_cfg: RegressorConfig | None = None,
    resamples: int = 10_000,
    concept_mode: str = "rank-nullity",
) -> dict:
    """Train/evaluate every cell, persist logs, and write the report files."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    marl_cfg = marl_cfg or MarlConfig()
    reg_cfg = reg_cfg or RegressorConfig()

    for spec in specs:
        cell_dir = out / "cells" / spec.cell_id
        cell_dir.mkdir(parents=True, exist_ok=True)
        steps = spec.training_steps
        cfg = marl_cfg if steps is None else _with_steps(marl_cfg, steps)
        try:
            _run_cell(spec, seed, cell_dir, cfg, reg_cfg)
        except Exception as exc:  # cell isolation: partial results survive
            (cell_dir / "error.txt").write_text(
                f"{type(exc).__name__}: {exc}\n", encoding="utf-8"
            )
    return write_reports(out, resamples=resamples, seed=seed,
                         concept_mode=concept_mode)


def _with_steps(cfg: MarlConfig, steps: int) -> MarlConfig:
    from dataclasses import replace

    return replace(cfg, total_steps=steps)


def _run_cell(spec: ExperimentSpec, seed: int, cell_dir: Path,
              marl_cfg: MarlConfig, reg_cfg: RegressorConfig) -> None:
    data_seed = _rng.derive_seed(seed, "data", spec.dataset_id, spec.per_class)
    data, premises, wiring = build_experiment(spec, data_seed)
    meta = {
        "dataset": spec.dataset_id,
        "model": spec.model,
        "per_class": spec.per_class,
        "seeds": list(spec.seeds),
        "eval_episodes": spec.eval_episodes,
        "data_seed": data_seed,
        "training_steps": marl_cfg.total_steps,
    }
    (cell_dir / "meta.json").write_text(
        json.dumps(meta, sort_keys=True, indent=1) + "\n", encoding="utf-8"
    )
    for train_seed in spec.seeds:
        cell_seed = _rng.derive_seed(seed, spec.cell_id, train_seed)
        policies = None
        if wiring.rl:
            train_env = ConjectureEnv(
                data, premises, wiring, reg_cfg, marl_cfg,
                run_seed=_rng.derive_seed(cell_seed, "train"),
            )
            policies = train(train_env, seed=_rng.derive_seed(cell_seed, "learner"))
            save_policies(cell_dir / f"seed{train_seed}.policy", policies)
        eval_env = ConjectureEnv(
            data, premises, wiring, reg_cfg, marl_cfg,
            run_seed=_rng.derive_seed(cell_seed, "eval"),
        )
        logs = execute(eval_env, policies, spec.eval_episodes)
        with open(cell_dir / f"seed{train_seed}.jsonl", "w", encoding="utf-8") as fh:
            for log in logs:
                fh.write(json.dumps(episode_log_to_dict(log),
                                    sort_keys=True, separators=(",", ":")) + "\n")


# --------------------------------------------------------------------------
# Reports from persisted logs.

def _load_cell(cell_dir: Path) -> tuple[dict, list[EpisodeLog]]:
    meta = json.loads((cell_dir / "meta.json").read_text(encoding="utf-8"))
    logs: list[EpisodeLog] = []
    for path in sorted(cell_dir.glob("seed*.jsonl")):
        with open(path, "r", encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    logs.append(episode_log_from_dict(json.loads(line)))
    return meta, logs


def write_reports(out_dir, resamples: int = 10_000, seed: int = 0,
                  concept_mode: str = "rank-nullity") -> dict:
    """Rebuild every report artifact from the persisted episode logs."""
    out = Path(out_dir)
    cells_dir = out / "cells"
    cells: list[tuple[dict, MetricsRow, list[EpisodeLog]]] = []
    if cells_dir.is_dir():
        for cell_dir in sorted(cells_dir.iterdir()):
            if not (cell_dir / "meta.json").exists():
                continue
            meta, logs = _load_cell(cell_dir)
            if not logs:
                continue
            premises = concept_premises_for(meta["dataset"], concept_mode)
            cells.append((meta, compute_metrics(logs, premises), logs))

    summary: dict = {"cells": [], "resamples": resamples}
    table_lines = [
        "dataset,model,unique_atomics,total_statements,"
        "chi_pct,chi_lo,chi_hi,b1_pct,b1_lo,b1_hi,"
        "proven_with_concept_pct,pwc_lo,pwc_hi"
    ]
    md = [
        "| Model | Unique atomic formulae (Total statements) | chi % | b1 % | % proven w/ chi or b1 |",
        "| --- | --- | --- | --- | --- |",
    ]
    for meta, metrics, _logs in cells:
        cis = {}
        for label, num, den in TABLE_METRICS:
            cis[label] = cluster_bootstrap(
                metrics.per_episode, ratio_of_sums(num, den),
                resamples=resamples,
                seed=_rng.derive_seed(seed, "ci", meta["dataset"], meta["model"], label),
            )
        table_lines.append(
            ",".join(
                [
                    meta["dataset"],
                    meta["model"],
                    str(metrics.unique_atomics),
                    str(metrics.total_statements),
                    *(
                        f"{value:.4f}"
                        for label, _, _ in TABLE_METRICS
                        for value in (
                            cis[label].point, cis[label].ci_low, cis[label].ci_high
                        )
                    ),
                ]
            )
        )
        md.append(
            "| {d} {m} | {u} ({t}) | {chi} | {b1} | {pwc} |".format(
                d=meta["dataset"],
                m=meta["model"],
                u=metrics.unique_atomics,
                t=metrics.total_statements,
                chi=_fmt_ci(cis["chi_pct"]),
                b1=_fmt_ci(cis["b1_pct"]),
                pwc=_fmt_ci(cis["proven_with_concept_pct"]),
            )
        )
        summary["cells"].append(
            {
                "dataset": meta["dataset"],
                "model": meta["model"],
                "metrics": metrics.as_dict(),
                "ci": {
                    label: [cis[label].point, cis[label].ci_low, cis[label].ci_high]
                    for label, _, _ in TABLE_METRICS
                },
            }
        )
    (out / "metrics.csv").write_text("\n".join(table_lines) + "\n", encoding="utf-8")
    (out / "metrics.md").write_text("\n".join(md) + "\n", encoding="utf-8")

    # Pairwise effective-sigma matrices, one file per metric.
    labels = [f'{meta["dataset"]} {meta["model"]}' for meta, _, _ in cells]
    summary["pairwise"] = {}
    for label, num, den in TABLE_METRICS:
        stat = ratio_of_sums(num, den)
        matrix_csv = ["," + ",".join(labels)]
        matrix_md = ["| i \\ j | " + " | ".join(labels) + " |",
                     "| --- |" + " --- |" * len(labels)]
        entries = {}
        for i, (_, metrics_i, _) in enumerate(cells):
            row_csv = [labels[i]]
            row_md = [labels[i]]
            for j, (_, metrics_j, _) in enumerate(cells):
                if i == j:
                    row_csv.append("")
                    row_md.append("-")
                    continue
                result = pairwise_sigma(
                    metrics_i.per_episode, metrics_j.per_episode, stat,
                    resamples=resamples,
                    seed=_rng.derive_seed(seed, "sigma", label, labels[i], labels[j]),
                )
                ratio = "inf" if result.ratio == float("inf") else f"{result.ratio:.3f}"
                row_csv.append(f"{ratio}|{result.sigma:.3f}|{int(result.clipped)}")
                row_md.append(f"{ratio} ({result.label()})")
                entries[f"{labels[i]} vs {labels[j]}"] = {
                    "ratio": result.ratio,
                    "sigma": result.sigma,
                    "clipped": result.clipped,
                    "p_hat": result.p_hat,
                }
            matrix_csv.append(",".join(row_csv))
            matrix_md.append("| " + " | ".join(row_md) + " |")
        (out / f"sigma_{label}.csv").write_text("\n".join(matrix_csv) + "\n",
                                                encoding="utf-8")
        (out / f"sigma_{label}.md").write_text("\n".join(matrix_md) + "\n",
                                               encoding="utf-8")
        summary["pairwise"][label] = entries

    _write_gallery(out, cells, concept_mode)
    summary_text = json.dumps(summary, sort_keys=True, indent=1)
    (out / "summary.json").write_text(summary_text + "\n", encoding="utf-8")
    return summary


def _fmt_ci(ci) -> str:
    return f"{ci.point:.2f} [{ci.ci_low:.2f}, {ci.ci_high:.2f}]"


def _write_gallery(out: Path, cells, concept_mode: str) -> None:
    """Notable statements: proven or concept-bearing, with interpretations."""
    lines = ["# Statement gallery", ""]
    lean_dir = out / "lean"
    seen: set[str] = set()
    for meta, _metrics, logs in cells:
        concept_premises = concept_premises_for(meta["dataset"], concept_mode)
        run_premises = concept_premises_for(meta["dataset"], "experiment")
        for log in logs:
            for step in log.steps:
                if step.statement in seen:
                    continue
                statement = parse(step.statement)
                flags = detect_concepts(statement, concept_premises)
                if step.rho < 1.0 and not flags.any():
                    continue
                seen.add(step.statement)
                tags = [
                    name
                    for name, hit in (
                        ("chi", flags.has_chi), ("b0", flags.has_b0),
                        ("b1", flags.has_b1), ("b2", flags.has_b2),
                    )
                    if hit
                ]
                lines.append(
                    f"- `{step.statement}`  \n"
                    f"  atoms: {'; '.join(step.atoms)}  \n"
                    f"  concepts: {', '.join(tags) if tags else 'none'}; "
                    f"score {step.rho:g}; {meta['dataset']}/{meta['model']}"
                )
                if step.rho >= 1.0:
                    lean_dir.mkdir(parents=True, exist_ok=True)
                    name = lean_file_name(statement, run_premises)
                    (lean_dir / name).write_text(
                        export_lean(statement, run_premises), encoding="utf-8"
                    )
    (out / "gallery.md").write_text("\n".join(lines) + "\n", encoding="utf-8")
