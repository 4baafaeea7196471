"""Experiment wiring, ablation suite plumbing, report artifacts."""

import json

import pytest

from forge.harness import (
    ExperimentConfigError,
    ExperimentSpec,
    build_experiment,
    compute_metrics,
    concept_premises_for,
    run_ablation_suite,
    write_reports,
)
from forge.harness.ablation import _load_cell
from forge.marl import MarlConfig
from forge.regression import RegressorConfig

_FAST_MARL = MarlConfig(
    total_steps=12, warmup_steps=4, batch_size=4, max_steps=4,
    prove_budget=1500, buffer_size=100, eval_episodes=2,
)
_FAST_REG = RegressorConfig(
    population_size=16, generations=2, scaffold_population=8,
    scaffold_generations=1,
)


def test_spec_validation():
    with pytest.raises(ExperimentConfigError):
        ExperimentSpec("D7", "M0")
    with pytest.raises(ExperimentConfigError):
        ExperimentSpec("D0", "M9")
    with pytest.raises(ExperimentConfigError):
        ExperimentSpec("D0", "M0", per_class=10)
    with pytest.raises(ExperimentConfigError):
        ExperimentSpec("D0", "M0", per_class=500)
    with pytest.raises(ExperimentConfigError):
        ExperimentSpec("D0", "M0", seeds=())


def test_premise_pairing():
    spec = ExperimentSpec("D0", "M2", per_class=50, seeds=(0,))
    _, premises, wiring = build_experiment(spec, data_seed=5)
    assert premises.label == "P0+P1+P2"  # includes b0 = 1 and b2 = 1
    assert wiring.lambda_fixed_one and wiring.provability_reward

    spec = ExperimentSpec("D2", "M0", per_class=50, seeds=(0,))
    _, premises, _ = build_experiment(spec, data_seed=5)
    assert premises.label == "P0"  # rank-nullity only

    spec = ExperimentSpec("D3", "M1", per_class=50, seeds=(0,))
    data, _, _ = build_experiment(spec, data_seed=5)
    kinds = {d.kind for d in data}
    assert kinds == {"sphere", "torus", "klein", "union"}


@pytest.fixture(scope="module")
def suite_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("suite")
    specs = [
        ExperimentSpec("D0", "OnlyCA", per_class=50, seeds=(0,), eval_episodes=2),
        ExperimentSpec("D0", "M2", per_class=50, seeds=(0,), eval_episodes=2),
    ]
    run_ablation_suite(specs, seed=3, out_dir=out, marl_cfg=_FAST_MARL,
                       reg_cfg=_FAST_REG, resamples=200)
    return out


def test_suite_writes_all_artifacts(suite_dir):
    for name in [
        "metrics.csv", "metrics.md", "summary.json", "gallery.md",
        "sigma_chi_pct.csv", "sigma_b1_pct.csv",
        "sigma_proven_with_concept_pct.md",
    ]:
        assert (suite_dir / name).exists(), name
    lines = (suite_dir / "metrics.csv").read_text().strip().splitlines()
    assert len(lines) == 3  # header + two cells
    summary = json.loads((suite_dir / "summary.json").read_text())
    assert len(summary["cells"]) == 2


def test_logs_roundtrip_and_metric_recompute(suite_dir):
    meta, logs = _load_cell(suite_dir / "cells" / "D0_OnlyCA")
    assert meta["model"] == "OnlyCA"
    assert len(logs) == 2  # eval episodes for the single seed
    premises = concept_premises_for("D0")
    live = compute_metrics(logs, premises)
    again = compute_metrics(logs, premises)
    assert live.as_dict() == again.as_dict()


def test_report_rebuild_is_deterministic(suite_dir):
    first = {
        name: (suite_dir / name).read_bytes()
        for name in ["metrics.csv", "metrics.md", "summary.json", "gallery.md"]
    }
    write_reports(suite_dir, resamples=200, seed=3)
    for name, blob in first.items():
        assert (suite_dir / name).read_bytes() == blob, name


def test_cell_error_isolation(tmp_path, monkeypatch):
    # Break one cell's training and confirm the other still reports.
    import forge.harness.ablation as ablation_mod

    original = ablation_mod.train

    def exploding(env, seed):
        if env.wiring.name == "M2":
            raise RuntimeError("synthetic failure")
        return original(env, seed)

    monkeypatch.setattr(ablation_mod, "train", exploding)
    specs = [
        ExperimentSpec("D0", "M2", per_class=50, seeds=(0,), eval_episodes=1),
        ExperimentSpec("D0", "OnlyCA", per_class=50, seeds=(0,), eval_episodes=1),
    ]
    summary = run_ablation_suite(specs, seed=1, out_dir=tmp_path,
                                 marl_cfg=_FAST_MARL, reg_cfg=_FAST_REG,
                                 resamples=50)
    assert (tmp_path / "cells" / "D0_M2" / "error.txt").exists()
    assert len(summary["cells"]) == 1  # the surviving cell
