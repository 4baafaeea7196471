"""Acceptance suite: one test per criterion, one PASS/FAIL line each.

The learning criteria share a cached campaign (five full-system training
runs and five bare-conjecturer evaluations on D0 at desk scale), built once
per interpreter session and memoized on disk keyed by the configuration
fingerprint; every artifact is deterministic, so the cache is sound.
"""

import hashlib
import json
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np
import pytest

from forge import rng as _rng
from forge.harness import (
    compute_metrics,
    concept_premises_for,
    cluster_bootstrap,
    pairwise_sigma,
)
from forge.harness.metrics import ratio_of_sums
from forge.marl import (
    ConjectureEnv,
    MarlConfig,
    episode_log_from_dict,
    episode_log_to_dict,
    execute,
    model_wiring,
    train,
)
from forge.prover import PremiseSet, premises_for_dataset, prove
from forge.regression import RegressorConfig
from forge.statements import detect_concepts, evaluate, parse
from forge.surfaces import (
    boundary_matrices,
    build_dataset,
    count_components,
    exact_rank,
)

SEEDS = (0, 1, 2, 3, 4)
TRAINING_STEPS = 3000
EVAL_EPISODES = 15
PER_CLASS = 100
CAMPAIGN_DATASET = "D0"
_CACHE_ROOT = Path("/tmp/forge-acceptance-cache")


def _report(criterion: int, name: str, passed: bool, detail: str = "") -> None:
    status = "PASS" if passed else "FAIL"
    print(f"\nACCEPTANCE {criterion} ({name}): {status}"
          + (f" -- {detail}" if detail else ""))


# ---------------------------------------------------------------------------
# Criterion 1: homology ground truth on a D3-composition dataset.

def test_criterion_1_homology_ground_truth():
    started = time.time()
    data, surfaces = build_dataset("D3", PER_CLASS, seed=31, with_surfaces=True)
    by_kind = {"sphere": (1, 0, 1, 2), "torus": (1, 2, 1, 0), "klein": (1, 1, 0, 0)}
    for dp, surface in zip(data, surfaces):
        mats = boundary_matrices(surface)
        assert not (mats.d1 @ mats.d2).any()
        r1, r2, n1, n2, h1, w1, h2, w2 = dp.features
        assert r1 + n1 == w1 and r2 + n2 == w2 and w1 == h2
        assert 3 * w2 == 2 * w1  # 3F = 2E holds per component, hence in sum
        assert h1 - w1 + w2 == dp.b0 - dp.b1 + dp.b2
        assert dp.b0 == count_components(surface)
        if dp.kind in by_kind:
            assert (dp.b0, dp.b1, dp.b2, dp.chi) == by_kind[dp.kind]
        else:  # unions: additivity over the declared components
            expected = [by_kind[c.kind] for c in surface.components]
            assert dp.b0 == sum(e[0] for e in expected)
            assert dp.b1 == sum(e[1] for e in expected)
            assert dp.b2 == sum(e[2] for e in expected)
            assert dp.chi == sum(e[3] for e in expected)
        assert r1 == exact_rank(mats.d1) and r2 == exact_rank(mats.d2)
    elapsed = time.time() - started
    _report(1, "homology ground truth",
            True, f"{len(data)} datapoints verified in {elapsed:.1f}s")
    assert elapsed < 120.0


# ---------------------------------------------------------------------------
# Criterion 2: prover golden set.

P0 = PremiseSet.from_groups("P0")
P01 = PremiseSet.from_groups("P0", "P1")
P012 = PremiseSet.from_groups("P0", "P1", "P2")

GOLDEN_PROVER = [
    ("(⟹ (¬ (= r2 (+ (- n1 h1) r1))) (¬ (= (+ n2 h2) (+ h1 w2))))", P0, 1.0),
    ("(⟹ (= (+ n1 1) w2) (¬ (= (+ (- h1 w1) w2) 0)))", P012, 1.0),
    ("(⟹ (= r1 (- w1 r2)) (¬ (= (- w1 n2) (+ r2 h1))))", P012, 1.0),
    ("(⟹ (∧ (= n1 r2) (= (* n2 w2) n2)) (¬ (= w1 (+ (+ h1 n2) r2))))", P01, 1.0),
    ("(⟹ (∧ (= n1 r2) (= n2 1)) (= n2 (- h1 r1)))", P012, 1.0),
    ("(⟹ (∧ (= n1 r2) (= n2 1)) (= (- h1 r1) 1))", P012, 1.0),
    ("(⟹ (∧ (= w2 (- n1 n2)) (= r2 n1)) (∧ (= (- (+ w1 1) h1) r2) (= n1 (+ w2 1))))", P012, 1.0),
    ("(= n1 (+ (- r1 h1) w2))", P012, 0.0),
    ("(= (- h1 r1) n2)", P0, 0.0),
]


def test_criterion_2_prover_golden_set():
    started = time.time()
    for text, premises, expected in GOLDEN_PROVER:
        statement = parse(text)
        outcome = prove(statement, premises)
        assert outcome.rho == expected, text
        if expected == 0.0:
            cex = outcome.counterexample
            assert cex is not None, text
            features = (cex["r1"], cex["r2"], cex["n1"], cex["n2"],
                        cex["h1"], cex["w1"], cex["h2"], cex["w2"])
            assert all(eq.holds(features) for eq in premises.equalities)
            assert evaluate(statement, features) is False
    elapsed = time.time() - started
    _report(2, "prover golden set", True,
            f"7 certified + 2 refuted with witnesses in {elapsed:.2f}s")
    assert elapsed < 5.0


# ---------------------------------------------------------------------------
# Criterion 3: concept-detector golden set plus the brute-force oracle.

def test_criterion_3_concept_detector():
    from test_concepts import GOLDEN_STATEMENTS, _random_small_statement, oracle_flags

    for idx, text in GOLDEN_STATEMENTS.items():
        flags = detect_concepts(parse(text), P0)
        assert flags.has_chi and flags.any_b(), idx
    eq3 = detect_concepts(parse("(= (+ (- h1 w1) w2) 2)"), P0)
    assert eq3.has_chi and not eq3.any_b()

    gen = np.random.default_rng(777)
    mismatches = 0
    for _ in range(200):
        s = _random_small_statement(gen)
        if detect_concepts(s, P0) != oracle_flags(s, P0):
            mismatches += 1
    _report(3, "concept detector", mismatches == 0,
            f"golden set exact; {200 - mismatches}/200 oracle matches")
    assert mismatches == 0


# ---------------------------------------------------------------------------
# Shared desk-scale campaign for criteria 4-6.

def _campaign_key() -> str:
    blob = json.dumps({
        "dataset": CAMPAIGN_DATASET,
        "per_class": PER_CLASS,
        "training_steps": TRAINING_STEPS,
        "eval_episodes": EVAL_EPISODES,
        "seeds": SEEDS,
        "marl": str(MarlConfig()),
        "reg": str(RegressorConfig()),
        "rev": 1,
    }, sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _run_one(job) -> tuple[str, int, list[dict], dict]:
    model, seed = job
    data = build_dataset(CAMPAIGN_DATASET, PER_CLASS,
                         seed=_rng.derive_seed(42, "data", CAMPAIGN_DATASET))
    premises = premises_for_dataset(CAMPAIGN_DATASET)
    marl_cfg = MarlConfig(total_steps=TRAINING_STEPS)
    reg_cfg = RegressorConfig()
    wiring = model_wiring(model)
    stats: dict = {}
    policies = None
    started = time.time()
    if wiring.rl:
        env = ConjectureEnv(data, premises, wiring, reg_cfg, marl_cfg,
                            run_seed=_rng.derive_seed(42, model, seed, "train"))
        policies = train(env, seed=_rng.derive_seed(42, model, seed, "learn"))
        stats["proof_terminations"] = policies.stats["proof_terminations"]
        stats["episodes"] = policies.stats["episodes"]
    stats["train_seconds"] = time.time() - started
    started = time.time()
    eval_env = ConjectureEnv(data, premises, wiring, reg_cfg, marl_cfg,
                             run_seed=_rng.derive_seed(42, model, seed, "eval"))
    logs = execute(eval_env, policies, EVAL_EPISODES)
    stats["eval_seconds"] = time.time() - started
    return model, seed, [episode_log_to_dict(l) for l in logs], stats


@pytest.fixture(scope="session")
def campaign():
    cache = _CACHE_ROOT / _campaign_key()
    cache.mkdir(parents=True, exist_ok=True)
    jobs = [("OnlyCA", s) for s in SEEDS] + [("M0", s) for s in SEEDS]
    missing = [
        job for job in jobs
        if not (cache / f"{job[0]}_seed{job[1]}.json").exists()
    ]
    if missing:
        with ProcessPoolExecutor(max_workers=2) as pool:
            for model, seed, logs, stats in pool.map(_run_one, missing):
                payload = {"logs": logs, "stats": stats}
                (cache / f"{model}_seed{seed}.json").write_text(
                    json.dumps(payload, sort_keys=True), encoding="utf-8"
                )
    out = {}
    for model, seed in jobs:
        payload = json.loads(
            (cache / f"{model}_seed{seed}.json").read_text(encoding="utf-8")
        )
        out[(model, seed)] = (
            [episode_log_from_dict(d) for d in payload["logs"]],
            payload["stats"],
        )
    return out


def _pooled_metrics(campaign, model):
    logs = []
    for seed in SEEDS:
        logs.extend(campaign[(model, seed)][0])
    return compute_metrics(logs, concept_premises_for(CAMPAIGN_DATASET)), logs


# ---------------------------------------------------------------------------
# Criterion 4: the bare conjecturer never spots the tracked concepts.

def test_criterion_4_only_ca_zero_rates(campaign):
    row, logs = _pooled_metrics(campaign, "OnlyCA")
    per_seed_seconds = [campaign[("OnlyCA", s)][1]["eval_seconds"] for s in SEEDS]
    statements_per_seed = EVAL_EPISODES * MarlConfig().max_steps
    assert row.total_statements == statements_per_seed * len(SEEDS)
    ok = row.chi_pct <= 0.5 and row.b1_pct <= 0.5
    _report(4, "bare-conjecturer zero rates", ok,
            f"chi={row.chi_pct:.3f}% b1={row.b1_pct:.3f}% over "
            f"{row.total_statements} statements; "
            f"max eval time {max(per_seed_seconds):.0f}s/seed")
    assert ok
    assert max(per_seed_seconds) < 600.0


# ---------------------------------------------------------------------------
# Criterion 5: the full system beats the bare conjecturer on b1 rate.

def test_criterion_5_directional_ablation(campaign):
    m0_row, _ = _pooled_metrics(campaign, "M0")
    ca_row, _ = _pooled_metrics(campaign, "OnlyCA")
    stat = ratio_of_sums(3, 0)  # b1 percentage
    result = pairwise_sigma(
        m0_row.per_episode, ca_row.per_episode, stat,
        resamples=10_000, seed=5,
    )
    table = (
        f"pooled M0 b1={m0_row.b1_pct:.3f}% chi={m0_row.chi_pct:.3f}% "
        f"({m0_row.total_statements} stmts) | pooled OnlyCA "
        f"b1={ca_row.b1_pct:.3f}% ({ca_row.total_statements} stmts) | "
        f"sigma={result.sigma:.2f}{'(clipped)' if result.clipped else ''} "
        f"p_hat={result.p_hat:.4f}"
    )
    ok = m0_row.b1_pct > ca_row.b1_pct and result.sigma >= 2.0
    _report(5, "directional ablation", ok, table)
    if not ok:
        # Calibration finding: emit the full comparison for inspection.
        ci = cluster_bootstrap(m0_row.per_episode, stat, 10_000, seed=6)
        print(f"calibration table: M0 b1 CI [{ci.ci_low:.3f}, {ci.ci_high:.3f}]"
              f" point {ci.point:.3f}")
    assert ok, table


# ---------------------------------------------------------------------------
# Criterion 6: learning-problem witness among the full-system runs.

def test_criterion_6_learning_problem_witness(campaign):
    premises = concept_premises_for(CAMPAIGN_DATASET)
    witnesses = []
    near_misses = []
    for seed in SEEDS:
        logs, _ = campaign[("M0", seed)]
        for log in logs:
            for step in log.steps:
                if step.rho < 1.0:
                    continue
                flags = detect_concepts(parse(step.statement), premises)
                if step.checks_passed and flags.has_chi and flags.any_b():
                    witnesses.append((seed, step.statement))
                elif flags.any():
                    near_misses.append((seed, step.statement))
    ok = bool(witnesses)
    detail = (f"{len(witnesses)} witness statement(s)" if ok
              else f"none; {len(near_misses)} proven near-misses")
    _report(6, "learning-problem witness", ok, detail)
    if ok:
        seed, text = witnesses[0]
        print(f"witness (seed {seed}): {text}")
    else:
        print("nearest-miss gallery (proven statements with any concept flag):")
        for seed, text in near_misses[:10]:
            print(f"  seed {seed}: {text}")
    assert ok


# ---------------------------------------------------------------------------
# Criterion 7: optimization correctness.

def test_criterion_7_optimization_correctness():
    from test_marl_nets import (
        test_actor_through_critic_gradient_matches_finite_differences as actor_fd,
        test_critic_gradient_matches_finite_differences as critic_fd,
        test_critic_regression_on_frozen_buffer_decreases_monotonically as frozen,
        test_soft_update_identity as soft,
    )

    critic_fd()
    actor_fd()
    frozen()
    soft()
    _report(7, "optimization correctness", True,
            "gradient checks < 1e-4, frozen-buffer loss decreasing, "
            "soft update exact")


# ---------------------------------------------------------------------------
# Criterion 8: statistics correctness.

def test_criterion_8_statistics_correctness():
    from test_stats import (
        test_bernoulli_cluster_coverage as coverage,
        test_pairwise_sigma_clips_exactly_when_one_sided as clipping,
        test_pairwise_sigma_identical_inputs_is_zero as identical,
    )

    coverage()
    identical()
    clipping()
    _report(8, "statistics correctness", True,
            "coverage within [90%, 99%], identical-input sigma 0, "
            "one-sided resamples clip at 5 sigma")


# ---------------------------------------------------------------------------
# Criterion 9: CLI determinism.

def test_criterion_9_cli_determinism(tmp_path):
    from test_cli import FAST_SPEC
    from forge.cli import main

    spec = tmp_path / "run.toml"
    spec.write_text(FAST_SPEC, encoding="utf-8")
    artifacts = {}
    for tag in ("x", "y"):
        data = tmp_path / f"data_{tag}.jsonl"
        ckpt = tmp_path / f"model_{tag}.policy"
        logs = tmp_path / f"logs_{tag}.jsonl"
        report = tmp_path / f"report_{tag}"
        suite = tmp_path / f"suite_{tag}.toml"
        suite.write_text(FAST_SPEC + '\n[suite]\ncells = [["D0", "M2"]]\n',
                         encoding="utf-8")
        assert main(["gen-data", "--dataset", "D2", "--per-class", "5",
                     "--seed", "4", "--out", str(data)]) == 0
        assert main(["train", "--spec", str(spec), "--out", str(ckpt)]) == 0
        assert main(["eval", "--ckpt", str(ckpt), "--episodes", "2",
                     "--spec", str(spec), "--out", str(logs)]) == 0
        assert main(["ablate", "--suite", str(suite), "--out", str(report)]) == 0
        artifacts[tag] = {
            "data": data.read_bytes(),
            "ckpt": ckpt.read_bytes(),
            "logs": logs.read_bytes(),
            "metrics": (report / "metrics.csv").read_bytes(),
            "summary": (report / "summary.json").read_bytes(),
        }
    same = all(artifacts["x"][k] == artifacts["y"][k] for k in artifacts["x"])
    _report(9, "CLI determinism", same,
            "gen-data, train, eval, ablate all byte-identical across reruns")
    assert same
