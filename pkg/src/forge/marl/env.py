"""The statement-producing environment shared by both agents.

One step: the skeptic's action reshapes the per-patch attention weights,
the conjecturer's action shifts the search priors and the feature count,
the two-stage regression runs on the resulting patches, and the statement
is put through the non-degeneracy checks and the prover.  A statement that
passes the checks with a score at or above the threshold ends the episode:
the conjecturer banks the terminal reward and the skeptic pays it.  The
per-step length reward, like every reward, requires the checks to pass.
Episodes are hard-capped at fifty steps with no terminal bonus.

Model wirings cover the ablations: the full system, the noisy-score
variant, score-free rewards, no skeptic (weights pinned to one), and the
bare conjecturer with randomized control parameters and no early stop.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .. import rng as _rng
from ..regression.config import PRIOR_KEYS, P_MAX, RegressorConfig
from ..regression.gp import EvalCache, run_conjecturer
from ..statements.ast import Node, render, tree_size
from ..statements.canonical import atomic_formulae
from ..prover.premises import PremiseSet
from ..prover.prove import apply_harvest, nondegeneracy, noisy_rho, prove

CLASS_ORDER = ("sphere", "torus", "klein", "union")


class EnvContractError(RuntimeError):
    """A step was requested on a terminated episode."""


@dataclass(frozen=True)
class MarlConfig:
    n_patches: int = 3                 # also the feature-count ceiling
    lambda_init_fraction: float = 0.25
    lambda_step: float = 0.25          # per-step weight shift bound
    prior_step: float = 0.5            # per-step search-prior shift bound
    top_k: int = 8                     # weight slots updated per step
    block_size: int = 5                # datapoints per weight slot
    beta: float = 0.05                 # length reward per tree node
    beta_cap: float = 1.5
    r_term: float = 10.0
    gamma: float = 0.99
    threshold: float = 1.0
    noisy_threshold: float = 0.5
    noise_sigma: float = 0.25
    max_steps: int = 50
    n_features_init: int = 2
    prove_budget: int = 10_000
    # Training.
    total_steps: int = 3000
    buffer_size: int = 50_000
    batch_size: int = 128
    tau: float = 0.01
    lr_critic: float = 1e-3
    lr_actor: float = 1e-4
    explore_sigma_start: float = 0.4
    explore_sigma_end: float = 0.1
    warmup_steps: int = 512
    eval_episodes: int = 15


@dataclass(frozen=True)
class ModelWiring:
    name: str
    rl: bool                     # trains policies at all
    use_sa: bool                 # skeptic exists and acts
    lambda_fixed_one: bool       # weights pinned to 1
    provability_reward: bool     # terminal +-R applies
    noisy: bool                  # Gaussian noise on the score
    terminate_on_proof: bool     # proven statements end episodes
    random_control: bool = False # conjecturer controls drawn fresh each step


_MODELS = {
    "OnlyCA": ModelWiring("OnlyCA", False, False, True, False, False, False, True),
    "M0": ModelWiring("M0", True, True, False, True, False, True),
    "M0Noise": ModelWiring("M0Noise", True, True, False, True, True, True),
    "M1": ModelWiring("M1", True, True, False, False, False, True),
    "M2": ModelWiring("M2", True, False, True, True, False, True),
}


def model_wiring(name: str) -> ModelWiring:
    if name not in _MODELS:
        raise ValueError(f"unknown model {name!r}; options: {sorted(_MODELS)}")
    return _MODELS[name]


@dataclass
class EnvState:
    t: int
    lam: np.ndarray              # (n_patches, n_data) in [0, 1]
    priors: np.ndarray           # (len(PRIOR_KEYS),) in [-P_MAX, P_MAX]
    n_features: int
    last_statement: Node | None
    last_rho: float
    terminated: bool
    episode_index: int


@dataclass(frozen=True)
class AgentAction:
    """Raw continuous actions in [-1, 1]; decoding is deterministic."""

    ca: np.ndarray
    sa: np.ndarray


@dataclass
class StepOutcome:
    statement: Node
    rho: float                   # the prover's score, pre-noise
    rho_score: float             # thresholded quantity (noisy when wired)
    rewards: tuple[float, float]
    terminated: bool
    checks_passed: bool
    proof_termination: bool


@dataclass
class StepRecord:
    t: int
    statement: str
    atoms: list[str]
    rho: float
    rho_score: float
    r_ca: float
    r_sa: float
    checks_passed: bool
    proof_termination: bool
    lambda_means: list[float]


@dataclass
class EpisodeLog:
    episode_index: int
    seed: int
    steps: list[StepRecord] = field(default_factory=list)

    @property
    def n_statements(self) -> int:
        return len(self.steps)

    def discounted_returns(self, gamma: float) -> tuple[float, float]:
        r_ca = r_sa = 0.0
        factor = 1.0
        for step in self.steps:
            r_ca += factor * step.r_ca
            r_sa += factor * step.r_sa
            factor *= gamma
        return r_ca, r_sa


def episode_log_to_dict(log: EpisodeLog) -> dict:
    return {
        "episode": log.episode_index,
        "seed": log.seed,
        "steps": [
            {
                "t": s.t,
                "statement": s.statement,
                "atoms": s.atoms,
                "rho": s.rho,
                "rho_score": s.rho_score,
                "r_ca": s.r_ca,
                "r_sa": s.r_sa,
                "checks_passed": s.checks_passed,
                "proof_termination": s.proof_termination,
                "lambda_means": s.lambda_means,
            }
            for s in log.steps
        ],
    }


def episode_log_from_dict(payload: dict) -> EpisodeLog:
    return EpisodeLog(
        episode_index=payload["episode"],
        seed=payload["seed"],
        steps=[
            StepRecord(
                t=s["t"],
                statement=s["statement"],
                atoms=list(s["atoms"]),
                rho=s["rho"],
                rho_score=s["rho_score"],
                r_ca=s["r_ca"],
                r_sa=s["r_sa"],
                checks_passed=s["checks_passed"],
                proof_termination=s["proof_termination"],
                lambda_means=list(s["lambda_means"]),
            )
            for s in payload["steps"]
        ],
    )


class ConjectureEnv:
    """Deterministic environment over a fixed dataset and premise set."""

    def __init__(
        self,
        data,
        premises: PremiseSet,
        wiring: ModelWiring,
        reg_cfg: RegressorConfig,
        cfg: MarlConfig,
        run_seed: int,
    ) -> None:
        from ..surfaces.datapoints import feature_matrix

        self.data = list(data)
        self.fm = feature_matrix(self.data)
        self.cache = EvalCache(self.fm)
        self.base_premises = premises
        self.premises = premises           # grows by harvesting within a run
        self.wiring = wiring
        self.reg_cfg = reg_cfg
        self.cfg = cfg
        self.run_seed = run_seed
        self.seen_terminal: set[str] = set()
        self.n = len(self.data)
        self.n_blocks = (self.n + cfg.block_size - 1) // cfg.block_size
        self.class_masks = {
            kind: np.array([d.kind == kind for d in self.data]) for kind in CLASS_ORDER
        }
        premises.check_against_data(self.data)

    # -- dimensions ------------------------------------------------------
    @property
    def ca_action_dim(self) -> int:
        return len(PRIOR_KEYS) + 1

    @property
    def sa_action_dim(self) -> int:
        return 2 * self.cfg.n_patches * self.n_blocks

    @property
    def ca_obs_dim(self) -> int:
        return len(PRIOR_KEYS) + 1 + 3 * self.cfg.n_patches + 2

    @property
    def sa_obs_dim(self) -> int:
        return 3 * self.cfg.n_patches + len(CLASS_ORDER) * 2 + 2

    def reset_run(self) -> None:
        """Forget harvested premises and the terminal-statement registry."""
        self.premises = self.base_premises
        self.seen_terminal = set()

    # -- episode lifecycle -------------------------------------------------
    def reset(self, episode_index: int) -> EnvState:
        seed = _rng.derive_seed(self.run_seed, "episode", episode_index)
        gen = _rng.generator(seed, "lambda-init")
        if self.wiring.lambda_fixed_one:
            lam = np.ones((self.cfg.n_patches, self.n))
        else:
            lam = np.zeros((self.cfg.n_patches, self.n))
            mask = gen.random(lam.shape) < self.cfg.lambda_init_fraction
            lam[mask] = gen.random(int(mask.sum()))
        return EnvState(
            t=0,
            lam=lam,
            priors=np.zeros(len(PRIOR_KEYS)),
            n_features=self.cfg.n_features_init,
            last_statement=None,
            last_rho=0.0,
            terminated=False,
            episode_index=episode_index,
        )

    def _decode_n_features(self, control: float) -> int:
        u = (float(np.clip(control, -1.0, 1.0)) + 1.0) / 2.0
        return min(self.cfg.n_patches, 1 + int(u * self.cfg.n_patches))

    def _apply_sa(self, lam: np.ndarray, sa: np.ndarray) -> np.ndarray:
        slots = self.cfg.n_patches * self.n_blocks
        sa = np.clip(np.asarray(sa, dtype=float), -1.0, 1.0)
        if sa.shape != (2 * slots,):
            raise ValueError(f"skeptic action must have shape ({2 * slots},)")
        mask, delta = sa[:slots], sa[slots:]
        k = min(self.cfg.top_k, slots)
        chosen = np.argsort(-mask, kind="stable")[:k]
        out = lam.copy()
        for slot in chosen:
            patch, block = divmod(int(slot), self.n_blocks)
            lo = block * self.cfg.block_size
            hi = min(lo + self.cfg.block_size, self.n)
            out[patch, lo:hi] = np.clip(
                out[patch, lo:hi] + self.cfg.lambda_step * delta[slot], 0.0, 1.0
            )
        return out

    def step(self, state: EnvState, action: AgentAction) -> tuple[EnvState, StepOutcome]:
        if state.terminated or state.t >= self.cfg.max_steps:
            raise EnvContractError("episode already terminated")
        cfg = self.cfg

        # (1) The skeptic reshapes the weights.
        if self.wiring.lambda_fixed_one:
            lam = np.ones_like(state.lam)
        elif self.wiring.use_sa:
            lam = self._apply_sa(state.lam, action.sa)
        else:
            lam = state.lam.copy()

        # (2) The conjecturer moves its control parameters.
        if self.wiring.random_control:
            gen = _rng.generator(
                self.run_seed, "control", state.episode_index, state.t
            )
            priors = gen.uniform(-P_MAX, P_MAX, size=len(PRIOR_KEYS))
            n_features = int(gen.integers(1, cfg.n_patches + 1))
        else:
            ca = np.clip(np.asarray(action.ca, dtype=float), -1.0, 1.0)
            if ca.shape != (self.ca_action_dim,):
                raise ValueError(f"conjecturer action must have shape ({self.ca_action_dim},)")
            priors = np.clip(
                state.priors + cfg.prior_step * ca[: len(PRIOR_KEYS)], -P_MAX, P_MAX
            )
            n_features = self._decode_n_features(ca[len(PRIOR_KEYS)])

        # (3) Regression on the visible patches; the scaffolder sees the
        # pointwise-maximum union.  All-zero patches fall back to uniform
        # attention so the weighted mean stays defined.
        patches = []
        for p in range(n_features):
            row = lam[p]
            patches.append(row if row.sum() > 0 else np.ones(self.n))
        reg_cfg = replace(
            self.reg_cfg,
            priors={key: float(v) for key, v in zip(PRIOR_KEYS, priors)},
            seed=_rng.derive_seed(self.run_seed, "gp", state.episode_index, state.t),
        )
        statement, _result = run_conjecturer(self.data, patches, reg_cfg, self.cache)

        # (4) Checks and the provability score; the score is taken against
        # the premises as they stood when the statement was produced, and
        # only then do failed statements feed the harvest.
        passed, harvest = nondegeneracy(
            statement,
            self.data,
            self.premises,
            seen_terminal=self.seen_terminal,
            feature_matrix=self.fm,
        )
        outcome = prove(statement, self.premises, cfg.prove_budget)
        if not passed:
            self.premises = apply_harvest(
                self.premises, statement, self.data, harvest, feature_matrix=self.fm
            )
        rho = float(outcome.rho)
        if self.wiring.noisy:
            rho_score = noisy_rho(
                outcome,
                cfg.noise_sigma,
                _rng.derive_seed(self.run_seed, "noise", state.episode_index, state.t),
            )
            threshold = cfg.noisy_threshold
        else:
            rho_score = rho
            threshold = cfg.threshold

        # (5) Rewards; nothing is paid unless the checks pass.
        proof_termination = (
            self.wiring.terminate_on_proof and passed and rho_score >= threshold
        )
        r_ca = min(cfg.beta * tree_size(statement), cfg.beta_cap) if passed else 0.0
        r_sa = 0.0
        if proof_termination and self.wiring.provability_reward:
            r_ca += cfg.r_term
            r_sa -= cfg.r_term

        # (6) Advance time.
        t_next = state.t + 1
        terminated = proof_termination or t_next >= cfg.max_steps
        if proof_termination:
            self.seen_terminal.add(render(statement))

        next_state = EnvState(
            t=t_next,
            lam=lam,
            priors=priors,
            n_features=n_features,
            last_statement=statement,
            last_rho=rho_score,
            terminated=terminated,
            episode_index=state.episode_index,
        )
        outcome = StepOutcome(
            statement=statement,
            rho=rho,
            rho_score=rho_score,
            rewards=(r_ca, r_sa),
            terminated=terminated,
            checks_passed=passed,
            proof_termination=proof_termination,
        )
        return next_state, outcome

    # -- observations ------------------------------------------------------
    def _patch_stats(self, lam: np.ndarray) -> list[float]:
        out: list[float] = []
        for p in range(self.cfg.n_patches):
            row = lam[p]
            out.extend((float(row.mean()), float(row.std()), float((row > 0).mean())))
        return out

    def observe_ca(self, state: EnvState) -> np.ndarray:
        return np.array(
            [
                *state.priors / P_MAX,
                state.n_features / self.cfg.n_patches,
                *self._patch_stats(state.lam),
                state.last_rho,
                state.t / self.cfg.max_steps,
            ],
            dtype=float,
        )

    def observe_sa(self, state: EnvState) -> np.ndarray:
        union = state.lam.max(axis=0)
        per_class_lambda = [
            float(union[self.class_masks[kind]].mean()) if self.class_masks[kind].any() else 0.0
            for kind in CLASS_ORDER
        ]
        if state.last_statement is None:
            per_class_acc = [0.0] * len(CLASS_ORDER)
        else:
            truth = self.cache.truth_vector(state.last_statement)
            per_class_acc = [
                float(truth[self.class_masks[kind]].mean()) if self.class_masks[kind].any() else 0.0
                for kind in CLASS_ORDER
            ]
        return np.array(
            [
                *self._patch_stats(state.lam),
                *per_class_lambda,
                *per_class_acc,
                state.last_rho,
                state.t / self.cfg.max_steps,
            ],
            dtype=float,
        )

    def record_step(self, t: int, state_after: EnvState, outcome: StepOutcome) -> StepRecord:
        return StepRecord(
            t=t,
            statement=render(outcome.statement),
            atoms=[str(a.canonical) for a in atomic_formulae(outcome.statement)],
            rho=outcome.rho,
            rho_score=outcome.rho_score,
            r_ca=outcome.rewards[0],
            r_sa=outcome.rewards[1],
            checks_passed=outcome.checks_passed,
            proof_termination=outcome.proof_termination,
            lambda_means=[round(float(m), 6) for m in state_after.lam.mean(axis=1)],
        )
