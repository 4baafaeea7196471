"""MADDPG: centralized critics, decentralized actors, shared replay.

Each present agent owns an actor over its own observation and a critic over
the joint observations and actions of all present agents.  Training adds
Gaussian exploration noise with a linearly decaying scale, stores every
transition, and after warmup performs one critic and one actor update per
agent per environment step, followed by soft target updates.  Execution
runs the deterministic actors with no noise and no learning and logs every
step.  Everything is seeded and single-threaded, so identical inputs give
identical policies, logs, and checkpoint bytes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .. import rng as _rng
from .env import AgentAction, ConjectureEnv, EnvState, EpisodeLog, MarlConfig
from .nets import MLP, AdaptiveStep, init_params, soft_update

_MAGIC = b"FORGE-POLICY"
_VERSION = 1


class _OUNoise:
    """Ornstein-Uhlenbeck exploration: temporally correlated action noise.

    Correlated noise is what lets undirected exploration commit to a
    direction long enough to tilt attention weights and walk the priors
    into a corner; independent per-step noise cancels itself.
    """

    def __init__(self, dim: int, gen: np.random.Generator,
                 theta: float = 0.15, start_scale: float = 1.0) -> None:
        self.dim = dim
        self.gen = gen
        self.theta = theta
        self.state = start_scale * gen.standard_normal(dim)

    def sample(self, sigma: float) -> np.ndarray:
        self.state = (
            (1.0 - self.theta) * self.state
            + self.theta * self.gen.standard_normal(self.dim)
        )
        # Stationary std of the recursion is theta/sqrt(2*theta - theta^2);
        # rescale so `sigma` is the delivered noise scale.
        norm = np.sqrt(self.theta / (2.0 - self.theta))
        return sigma * self.state / norm

    def reset(self) -> None:
        self.state = self.gen.standard_normal(self.dim)


class _Agent:
    def __init__(self, name: str, obs_dim: int, act_dim: int, critic_in: int,
                 cfg: MarlConfig, seed: int) -> None:
        self.name = name
        self.obs_dim = obs_dim
        self.act_dim = act_dim
        self.actor_net = MLP(obs_dim, act_dim, out_tanh=True)
        self.critic_net = MLP(critic_in, 1, out_tanh=False)
        self.actor = init_params(obs_dim, act_dim, _rng.derive_seed(seed, name, "actor"))
        self.critic = init_params(critic_in, 1, _rng.derive_seed(seed, name, "critic"))
        self.actor_target = {k: v.copy() for k, v in self.actor.items()}
        self.critic_target = {k: v.copy() for k, v in self.critic.items()}
        self.opt_actor = AdaptiveStep(cfg.lr_actor)
        self.opt_critic = AdaptiveStep(cfg.lr_critic)

    def act(self, obs: np.ndarray) -> np.ndarray:
        """Deterministic action for a single observation vector."""
        return self.actor_net(self.actor, obs)[0]



@dataclass
class TrainedPolicies:
    wiring_name: str
    agent_order: tuple[str, ...]
    dims: dict
    params: dict            # name -> {actor, critic, actor_target, critic_target}
    optimizer_state: dict   # name -> {actor: ..., critic: ...}
    stats: dict = field(default_factory=dict)

    def agent(self, name: str, cfg: MarlConfig) -> _Agent:
        dims = self.dims[name]
        agent = _Agent(name, dims["obs"], dims["act"], dims["critic_in"], cfg, 0)
        for key in ("actor", "critic", "actor_target", "critic_target"):
            getattr(agent, key).update(
                {k: np.array(v, dtype=float) for k, v in self.params[name][key].items()}
            )
        agent.opt_actor.load_state(self.optimizer_state[name]["actor"])
        agent.opt_critic.load_state(self.optimizer_state[name]["critic"])
        return agent


def _agent_names(env: ConjectureEnv) -> tuple[str, ...]:
    if not env.wiring.rl:
        return ()
    return ("ca", "sa") if env.wiring.use_sa else ("ca",)


def _dims(env: ConjectureEnv) -> dict:
    obs = {"ca": env.ca_obs_dim, "sa": env.sa_obs_dim}
    act = {"ca": env.ca_action_dim, "sa": env.sa_action_dim}
    names = _agent_names(env)
    critic_in = sum(obs[n] for n in names) + sum(act[n] for n in names)
    return {
        name: {"obs": obs[name], "act": act[name], "critic_in": critic_in}
        for name in names
    }


def _observe(env: ConjectureEnv, name: str, state: EnvState) -> np.ndarray:
    return env.observe_ca(state) if name == "ca" else env.observe_sa(state)


def _env_action(env: ConjectureEnv, actions: dict[str, np.ndarray]) -> AgentAction:
    ca = actions.get("ca", np.zeros(env.ca_action_dim))
    sa = actions.get("sa", np.zeros(env.sa_action_dim))
    return AgentAction(ca=ca, sa=sa)


class _Buffer:
    def __init__(self, capacity: int, names, dims) -> None:
        self.capacity = capacity
        self.names = tuple(names)
        self.size = 0
        self.pos = 0
        self.obs = {n: np.zeros((capacity, dims[n]["obs"])) for n in self.names}
        self.act = {n: np.zeros((capacity, dims[n]["act"])) for n in self.names}
        self.rew = {n: np.zeros(capacity) for n in self.names}
        self.nxt = {n: np.zeros((capacity, dims[n]["obs"])) for n in self.names}
        self.done = np.zeros(capacity)

    def add(self, obs, act, rew, nxt, done: bool) -> None:
        i = self.pos
        for n in self.names:
            self.obs[n][i] = obs[n]
            self.act[n][i] = act[n]
            self.rew[n][i] = rew[n]
            self.nxt[n][i] = nxt[n]
        self.done[i] = float(done)
        self.pos = (self.pos + 1) % self.capacity
        self.size = min(self.size + 1, self.capacity)

    def sample(self, gen: np.random.Generator, batch: int) -> dict:
        idx = gen.integers(self.size, size=batch)
        return {
            "obs": {n: self.obs[n][idx] for n in self.names},
            "act": {n: self.act[n][idx] for n in self.names},
            "rew": {n: self.rew[n][idx] for n in self.names},
            "nxt": {n: self.nxt[n][idx] for n in self.names},
            "done": self.done[idx],
        }


def critic_update(agent: _Agent, names, batch, gamma: float,
                  target_actors: dict) -> float:
    """One ADAM-free regression step of the centralized critic; returns loss."""
    next_actions = {}
    for n in names:
        net, params = target_actors[n]
        next_actions[n] = net(params, batch["nxt"][n])
    target_in = np.concatenate(
        [batch["nxt"][n] for n in names] + [next_actions[n] for n in names], axis=1
    )
    q_next = agent.critic_net(agent.critic_target, target_in)[:, 0]
    y = batch["rew"][agent.name] + gamma * (1.0 - batch["done"]) * q_next
    critic_in = np.concatenate(
        [batch["obs"][n] for n in names] + [batch["act"][n] for n in names], axis=1
    )
    q, cache = agent.critic_net.forward(agent.critic, critic_in)
    err = q[:, 0] - y
    loss = float(np.mean(err**2))
    dout = (2.0 * err / err.size)[:, None]
    grads, _ = agent.critic_net.backward(agent.critic, cache, dout)
    agent.opt_critic.step(agent.critic, grads)
    return loss


def actor_update(agent: _Agent, names, batch, agents: dict) -> None:
    """Deterministic policy gradient step through the agent's own critic."""
    obs = batch["obs"]
    my_action, actor_cache = agent.actor_net.forward(agent.actor, obs[agent.name])
    actions = []
    spans = {}
    cursor = 0
    for n in names:
        block = my_action if n == agent.name else batch["act"][n]
        actions.append(block)
        spans[n] = (cursor, cursor + block.shape[1])
        cursor += block.shape[1]
    obs_width = sum(obs[n].shape[1] for n in names)
    critic_in = np.concatenate([obs[n] for n in names] + actions, axis=1)
    q, cache = agent.critic_net.forward(agent.critic, critic_in)
    dout = np.full((q.shape[0], 1), -1.0 / q.shape[0])
    _, dinput = agent.critic_net.backward(agent.critic, cache, dout)
    lo, hi = spans[agent.name]
    d_action = dinput[:, obs_width + lo : obs_width + hi]
    grads, _ = agent.actor_net.backward(agent.actor, actor_cache, d_action)
    agent.opt_actor.step(agent.actor, grads)


def train(env: ConjectureEnv, seed: int) -> TrainedPolicies:
    """Run the configured number of environment steps with MADDPG updates."""
    cfg = env.cfg
    names = _agent_names(env)
    if not names:
        raise ValueError("this wiring has no trainable agents")
    dims = _dims(env)
    agents = {
        n: _Agent(n, dims[n]["obs"], dims[n]["act"], dims[n]["critic_in"], cfg, seed)
        for n in names
    }
    buffer = _Buffer(cfg.buffer_size, names, dims)
    explore_gen = _rng.generator(seed, "explore")
    sample_gen = _rng.generator(seed, "sample")
    noise = {n: _OUNoise(dims[n]["act"], explore_gen) for n in names}

    env.reset_run()
    episode = 0
    state = env.reset(episode)
    obs = {n: _observe(env, n, state) for n in names}
    episode_rewards = {n: [] for n in names}
    stats: dict = {"episode_returns": [], "episode_lengths": [],
                   "critic_loss": [], "proof_terminations": 0}

    for step in range(cfg.total_steps):
        frac = step / max(cfg.total_steps - 1, 1)
        sigma = cfg.explore_sigma_start + frac * (
            cfg.explore_sigma_end - cfg.explore_sigma_start
        )
        actions = {}
        for n in names:
            if step < cfg.warmup_steps:
                # Pure correlated exploration at full scale: the random
                # walk holds a direction long enough to produce the rare
                # transitions worth replaying.
                actions[n] = np.clip(noise[n].sample(1.0), -1.0, 1.0)
            else:
                mean = agents[n].act(obs[n])
                actions[n] = np.clip(mean + noise[n].sample(sigma), -1.0, 1.0)
        next_state, outcome = env.step(state, _env_action(env, actions))
        rewards = {"ca": outcome.rewards[0], "sa": outcome.rewards[1]}
        next_obs = {n: _observe(env, n, next_state) for n in names}
        buffer.add(obs, actions, {n: rewards[n] for n in names}, next_obs,
                   outcome.terminated)
        for n in names:
            episode_rewards[n].append(rewards[n])
        if outcome.proof_termination:
            stats["proof_terminations"] += 1

        if buffer.size >= max(cfg.batch_size, cfg.warmup_steps):
            batch = buffer.sample(sample_gen, cfg.batch_size)
            target_actors = {
                n: (agents[n].actor_net, agents[n].actor_target) for n in names
            }
            losses = [
                critic_update(agents[n], names, batch, cfg.gamma, target_actors)
                for n in names
            ]
            for n in names:
                actor_update(agents[n], names, batch, agents)
            for n in names:
                soft_update(agents[n].actor_target, agents[n].actor, cfg.tau)
                soft_update(agents[n].critic_target, agents[n].critic, cfg.tau)
            if step % 50 == 0:
                stats["critic_loss"].append(float(np.mean(losses)))

        if outcome.terminated:
            returns = {
                n: _discounted(episode_rewards[n], cfg.gamma) for n in names
            }
            stats["episode_returns"].append(returns)
            stats["episode_lengths"].append(next_state.t)
            episode_rewards = {n: [] for n in names}
            episode += 1
            state = env.reset(episode)
            obs = {n: _observe(env, n, state) for n in names}
            for n in names:
                noise[n].reset()
        else:
            state = next_state
            obs = next_obs

    stats["buffer_size"] = buffer.size
    stats["episodes"] = episode
    return TrainedPolicies(
        wiring_name=env.wiring.name,
        agent_order=names,
        dims=dims,
        params={
            n: {
                "actor": agents[n].actor,
                "critic": agents[n].critic,
                "actor_target": agents[n].actor_target,
                "critic_target": agents[n].critic_target,
            }
            for n in names
        },
        optimizer_state={
            n: {"actor": agents[n].opt_actor.state(),
                "critic": agents[n].opt_critic.state()}
            for n in names
        },
        stats=stats,
    )


def _discounted(rewards, gamma: float) -> float:
    total = 0.0
    factor = 1.0
    for r in rewards:
        total += factor * r
        factor *= gamma
    return total


def execute(env: ConjectureEnv, policies: TrainedPolicies | None,
            n_episodes: int, seed: int = 0) -> list[EpisodeLog]:
    """Evaluation episodes: no exploration noise, no learning, full logs.

    ``policies`` is None for the bare-conjecturer wiring, whose control
    parameters the environment randomizes internally.
    """
    names = _agent_names(env)
    agents: dict[str, _Agent] = {}
    if names:
        if policies is None:
            raise ValueError("this wiring requires trained policies")
        if tuple(policies.agent_order) != names:
            raise ValueError("policy checkpoint does not match the wiring")
        agents = {n: policies.agent(n, env.cfg) for n in names}

    env.reset_run()
    logs: list[EpisodeLog] = []
    for episode in range(n_episodes):
        state = env.reset(episode)
        log = EpisodeLog(
            episode_index=episode,
            seed=_rng.derive_seed(env.run_seed, "episode", episode),
        )
        while not state.terminated:
            actions = {
                n: agents[n].act(_observe(env, n, state)) for n in names
            }
            t_before = state.t
            state, outcome = env.step(state, _env_action(env, actions))
            log.steps.append(env.record_step(t_before, state, outcome))
        logs.append(log)
    return logs


# --------------------------------------------------------------------------
# Checkpoints: versioned header plus raw float64 payload, byte-stable.

def save_policies(path, policies: TrainedPolicies) -> None:
    arrays: list[tuple[str, np.ndarray]] = []

    def put(prefix: str, mapping: dict) -> None:
        for key in sorted(mapping):
            arrays.append((f"{prefix}/{key}", np.asarray(mapping[key], dtype=float)))

    opt_meta = {}
    for name in policies.agent_order:
        for part in ("actor", "critic", "actor_target", "critic_target"):
            put(f"{name}/{part}", policies.params[name][part])
        opt_meta[name] = {}
        for part in ("actor", "critic"):
            state = policies.optimizer_state[name][part]
            opt_meta[name][part] = {"t": state["t"]}
            put(f"{name}/opt_{part}", state["v"])

    header = {
        "version": _VERSION,
        "wiring": policies.wiring_name,
        "agent_order": list(policies.agent_order),
        "dims": policies.dims,
        "optimizer": opt_meta,
        "stats": policies.stats,
        "arrays": [[name, list(a.shape)] for name, a in arrays],
    }
    blob = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(_VERSION.to_bytes(2, "little"))
        fh.write(len(blob).to_bytes(8, "little"))
        fh.write(blob)
        for _, a in arrays:
            fh.write(np.ascontiguousarray(a, dtype="<f8").tobytes())


def load_policies(path) -> TrainedPolicies:
    with open(path, "rb") as fh:
        magic = fh.read(len(_MAGIC))
        if magic != _MAGIC:
            raise ValueError("not a policy checkpoint")
        version = int.from_bytes(fh.read(2), "little")
        if version != _VERSION:
            raise ValueError(f"unsupported checkpoint version {version}")
        header = json.loads(fh.read(int.from_bytes(fh.read(8), "little")))
        payload: dict[str, np.ndarray] = {}
        for name, shape in header["arrays"]:
            count = int(np.prod(shape)) if shape else 1
            data = np.frombuffer(fh.read(count * 8), dtype="<f8")
            payload[name] = data.reshape(shape).copy()

    params: dict = {}
    optimizer: dict = {}
    for name in header["agent_order"]:
        params[name] = {}
        for part in ("actor", "critic", "actor_target", "critic_target"):
            keys = {
                k.split("/", 2)[2]
                for k in payload
                if k.startswith(f"{name}/{part}/")
            }
            params[name][part] = {
                k: payload[f"{name}/{part}/{k}"] for k in sorted(keys)
            }
        optimizer[name] = {}
        for part in ("actor", "critic"):
            keys = {
                k.split("/", 2)[2]
                for k in payload
                if k.startswith(f"{name}/opt_{part}/")
            }
            optimizer[name][part] = {
                "t": header["optimizer"][name][part]["t"],
                "v": {k: payload[f"{name}/opt_{part}/{k}"] for k in sorted(keys)},
            }
    return TrainedPolicies(
        wiring_name=header["wiring"],
        agent_order=tuple(header["agent_order"]),
        dims=header["dims"],
        params=params,
        optimizer_state=optimizer,
        stats=header.get("stats", {}),
    )
