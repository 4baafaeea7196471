"""Small fully connected networks with hand-rolled reverse mode.

Two hidden tanh layers of 64 units; actors bound their output with tanh,
critics end linear.  Everything is float64 numpy, so analytic gradients
check against central finite differences tightly.  The optimizer is a
momentumless adaptive step: per-parameter second-moment normalization with
bias correction, no first-moment accumulator.
"""

from __future__ import annotations

import numpy as np

from .. import rng as _rng

HIDDEN = 64


def init_params(in_dim: int, out_dim: int, seed: int, hidden: int = HIDDEN) -> dict:
    gen = _rng.generator(seed, "mlp-init", in_dim, out_dim)
    sizes = [(in_dim, hidden), (hidden, hidden), (hidden, out_dim)]
    params: dict[str, np.ndarray] = {}
    for i, (fan_in, fan_out) in enumerate(sizes, start=1):
        bound = 1.0 / np.sqrt(fan_in)
        params[f"W{i}"] = gen.uniform(-bound, bound, size=(fan_in, fan_out))
        params[f"b{i}"] = np.zeros(fan_out)
    return params


class MLP:
    """Stateless forward/backward over an external parameter dict."""

    def __init__(self, in_dim: int, out_dim: int, out_tanh: bool) -> None:
        self.in_dim = in_dim
        self.out_dim = out_dim
        self.out_tanh = out_tanh

    def forward(self, params: dict, x: np.ndarray):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        h1 = np.tanh(x @ params["W1"] + params["b1"])
        h2 = np.tanh(h1 @ params["W2"] + params["b2"])
        out = h2 @ params["W3"] + params["b3"]
        if self.out_tanh:
            out = np.tanh(out)
        cache = (x, h1, h2, out)
        return out, cache

    def __call__(self, params: dict, x: np.ndarray) -> np.ndarray:
        return self.forward(params, x)[0]

    def backward(self, params: dict, cache, dout: np.ndarray):
        """Gradients of sum(dout * out) w.r.t. params and the input."""
        x, h1, h2, out = cache
        d = np.asarray(dout, dtype=float)
        if self.out_tanh:
            d = d * (1.0 - out**2)
        grads = {
            "W3": h2.T @ d,
            "b3": d.sum(axis=0),
        }
        dh2 = (d @ params["W3"].T) * (1.0 - h2**2)
        grads["W2"] = h1.T @ dh2
        grads["b2"] = dh2.sum(axis=0)
        dh1 = (dh2 @ params["W2"].T) * (1.0 - h1**2)
        grads["W1"] = x.T @ dh1
        grads["b1"] = dh1.sum(axis=0)
        dx = dh1 @ params["W1"].T
        return grads, dx


class AdaptiveStep:
    """Second-moment-normalized gradient step with bias correction."""

    def __init__(self, lr: float, beta2: float = 0.999, eps: float = 1e-8) -> None:
        self.lr = lr
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.v: dict[str, np.ndarray] = {}

    def step(self, params: dict, grads: dict) -> None:
        self.t += 1
        correction = 1.0 - self.beta2**self.t
        for key, grad in grads.items():
            v = self.v.get(key)
            if v is None:
                v = np.zeros_like(grad)
            v = self.beta2 * v + (1.0 - self.beta2) * grad**2
            self.v[key] = v
            params[key] -= self.lr * grad / (np.sqrt(v / correction) + self.eps)

    def state(self) -> dict:
        return {"t": self.t, "v": {k: v.copy() for k, v in self.v.items()}}

    def load_state(self, state: dict) -> None:
        self.t = int(state["t"])
        self.v = {k: np.array(v, dtype=float) for k, v in state["v"].items()}


def soft_update(target: dict, online: dict, tau: float) -> None:
    """target <- (1 - tau) * target + tau * online, parameter-wise."""
    for key in target:
        target[key] *= 1.0 - tau
        target[key] += tau * online[key]


def flatten_params(params: dict) -> np.ndarray:
    return np.concatenate([params[k].ravel() for k in sorted(params)])


def unflatten_params(template: dict, flat: np.ndarray) -> dict:
    out = {}
    offset = 0
    for key in sorted(template):
        size = template[key].size
        out[key] = flat[offset : offset + size].reshape(template[key].shape).copy()
        offset += size
    return out
