"""Analytic backward passes and a central-difference gradient checker.

The backward passes exist only to verify the forward kernels; nothing here
trains a model. Every ``*_backward`` takes the upstream gradient(s) of a
scalar loss with respect to the forward outputs and returns a dict of
gradients keyed by input/parameter name.
"""
from __future__ import annotations

from typing import Callable

import numpy as np

from .layers import (AttentionParams, LinearParams, LstmParams, attention_step, conv1d, linear,
                     location_features, lstm_cell, sigmoid)


def linear_backward(x, p: LinearParams, gy) -> dict[str, np.ndarray]:
    x = np.asarray(x, dtype=np.float64)
    return {"x": gy @ p.W, "W": np.outer(gy, x) if x.ndim == 1 else gy.T @ x,
            "b": gy if x.ndim == 1 else gy.sum(axis=0)}


def conv1d_backward(x, w, gy) -> dict[str, np.ndarray]:
    x = np.asarray(x, dtype=np.float64)
    c_out, c_in, k = w.shape
    T = x.shape[1]
    pad = k // 2
    xp = np.pad(x, ((0, 0), (pad, k - 1 - pad)))
    gx_p = np.zeros_like(xp)
    gw = np.zeros_like(w)
    for i in range(k):
        window = xp[:, i:i + T]  # x[c, t + i - pad]
        gw[:, :, i] = gy @ window.T
        gx_p[:, i:i + T] += w[:, :, i].T @ gy
    return {"x": gx_p[:, pad:pad + T], "w": gw, "b": gy.sum(axis=1)}


def lstm_cell_backward(x, h_prev, c_prev, p: LstmParams, gh, gc) -> dict[str, np.ndarray]:
    x = np.asarray(x, dtype=np.float64)
    pre = {g: getattr(p, "W_" + g) @ x + getattr(p, "U_" + g) @ h_prev + getattr(p, "b_" + g) for g in "fioc"}
    f, i, o = sigmoid(pre["f"]), sigmoid(pre["i"]), sigmoid(pre["o"])
    c_tilde = np.tanh(pre["c"])
    c_t = f * c_prev + i * c_tilde
    tc = np.tanh(c_t)

    d_o = gh * tc
    d_c = gc + gh * o * (1.0 - tc * tc)
    d_pre = {
        "f": d_c * c_prev * f * (1.0 - f),
        "i": d_c * c_tilde * i * (1.0 - i),
        "o": d_o * o * (1.0 - o),
        "c": d_c * i * (1.0 - c_tilde * c_tilde),
    }
    grads = {"x": np.zeros_like(x), "h_prev": np.zeros_like(h_prev), "c_prev": d_c * f}
    for g, dz in d_pre.items():
        W, U = getattr(p, "W_" + g), getattr(p, "U_" + g)
        grads["x"] += W.T @ dz
        grads["h_prev"] += U.T @ dz
        grads["W_" + g] = np.outer(dz, x)
        grads["U_" + g] = np.outer(dz, h_prev)
        grads["b_" + g] = dz
    return grads


def attention_step_backward(s, H, alpha_prev, p: AttentionParams, g_alpha, g_ctx) -> dict[str, np.ndarray]:
    s = np.asarray(s, dtype=np.float64)
    H = np.asarray(H, dtype=np.float64)
    feats = location_features(alpha_prev, p.F)          # [L, c]
    z = np.tanh(p.W_q @ s + H @ p.W_m.T + feats @ p.W_l.T + p.b)  # [L, a]
    alpha, _ = attention_step(s, H, alpha_prev, p)

    g_a = g_alpha + H @ g_ctx
    d_e = alpha * (g_a - alpha @ g_a)
    d_z = d_e[:, None] * p.v[None, :] * (1.0 - z * z)   # [L, a]
    d_feats = d_z @ p.W_l                               # [L, c]
    conv = conv1d_backward(alpha_prev[None, :], p.F[:, None, :], d_feats.T)
    return {
        "s": p.W_q.T @ d_z.sum(axis=0),
        "H": np.outer(alpha, g_ctx) + d_z @ p.W_m,
        "alpha_prev": conv["x"][0],
        "W_q": np.outer(d_z.sum(axis=0), s),
        "W_m": d_z.T @ H,
        "W_l": d_z.T @ feats,
        "F": conv["w"][:, 0, :],
        "v": d_e @ z,
        "b": d_z.sum(axis=0),
    }


def relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    """||a - n|| / (||a|| + ||n||), 0 when both vanish."""
    denom = np.linalg.norm(analytic) + np.linalg.norm(numeric)
    return float(np.linalg.norm(analytic - numeric) / denom) if denom > 0 else 0.0


def numeric_grad(loss: Callable[[], float], arr: np.ndarray, eps: float = 1e-5) -> np.ndarray:
    """Central differences, perturbing ``arr`` in place."""
    grad = np.zeros_like(arr)
    flat = arr.reshape(-1)
    g = grad.reshape(-1)
    for j in range(flat.size):
        orig = flat[j]
        flat[j] = orig + eps
        up = loss()
        flat[j] = orig - eps
        down = loss()
        flat[j] = orig
        g[j] = (up - down) / (2.0 * eps)
    return grad


def grad_check(loss: Callable[[], float], analytic: Callable[[], dict[str, np.ndarray]],
               params: dict[str, np.ndarray], eps: float = 1e-5) -> float:
    """Largest relative error over every tensor in ``params``.

    ``loss`` and ``analytic`` close over the same arrays held in ``params``;
    the checker perturbs those arrays in place and restores them.
    """
    grads = analytic()
    worst = 0.0
    for name, arr in params.items():
        worst = max(worst, relative_error(grads[name], numeric_grad(loss, arr, eps)))
    return worst


# ready-made checks on random instances, used by the test-suite and the CLI


def check_linear(rng: np.random.Generator, eps: float = 1e-5) -> float:
    n, m = rng.integers(1, 7, size=2)
    p = LinearParams(rng.standard_normal((m, n)), rng.standard_normal(m))
    x = rng.standard_normal(n)
    gy = rng.standard_normal(m)
    return grad_check(lambda: float(gy @ linear(x, p)), lambda: linear_backward(x, p, gy),
                      {"x": x, "W": p.W, "b": p.b}, eps)


def check_conv1d(rng: np.random.Generator, eps: float = 1e-5) -> float:
    c_in, c_out, T = rng.integers(1, 4, size=3)
    T += 3
    k = int(rng.choice([1, 3, 5]))
    x = rng.standard_normal((c_in, T))
    w = rng.standard_normal((c_out, c_in, k))
    b = rng.standard_normal(c_out)
    gy = rng.standard_normal((c_out, T))
    return grad_check(lambda: float(np.sum(gy * conv1d(x, w, b))), lambda: conv1d_backward(x, w, gy),
                      {"x": x, "w": w, "b": b}, eps)


def check_lstm_cell(rng: np.random.Generator, eps: float = 1e-5) -> float:
    n, h = rng.integers(1, 5, size=2)
    p = LstmParams.init(n, h, rng)
    for arr in p.arrays().values():
        arr *= 2.0
    x, h_prev, c_prev = rng.standard_normal(n), rng.standard_normal(h), rng.standard_normal(h)
    gh, gc = rng.standard_normal(h), rng.standard_normal(h)

    def loss():
        h_t, c_t = lstm_cell(x, h_prev, c_prev, p)
        return float(gh @ h_t + gc @ c_t)

    params = {"x": x, "h_prev": h_prev, "c_prev": c_prev, **p.arrays()}
    return grad_check(loss, lambda: lstm_cell_backward(x, h_prev, c_prev, p, gh, gc), params, eps)


def check_attention_step(rng: np.random.Generator, eps: float = 1e-5) -> float:
    s_dim, e_dim, a_dim, c = rng.integers(1, 5, size=4)
    L = int(rng.integers(1, 7))
    k = int(rng.choice([1, 3, 5]))
    p = AttentionParams(rng.standard_normal((a_dim, s_dim)), rng.standard_normal((a_dim, e_dim)),
                        rng.standard_normal((a_dim, c)), rng.standard_normal((c, k)),
                        rng.standard_normal(a_dim), rng.standard_normal(a_dim))
    s = rng.standard_normal(s_dim)
    H = rng.standard_normal((L, e_dim))
    alpha_prev = rng.dirichlet(np.ones(L))
    g_alpha, g_ctx = rng.standard_normal(L), rng.standard_normal(e_dim)

    def loss():
        alpha, ctx = attention_step(s, H, alpha_prev, p)
        return float(g_alpha @ alpha + g_ctx @ ctx)

    params = {"s": s, "H": H, "alpha_prev": alpha_prev, "W_q": p.W_q, "W_m": p.W_m,
              "W_l": p.W_l, "F": p.F, "v": p.v, "b": p.b}
    return grad_check(loss, lambda: attention_step_backward(s, H, alpha_prev, p, g_alpha, g_ctx), params, eps)


CHECKS = {
    "linear": check_linear,
    "conv1d": check_conv1d,
    "lstm_cell": check_lstm_cell,
    "attention_step": check_attention_step,
}
