"""Forward kernels for the Tacotron-2 building blocks, float64 numpy arrays throughout."""
from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

from .. import kernels
from ..errors import IndexOutOfRange, InvalidP, ShapeMismatch


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def sigmoid(x):
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def embedding_init(V: int, d: int, seed=0) -> np.ndarray:
    """Uniform on [-val, val] with val = sqrt(3) * sqrt(2 / (V + d))."""
    if V < 1 or d < 1:
        raise ValueError("V and d must be positive")
    val = math.sqrt(3.0) * math.sqrt(2.0 / (V + d))
    return _rng(seed).uniform(-val, val, size=(V, d))


def embedding_lookup(ids, E: np.ndarray) -> np.ndarray:
    ids = np.asarray(ids, dtype=np.int64)
    if ids.size and (ids.min() < 0 or ids.max() >= E.shape[0]):
        raise IndexOutOfRange(f"ids must lie in [0, {E.shape[0]})")
    return E[ids]


@dataclass
class LinearParams:
    W: np.ndarray  # [m, n]
    b: np.ndarray  # [m]

    @classmethod
    def init(cls, n_in: int, n_out: int, rng: np.random.Generator) -> "LinearParams":
        k = 1.0 / math.sqrt(n_in)
        return cls(rng.uniform(-k, k, (n_out, n_in)), rng.uniform(-k, k, n_out))


def linear(x, p: LinearParams) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != p.W.shape[1] or p.b.shape != (p.W.shape[0],):
        raise ShapeMismatch(f"linear: x{x.shape} vs W{p.W.shape}, b{p.b.shape}")
    return x @ p.W.T + p.b


def relu(x) -> np.ndarray:
    return np.maximum(np.asarray(x, dtype=np.float64), 0.0)


def dropout(x, p: float, seed=None, train: bool = True) -> np.ndarray:
    """Inverted dropout: zero with probability p, otherwise scale by 1/(1-p)."""
    if not 0.0 <= p < 1.0:
        raise InvalidP(f"dropout probability must be in [0, 1), got {p}")
    x = np.asarray(x, dtype=np.float64)
    if not train or p == 0.0:
        return x.copy()
    keep = _rng(seed).random(x.shape) >= p
    return np.where(keep, x / (1.0 - p), 0.0)


def conv1d(x, w, b=None) -> np.ndarray:
    """Same-padded cross-correlation.

    x: [C_in, T], w: [C_out, C_in, k] with odd k, b: [C_out].
    y[o, t] = b[o] + sum_c sum_{i<k} w[o, c, i] * x[c, t + i - k//2], zero outside [0, T).
    """
    x = np.ascontiguousarray(x, dtype=np.float64)
    w = np.ascontiguousarray(w, dtype=np.float64)
    if x.ndim != 2 or w.ndim != 3 or w.shape[1] != x.shape[0]:
        raise ShapeMismatch(f"conv1d: x{x.shape} vs w{w.shape}")
    if w.shape[2] % 2 == 0:
        raise ShapeMismatch("conv1d: kernel width must be odd for same padding")
    b = np.zeros(w.shape[0]) if b is None else np.ascontiguousarray(b, dtype=np.float64)
    if b.shape != (w.shape[0],):
        raise ShapeMismatch(f"conv1d: bias {b.shape} vs {w.shape[0]} output channels")
    return np.asarray(kernels.conv1d_same(x, w, b))


@dataclass
class LstmParams:
    W_f: np.ndarray
    W_i: np.ndarray
    W_o: np.ndarray
    W_c: np.ndarray
    U_f: np.ndarray
    U_i: np.ndarray
    U_o: np.ndarray
    U_c: np.ndarray
    b_f: np.ndarray
    b_i: np.ndarray
    b_o: np.ndarray
    b_c: np.ndarray

    @property
    def hidden(self) -> int:
        return self.U_f.shape[0]

    @property
    def n_in(self) -> int:
        return self.W_f.shape[1]

    def check(self) -> None:
        h, n = self.hidden, self.n_in
        for g in "fioc":
            if getattr(self, "W_" + g).shape != (h, n) or getattr(self, "U_" + g).shape != (h, h) \
                    or getattr(self, "b_" + g).shape != (h,):
                raise ShapeMismatch(f"LSTM gate {g}: inconsistent shapes for h={h}, n={n}")

    def arrays(self) -> dict[str, np.ndarray]:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def init(cls, n_in: int, hidden: int, rng: np.random.Generator) -> "LstmParams":
        k = 1.0 / math.sqrt(hidden)
        kw = {}
        for g in "fioc":
            kw["W_" + g] = rng.uniform(-k, k, (hidden, n_in))
            kw["U_" + g] = rng.uniform(-k, k, (hidden, hidden))
            kw["b_" + g] = rng.uniform(-k, k, hidden)
        return cls(**kw)

    @classmethod
    def zeros(cls, n_in: int, hidden: int) -> "LstmParams":
        kw = {}
        for g in "fioc":
            kw["W_" + g] = np.zeros((hidden, n_in))
            kw["U_" + g] = np.zeros((hidden, hidden))
            kw["b_" + g] = np.zeros(hidden)
        return cls(**kw)


def lstm_cell(x_t, h_prev, c_prev, p: LstmParams) -> tuple[np.ndarray, np.ndarray]:
    p.check()
    x_t = np.asarray(x_t, dtype=np.float64)
    if x_t.shape != (p.n_in,) or np.shape(h_prev) != (p.hidden,) or np.shape(c_prev) != (p.hidden,):
        raise ShapeMismatch(f"lstm_cell: x{x_t.shape}, h{np.shape(h_prev)}, c{np.shape(c_prev)}")
    f = sigmoid(p.W_f @ x_t + p.U_f @ h_prev + p.b_f)
    i = sigmoid(p.W_i @ x_t + p.U_i @ h_prev + p.b_i)
    o = sigmoid(p.W_o @ x_t + p.U_o @ h_prev + p.b_o)
    c_tilde = np.tanh(p.W_c @ x_t + p.U_c @ h_prev + p.b_c)
    c_t = f * c_prev + i * c_tilde
    h_t = o * np.tanh(c_t)
    return h_t, c_t


def bilstm(xs, fwd: LstmParams, bwd: LstmParams) -> np.ndarray:
    """[L, n] -> [L, h_fwd + h_bwd], zero initial states in both directions."""
    xs = np.asarray(xs, dtype=np.float64)
    L = xs.shape[0]
    out_f = np.zeros((L, fwd.hidden))
    out_b = np.zeros((L, bwd.hidden))
    h, c = np.zeros(fwd.hidden), np.zeros(fwd.hidden)
    for t in range(L):
        h, c = lstm_cell(xs[t], h, c, fwd)
        out_f[t] = h
    h, c = np.zeros(bwd.hidden), np.zeros(bwd.hidden)
    for t in reversed(range(L)):
        h, c = lstm_cell(xs[t], h, c, bwd)
        out_b[t] = h
    return np.concatenate([out_f, out_b], axis=1)


@dataclass
class AttentionParams:
    W_q: np.ndarray  # [a, s] decoder state projection
    W_m: np.ndarray  # [a, e] memory projection
    W_l: np.ndarray  # [a, c] location feature projection
    F: np.ndarray    # [c, k] location filters over the previous alignment
    v: np.ndarray    # [a]
    b: np.ndarray    # [a]

    def check(self, s_dim: int | None = None, e_dim: int | None = None) -> None:
        a = self.v.shape[0]
        c, k = self.F.shape
        ok = (self.W_q.shape[0] == a and self.W_m.shape[0] == a and self.W_l.shape == (a, c)
              and self.b.shape == (a,) and k % 2 == 1)
        if s_dim is not None:
            ok = ok and self.W_q.shape[1] == s_dim
        if e_dim is not None:
            ok = ok and self.W_m.shape[1] == e_dim
        if not ok:
            raise ShapeMismatch("attention parameters have inconsistent shapes")

    @classmethod
    def init(cls, s_dim: int, e_dim: int, a_dim: int, n_filters: int, width: int,
             rng: np.random.Generator) -> "AttentionParams":
        def u(n_in, shape):
            k = 1.0 / math.sqrt(n_in)
            return rng.uniform(-k, k, shape)
        return cls(u(s_dim, (a_dim, s_dim)), u(e_dim, (a_dim, e_dim)), u(n_filters, (a_dim, n_filters)),
                   u(width, (n_filters, width)), u(a_dim, a_dim), np.zeros(a_dim))


def softmax(e: np.ndarray) -> np.ndarray:
    z = np.exp(e - np.max(e))
    return z / z.sum()


def location_features(alpha_prev: np.ndarray, F: np.ndarray) -> np.ndarray:
    """[L] -> [L, c]: each filter slides over the previous alignment."""
    return conv1d(alpha_prev[None, :], F[:, None, :]).T


def attention_step(s_t, H, alpha_prev, p: AttentionParams,
                   processed_memory: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Location-sensitive attention.

    e_i = v . tanh(W_q s_t + W_m h_i + W_l f_i + b), alpha = softmax(e),
    context = sum_i alpha_i h_i, where f = location_features(alpha_prev).
    """
    s_t = np.asarray(s_t, dtype=np.float64)
    H = np.asarray(H, dtype=np.float64)
    alpha_prev = np.asarray(alpha_prev, dtype=np.float64)
    p.check(s_t.shape[0], H.shape[1])
    if alpha_prev.shape != (H.shape[0],):
        raise ShapeMismatch(f"alpha_prev{alpha_prev.shape} vs memory length {H.shape[0]}")
    mem = H @ p.W_m.T if processed_memory is None else processed_memory
    loc = location_features(alpha_prev, p.F) @ p.W_l.T
    z = np.tanh(p.W_q @ s_t + mem + loc + p.b)
    alpha = softmax(z @ p.v)
    return alpha, alpha @ H


def prenet(x, layers: list[LinearParams], seed=None, p: float = 0.5) -> np.ndarray:
    """FC -> ReLU -> dropout, per layer. Dropout stays on at inference."""
    rng = _rng(seed)
    y = np.asarray(x, dtype=np.float64)
    for layer in layers:
        y = dropout(relu(linear(y, layer)), p, rng, train=True)
    return y


@dataclass
class ConvParams:
    w: np.ndarray  # [C_out, C_in, k]
    b: np.ndarray  # [C_out]

    @classmethod
    def init(cls, c_in: int, c_out: int, k: int, rng: np.random.Generator) -> "ConvParams":
        bound = 1.0 / math.sqrt(c_in * k)
        return cls(rng.uniform(-bound, bound, (c_out, c_in, k)), rng.uniform(-bound, bound, c_out))


def postnet(mel, layers: list[ConvParams]) -> np.ndarray:
    """Residual for [T, n_mels] frames; tanh after every layer except the last."""
    y = np.asarray(mel, dtype=np.float64).T
    for idx, layer in enumerate(layers):
        y = conv1d(y, layer.w, layer.b)
        if idx < len(layers) - 1:
            y = np.tanh(y)
    return y.T
