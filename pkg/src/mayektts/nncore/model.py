"""Tacotron-2 forward graph at configurable (toy) dimensions."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from ..errors import ShapeMismatch
from .layers import (AttentionParams, ConvParams, LinearParams, LstmParams, attention_step, bilstm,
                     conv1d, embedding_init, embedding_lookup, linear, lstm_cell, postnet, prenet, relu,
                     sigmoid)

ENCODER_CONVS = 3
ENCODER_KERNEL = 5
POSTNET_LAYERS = 5
POSTNET_KERNEL = 5
PRENET_LAYERS = 2
PRENET_DROPOUT = 0.5


@dataclass(frozen=True)
class ModelDims:
    n_symbols: int
    embed_dim: int = 64
    encoder_dim: int = 128      # conv channels and BiLSTM output (two halves)
    prenet_dim: int = 64
    decoder_dim: int = 256
    attention_dim: int = 64
    location_filters: int = 8
    location_kernel: int = 15
    postnet_channels: int = 128
    n_mels: int = 80

    def __post_init__(self) -> None:
        if self.encoder_dim % 2:
            raise ValueError("encoder_dim must be even (split across BiLSTM directions)")
        if self.location_kernel % 2 == 0:
            raise ValueError("location_kernel must be odd")


@dataclass
class Tacotron2Params:
    dims: ModelDims
    embedding: np.ndarray
    enc_convs: list[ConvParams]
    enc_fwd: LstmParams
    enc_bwd: LstmParams
    prenet: list[LinearParams]
    att_rnn: LstmParams
    attention: AttentionParams
    dec_rnn: LstmParams
    mel_proj: LinearParams
    stop_proj: LinearParams
    postnet: list[ConvParams] = field(default_factory=list)

    def named_tensors(self) -> list[tuple[str, np.ndarray]]:
        """Flat (name, array) list in the fixed weight-file order."""
        out: list[tuple[str, np.ndarray]] = [("embedding", self.embedding)]
        for i, conv in enumerate(self.enc_convs):
            out += [(f"enc.conv{i}.w", conv.w), (f"enc.conv{i}.b", conv.b)]
        for prefix, lstm in (("enc.lstm_fwd", self.enc_fwd), ("enc.lstm_bwd", self.enc_bwd)):
            out += [(f"{prefix}.{k}", v) for k, v in lstm.arrays().items()]
        for i, lin in enumerate(self.prenet):
            out += [(f"prenet.{i}.W", lin.W), (f"prenet.{i}.b", lin.b)]
        out += [(f"dec.att_rnn.{k}", v) for k, v in self.att_rnn.arrays().items()]
        a = self.attention
        out += [("att.W_q", a.W_q), ("att.W_m", a.W_m), ("att.W_l", a.W_l), ("att.F", a.F),
                ("att.v", a.v), ("att.b", a.b)]
        out += [(f"dec.rnn.{k}", v) for k, v in self.dec_rnn.arrays().items()]
        out += [("mel_proj.W", self.mel_proj.W), ("mel_proj.b", self.mel_proj.b),
                ("stop_proj.W", self.stop_proj.W), ("stop_proj.b", self.stop_proj.b)]
        for i, conv in enumerate(self.postnet):
            out += [(f"postnet.{i}.w", conv.w), (f"postnet.{i}.b", conv.b)]
        return out

    @classmethod
    def from_named(cls, tensors: dict[str, np.ndarray], dims: ModelDims) -> "Tacotron2Params":
        """Rebuild from a name -> array map, checking names and shapes against ``dims``."""
        expected = [(name, arr.shape) for name, arr in zeros_params(dims).named_tensors()]
        if set(tensors) != {name for name, _ in expected}:
            missing = sorted({n for n, _ in expected} - set(tensors))
            extra = sorted(set(tensors) - {n for n, _ in expected})
            raise ShapeMismatch(f"tensor names differ from schema: missing={missing[:5]} extra={extra[:5]}")
        for name, shape in expected:
            if tensors[name].shape != shape:
                raise ShapeMismatch(f"{name}: expected {shape}, found {tensors[name].shape}")
        t = {k: np.asarray(v, dtype=np.float64) for k, v in tensors.items()}

        def lstm(prefix):
            return LstmParams(**{g: t[f"{prefix}.{g}"] for g in LstmParams.__dataclass_fields__})

        return cls(
            dims=dims,
            embedding=t["embedding"],
            enc_convs=[ConvParams(t[f"enc.conv{i}.w"], t[f"enc.conv{i}.b"]) for i in range(ENCODER_CONVS)],
            enc_fwd=lstm("enc.lstm_fwd"),
            enc_bwd=lstm("enc.lstm_bwd"),
            prenet=[LinearParams(t[f"prenet.{i}.W"], t[f"prenet.{i}.b"]) for i in range(PRENET_LAYERS)],
            att_rnn=lstm("dec.att_rnn"),
            attention=AttentionParams(t["att.W_q"], t["att.W_m"], t["att.W_l"], t["att.F"], t["att.v"], t["att.b"]),
            dec_rnn=lstm("dec.rnn"),
            mel_proj=LinearParams(t["mel_proj.W"], t["mel_proj.b"]),
            stop_proj=LinearParams(t["stop_proj.W"], t["stop_proj.b"]),
            postnet=[ConvParams(t[f"postnet.{i}.w"], t[f"postnet.{i}.b"]) for i in range(POSTNET_LAYERS)],
        )


def _layout(dims: ModelDims):
    """Per-block constructor arguments shared by init_params and zeros_params."""
    e, h_enc = dims.encoder_dim, dims.encoder_dim // 2
    d = dims.decoder_dim
    conv_in = [dims.embed_dim] + [e] * (ENCODER_CONVS - 1)
    prenet_in = [dims.n_mels] + [dims.prenet_dim] * (PRENET_LAYERS - 1)
    post_ch = [dims.n_mels] + [dims.postnet_channels] * (POSTNET_LAYERS - 1) + [dims.n_mels]
    return e, h_enc, d, conv_in, prenet_in, post_ch


STOP_BIAS_INIT = -4.0


def init_params(dims: ModelDims, seed=0) -> Tacotron2Params:
    rng = np.random.default_rng(seed)
    e, h_enc, d, conv_in, prenet_in, post_ch = _layout(dims)
    params = Tacotron2Params(
        dims=dims,
        embedding=embedding_init(dims.n_symbols, dims.embed_dim, rng),
        enc_convs=[ConvParams.init(c, e, ENCODER_KERNEL, rng) for c in conv_in],
        enc_fwd=LstmParams.init(e, h_enc, rng),
        enc_bwd=LstmParams.init(e, h_enc, rng),
        prenet=[LinearParams.init(n, dims.prenet_dim, rng) for n in prenet_in],
        att_rnn=LstmParams.init(dims.prenet_dim + e, d, rng),
        attention=AttentionParams.init(d, e, dims.attention_dim, dims.location_filters, dims.location_kernel, rng),
        dec_rnn=LstmParams.init(d + e, d, rng),
        mel_proj=LinearParams.init(d + e, dims.n_mels, rng),
        stop_proj=LinearParams.init(d + e, 1, rng),
        postnet=[ConvParams.init(post_ch[i], post_ch[i + 1], POSTNET_KERNEL, rng) for i in range(POSTNET_LAYERS)],
    )
    # untrained weights should not stop on the first frame by chance
    params.stop_proj.b[:] = STOP_BIAS_INIT
    return params


def zeros_params(dims: ModelDims) -> Tacotron2Params:
    e, h_enc, d, conv_in, prenet_in, post_ch = _layout(dims)
    z = np.zeros
    return Tacotron2Params(
        dims=dims,
        embedding=z((dims.n_symbols, dims.embed_dim)),
        enc_convs=[ConvParams(z((e, c, ENCODER_KERNEL)), z(e)) for c in conv_in],
        enc_fwd=LstmParams.zeros(e, h_enc),
        enc_bwd=LstmParams.zeros(e, h_enc),
        prenet=[LinearParams(z((dims.prenet_dim, n)), z(dims.prenet_dim)) for n in prenet_in],
        att_rnn=LstmParams.zeros(dims.prenet_dim + e, d),
        attention=AttentionParams(z((dims.attention_dim, d)), z((dims.attention_dim, e)),
                                  z((dims.attention_dim, dims.location_filters)),
                                  z((dims.location_filters, dims.location_kernel)),
                                  z(dims.attention_dim), z(dims.attention_dim)),
        dec_rnn=LstmParams.zeros(d + e, d),
        mel_proj=LinearParams(z((dims.n_mels, d + e)), z(dims.n_mels)),
        stop_proj=LinearParams(z((1, d + e)), z(1)),
        postnet=[ConvParams(z((post_ch[i + 1], post_ch[i], POSTNET_KERNEL)), z(post_ch[i + 1]))
                 for i in range(POSTNET_LAYERS)],
    )


def encode(ids, params: Tacotron2Params) -> np.ndarray:
    """ids -> encoder memory [L, encoder_dim]."""
    x = embedding_lookup(ids, params.embedding).T  # [d, L]
    for conv in params.enc_convs:
        x = relu(conv1d(x, conv.w, conv.b))
    return bilstm(x.T, params.enc_fwd, params.enc_bwd)


class ForwardOutput(NamedTuple):
    mel: np.ndarray       # [T, n_mels]
    mel_post: np.ndarray  # [T, n_mels]
    stops: np.ndarray     # [T] stop probabilities
    align: np.ndarray     # [T, L]


def tacotron_forward(ids, params: Tacotron2Params, max_frames: int = 200, stop_threshold: float = 0.5,
                     seed=0) -> ForwardOutput:
    """Autoregressive inference.

    Per step: prenet(previous frame) -> attention LSTM -> location-sensitive
    attention -> decoder LSTM -> mel and stop projections. Decoding stops
    after the first frame whose stop probability exceeds ``stop_threshold``,
    or at ``max_frames``.
    """
    ids = np.asarray(ids, dtype=np.int64)
    if ids.ndim != 1 or len(ids) == 0:
        raise ShapeMismatch("tacotron_forward needs a non-empty 1-D id sequence")
    if max_frames < 1:
        raise ValueError("max_frames must be >= 1")
    dims = params.dims
    rng = np.random.default_rng(seed)
    memory = encode(ids, params)
    processed = memory @ params.attention.W_m.T
    L = len(ids)

    frame = np.zeros(dims.n_mels)
    h1 = np.zeros(dims.decoder_dim)
    c1 = np.zeros(dims.decoder_dim)
    h2 = np.zeros(dims.decoder_dim)
    c2 = np.zeros(dims.decoder_dim)
    context = np.zeros(dims.encoder_dim)
    alpha = np.zeros(L)
    alpha[0] = 1.0

    mels, stops, aligns = [], [], []
    for _ in range(max_frames):
        pre = prenet(frame, params.prenet, rng, PRENET_DROPOUT)
        h1, c1 = lstm_cell(np.concatenate([pre, context]), h1, c1, params.att_rnn)
        alpha, context = attention_step(h1, memory, alpha, params.attention, processed)
        h2, c2 = lstm_cell(np.concatenate([h1, context]), h2, c2, params.dec_rnn)
        proj_in = np.concatenate([h2, context])
        frame = linear(proj_in, params.mel_proj)
        stop = float(sigmoid(linear(proj_in, params.stop_proj))[0])
        mels.append(frame)
        stops.append(stop)
        aligns.append(alpha)
        if stop > stop_threshold:
            break

    mel = np.stack(mels)
    return ForwardOutput(mel, mel + postnet(mel, params.postnet), np.array(stops), np.stack(aligns))
