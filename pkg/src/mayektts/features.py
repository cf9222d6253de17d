"""STFT, mel filterbank, log-mel spectrogram and Griffin-Lim reconstruction."""
from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np

from . import kernels
from .audio import AudioBuffer
from .errors import BadMagic, EmptySignal, TruncatedFile

LOG_FLOOR = 1e-5


@dataclass(frozen=True)
class StftConfig:
    n_fft: int = 1024
    hop: int = 256
    win_length: int = 1024

    def __post_init__(self) -> None:
        if self.n_fft <= 0 or self.n_fft & (self.n_fft - 1):
            raise ValueError("n_fft must be a power of two")
        if not 0 < self.hop <= self.win_length <= self.n_fft:
            raise ValueError("need 0 < hop <= win_length <= n_fft")

    def window(self) -> np.ndarray:
        """Periodic Hann of win_length, zero-padded symmetrically to n_fft."""
        n = np.arange(self.win_length)
        w = 0.5 - 0.5 * np.cos(2.0 * np.pi * n / self.win_length)
        left = (self.n_fft - self.win_length) // 2
        out = np.zeros(self.n_fft)
        out[left:left + self.win_length] = w
        return out


@dataclass(frozen=True)
class MelConfig:
    n_mels: int = 80
    fmin: float = 0.0
    fmax: float = 8000.0
    sample_rate: int = 22050

    def __post_init__(self) -> None:
        if not 0 <= self.fmin < self.fmax <= self.sample_rate / 2:
            raise ValueError("need 0 <= fmin < fmax <= sample_rate/2")


def n_frames_for(n_samples: int, cfg: StftConfig) -> int:
    return 1 + n_samples // cfg.hop


def _pad(x: np.ndarray, cfg: StftConfig) -> np.ndarray:
    return np.pad(x, cfg.n_fft // 2, mode="reflect") if len(x) > 1 else np.pad(x, cfg.n_fft // 2)


def _frames(padded: np.ndarray, cfg: StftConfig, n_frames: int) -> np.ndarray:
    view = np.lib.stride_tricks.sliding_window_view(padded, cfg.n_fft)[::cfg.hop]
    return view[:n_frames]


def stft_complex(x: np.ndarray, cfg: StftConfig) -> np.ndarray:
    """Complex STFT, shape [n_frames, n_fft//2 + 1], centred with reflect padding."""
    x = np.asarray(x, dtype=np.float64)
    if len(x) == 0:
        raise EmptySignal("cannot analyse an empty signal")
    return _analyse(_pad(x, cfg), cfg, n_frames_for(len(x), cfg))


def _analyse(padded: np.ndarray, cfg: StftConfig, n_frames: int) -> np.ndarray:
    return np.fft.rfft(_frames(padded, cfg, n_frames) * cfg.window(), axis=1)


def stft(buf: AudioBuffer | np.ndarray, cfg: StftConfig = StftConfig()) -> np.ndarray:
    x = buf.samples if isinstance(buf, AudioBuffer) else buf
    return np.abs(stft_complex(x, cfg))


def _synthesise(spec: np.ndarray, cfg: StftConfig, padded_len: int) -> np.ndarray:
    """Least-squares inverse onto the padded time axis (window-square normalized OLA)."""
    w = cfg.window()
    frames = np.fft.irfft(spec, n=cfg.n_fft, axis=1) * w
    num = kernels.overlap_add(np.ascontiguousarray(frames), cfg.hop, padded_len)
    wsq = np.ascontiguousarray(np.broadcast_to(w * w, frames.shape))
    den = kernels.overlap_add(wsq, cfg.hop, padded_len)
    out = np.zeros(padded_len)
    nz = den > 1e-12
    out[nz] = np.asarray(num)[nz] / np.asarray(den)[nz]
    return out


def istft(spec: np.ndarray, cfg: StftConfig = StftConfig(), length: int | None = None) -> np.ndarray:
    n_frames = spec.shape[0]
    if length is None:
        length = (n_frames - 1) * cfg.hop
    padded_len = length + 2 * (cfg.n_fft // 2)
    y = _synthesise(spec, cfg, padded_len)
    return y[cfg.n_fft // 2: cfg.n_fft // 2 + length]


def hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


def mel_filterbank(cfg: MelConfig = MelConfig(), n_fft: int = 1024) -> np.ndarray:
    """Triangular filters, shape [n_mels, n_fft//2 + 1], unnormalized peaks of 1."""
    bin_hz = np.arange(n_fft // 2 + 1) * cfg.sample_rate / n_fft
    edges = mel_to_hz(np.linspace(hz_to_mel(cfg.fmin), hz_to_mel(cfg.fmax), cfg.n_mels + 2))
    lower, centre, upper = edges[:-2, None], edges[1:-1, None], edges[2:, None]
    rising = (bin_hz[None, :] - lower) / (centre - lower)
    falling = (upper - bin_hz[None, :]) / (upper - centre)
    return np.maximum(0.0, np.minimum(rising, falling))


@dataclass
class MelSpec:
    data: np.ndarray  # [n_frames, n_mels]
    config: MelConfig = MelConfig()

    @property
    def n_frames(self) -> int:
        return self.data.shape[0]


def mel_spectrogram(buf: AudioBuffer, stft_cfg: StftConfig = StftConfig(),
                    mel_cfg: MelConfig = MelConfig()) -> MelSpec:
    if buf.sample_rate != mel_cfg.sample_rate:
        raise ValueError(f"audio is {buf.sample_rate} Hz, mel config expects {mel_cfg.sample_rate} Hz")
    mag = stft(buf, stft_cfg)
    mel = mag @ mel_filterbank(mel_cfg, stft_cfg.n_fft).T
    return MelSpec(np.log(np.maximum(LOG_FLOOR, mel)), mel_cfg)


def mel_to_linear(mel: MelSpec, n_fft: int = 1024) -> np.ndarray:
    """Approximate linear magnitude from a log-mel spectrogram via the filterbank pseudo-inverse."""
    fb = mel_filterbank(mel.config, n_fft)
    return np.maximum(0.0, np.exp(mel.data) @ np.linalg.pinv(fb).T)


class GriffinLimResult(NamedTuple):
    audio: AudioBuffer
    errors: list[float]  # spectral convergence after each iteration


def _spectral_convergence(mag_est: np.ndarray, mag: np.ndarray, weight: np.ndarray, ref: float) -> float:
    diff = (mag_est - mag) ** 2
    return float(np.sqrt(np.sum(diff * weight)) / ref) if ref > 0 else 0.0


def griffin_lim(mag: np.ndarray, cfg: StftConfig = StftConfig(), n_iters: int = 60, seed: int = 0,
                sample_rate: int = 22050, length: int | None = None) -> GriffinLimResult:
    """Classic alternating projection between consistent spectrograms and the target magnitude.

    Iterates on the padded time axis so every step is an exact least-squares
    projection; the error is measured with the full two-sided spectrum
    weighting (each interior bin counted twice), which is the norm that
    projection minimises. Under those two conditions the error sequence is
    non-increasing.
    """
    mag = np.asarray(mag, dtype=np.float64)
    if np.any(mag < 0):
        raise ValueError("magnitudes must be non-negative")
    n_frames = mag.shape[0]
    if length is None:
        length = (n_frames - 1) * cfg.hop
    half = cfg.n_fft // 2
    padded_len = length + 2 * half
    weight = np.full(mag.shape[1], 2.0)
    weight[0] = 1.0
    if cfg.n_fft % 2 == 0:
        weight[-1] = 1.0
    weight = weight[None, :]
    ref = float(np.sqrt(np.sum(mag * mag * weight)))

    rng = np.random.default_rng(seed)
    phase = np.exp(2j * np.pi * rng.uniform(size=mag.shape))
    errors: list[float] = []
    y = np.zeros(padded_len)
    if ref == 0.0:
        return GriffinLimResult(AudioBuffer(np.zeros(length), sample_rate), [0.0] * n_iters)
    for _ in range(n_iters):
        y = _synthesise(mag * phase, cfg, padded_len)
        spec = _analyse(y, cfg, n_frames)
        est = np.abs(spec)
        errors.append(_spectral_convergence(est, mag, weight, ref))
        phase = np.where(est > 0, spec / np.where(est > 0, est, 1.0), 1.0)
    return GriffinLimResult(AudioBuffer(y[half:half + length], sample_rate), errors)


MEL_MAGIC = b"MELS"


def save_mel(path: str | Path, mel: MelSpec) -> None:
    n_frames, n_mels = mel.data.shape
    with open(path, "wb") as fh:
        fh.write(MEL_MAGIC + struct.pack("<II", n_frames, n_mels))
        fh.write(np.ascontiguousarray(mel.data, dtype="<f4").tobytes())


def load_mel(path: str | Path, config: MelConfig | None = None) -> MelSpec:
    blob = Path(path).read_bytes()
    if blob[:4] != MEL_MAGIC:
        raise BadMagic(f"{path}: not a MELS file")
    if len(blob) < 12:
        raise TruncatedFile(f"{path}: header truncated")
    n_frames, n_mels = struct.unpack("<II", blob[4:12])
    need = 12 + 4 * n_frames * n_mels
    if len(blob) < need:
        raise TruncatedFile(f"{path}: expected {need} bytes, found {len(blob)}")
    data = np.frombuffer(blob[12:need], dtype="<f4").astype(np.float64).reshape(n_frames, n_mels)
    cfg = config or MelConfig(n_mels=n_mels)
    return MelSpec(data, cfg)
