"""WAV I/O and corpus audio preparation: silence trim, loudness, resampling."""
from __future__ import annotations

import math
import wave
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np

from . import kernels
from .errors import CorruptHeader, SilentInput, UnsupportedFormat

CORPUS_RATE = 22050


@dataclass(frozen=True)
class AudioBuffer:
    samples: np.ndarray
    sample_rate: int

    def __post_init__(self) -> None:
        samples = np.ascontiguousarray(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise ValueError("AudioBuffer holds mono audio only")
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")
        if not np.all(np.isfinite(samples)):
            raise ValueError("samples must be finite")
        object.__setattr__(self, "samples", samples)

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def duration(self) -> float:
        return len(self.samples) / self.sample_rate


class WavInfo(NamedTuple):
    sample_rate: int
    n_frames: int
    channels: int

    @property
    def duration(self) -> float:
        return self.n_frames / self.sample_rate


def _open(path: str | Path) -> wave.Wave_read:
    try:
        return wave.open(str(path), "rb")
    except wave.Error as exc:
        if "unknown format" in str(exc):
            raise UnsupportedFormat(f"{path}: {exc} (only PCM is supported)") from None
        raise CorruptHeader(f"{path}: {exc}") from None
    except EOFError:
        raise CorruptHeader(f"{path}: truncated header") from None


def probe_wav(path: str | Path) -> WavInfo:
    """Read the header only."""
    with _open(path) as wf:
        if wf.getsampwidth() != 2:
            raise UnsupportedFormat(f"{path}: {8 * wf.getsampwidth()}-bit PCM, expected 16-bit")
        return WavInfo(wf.getframerate(), wf.getnframes(), wf.getnchannels())


def read_wav(path: str | Path) -> AudioBuffer:
    with _open(path) as wf:
        width = wf.getsampwidth()
        if width != 2:
            raise UnsupportedFormat(f"{path}: {8 * width}-bit PCM, expected 16-bit")
        channels = wf.getnchannels()
        rate = wf.getframerate()
        raw = wf.readframes(wf.getnframes())
    if len(raw) % (2 * channels):
        raise CorruptHeader(f"{path}: data chunk is not a whole number of frames")
    pcm = np.frombuffer(raw, dtype="<i2").astype(np.float64)
    if channels > 1:
        pcm = pcm.reshape(-1, channels).mean(axis=1)
    return AudioBuffer(pcm / 32768.0, rate)


def to_pcm16(samples: np.ndarray) -> np.ndarray:
    scaled = np.asarray(samples, dtype=np.float64) * 32768.0
    rounded = np.sign(scaled) * np.floor(np.abs(scaled) + 0.5)
    return np.clip(rounded, -32768, 32767).astype("<i2")


def write_wav(path: str | Path, buf: AudioBuffer) -> None:
    with wave.open(str(path), "wb") as wf:
        wf.setnchannels(1)
        wf.setsampwidth(2)
        wf.setframerate(buf.sample_rate)
        wf.writeframes(to_pcm16(buf.samples).tobytes())


def rms(x: np.ndarray) -> float:
    x = np.asarray(x, dtype=np.float64)
    return float(np.sqrt(np.mean(x * x))) if len(x) else 0.0


def dbfs(value: float) -> float:
    return 20.0 * math.log10(value) if value > 0 else -math.inf


@dataclass(frozen=True)
class TrimConfig:
    threshold_db: float = -40.0
    frame_ms: float = 20.0
    hop_ms: float = 10.0
    keep_pad_ms: float = 50.0

    def __post_init__(self) -> None:
        if not self.frame_ms >= self.hop_ms > 0:
            raise ValueError("TrimConfig requires frame_ms >= hop_ms > 0")
        if self.keep_pad_ms < 0:
            raise ValueError("keep_pad_ms must be non-negative")


class TrimResult(NamedTuple):
    audio: AudioBuffer
    all_silent: bool


def _ms(ms: float, rate: int) -> int:
    return int(math.floor(ms * rate / 1000.0 + 0.5))


def frame_rms_db(x: np.ndarray, frame: int, hop: int) -> np.ndarray:
    """Per-frame RMS level in dBFS over full frames only (one frame if x is short)."""
    if len(x) <= frame:
        return np.array([dbfs(rms(x))])
    n_frames = 1 + (len(x) - frame) // hop
    frames = np.lib.stride_tricks.sliding_window_view(x, frame)[::hop][:n_frames]
    levels = np.sqrt(np.mean(frames * frames, axis=1))
    with np.errstate(divide="ignore"):
        return 20.0 * np.log10(levels)


def trim_silence(buf: AudioBuffer, cfg: TrimConfig = TrimConfig()) -> TrimResult:
    """Cut leading and trailing frames quieter than ``cfg.threshold_db``.

    The kept region runs from the centre of the first loud frame to the
    centre of the last one, widened by ``keep_pad_ms`` on each side. The
    centre offset and the pad are snapped to whole hops so that a second
    trim sees the same frame grid, which keeps the operation idempotent.
    """
    if len(buf) == 0:
        raise ValueError("trim_silence needs a non-empty buffer")
    rate = buf.sample_rate
    frame = max(1, _ms(cfg.frame_ms, rate))
    hop = max(1, _ms(cfg.hop_ms, rate))
    levels = frame_rms_db(buf.samples, frame, hop)
    loud = np.flatnonzero(levels >= cfg.threshold_db)
    if len(loud) == 0:
        return TrimResult(buf, True)
    if len(buf) <= frame:
        return TrimResult(buf, False)
    centre_hops = (frame // 2) // hop
    pad_hops = int(math.floor(_ms(cfg.keep_pad_ms, rate) / hop + 0.5))
    first, last = int(loud[0]), int(loud[-1])
    start = max(0, (first + centre_hops - pad_hops) * hop)
    end = max((last + centre_hops + pad_hops) * hop, last * hop + frame)
    end = min(len(buf), end)
    return TrimResult(AudioBuffer(buf.samples[start:end], rate), False)


class LoudnessResult(NamedTuple):
    audio: AudioBuffer
    gain: float
    peak_limited: bool


def normalize_loudness(buf: AudioBuffer, target_db: float = -20.0) -> LoudnessResult:
    level = rms(buf.samples)
    if level == 0.0:
        raise SilentInput("cannot normalize the loudness of a silent buffer")
    gain = 10.0 ** (target_db / 20.0) / level
    peak = float(np.max(np.abs(buf.samples)))
    limited = peak * gain > 1.0
    if limited:
        gain = 1.0 / peak
    return LoudnessResult(AudioBuffer(buf.samples * gain, buf.sample_rate), gain, limited)


KAISER_BETA = 8.6
ZERO_CROSSINGS = 32


def resample_phases(from_rate: int, to_rate: int) -> tuple[np.ndarray, int, int, int]:
    """Polyphase table for a Kaiser-windowed sinc lowpass.

    Returns (phases[up, taps], half, up, down). Phase ``p`` holds the taps
    for an output instant ``p/up`` of an input sample past ``base``; tap
    ``j`` multiplies input sample ``base - half + j``.
    """
    g = math.gcd(from_rate, to_rate)
    up, down = to_rate // g, from_rate // g
    cutoff = min(1.0, to_rate / from_rate)
    width = ZERO_CROSSINGS / cutoff  # filter half-width in input samples
    half = int(math.ceil(width))
    taps = 2 * half + 2
    offsets = np.arange(taps)[None, :] - half - (np.arange(up)[:, None] / up)
    inside = np.abs(offsets) <= width
    ratio = np.clip(offsets / width, -1.0, 1.0)
    window = np.i0(KAISER_BETA * np.sqrt(1.0 - ratio * ratio)) / np.i0(KAISER_BETA)
    h = cutoff * np.sinc(cutoff * offsets) * window * inside
    h /= h.sum(axis=1, keepdims=True)  # unity DC gain on every phase
    return np.ascontiguousarray(h), half, up, down


def resample(buf: AudioBuffer, to_rate: int = CORPUS_RATE) -> AudioBuffer:
    if to_rate <= 0:
        raise ValueError("to_rate must be positive")
    if to_rate == buf.sample_rate:
        return AudioBuffer(buf.samples.copy(), to_rate)
    n_out = (2 * len(buf) * to_rate + buf.sample_rate) // (2 * buf.sample_rate)
    if n_out == 0 or len(buf) == 0:
        return AudioBuffer(np.zeros(n_out), to_rate)
    phases, half, up, down = resample_phases(buf.sample_rate, to_rate)
    out = np.asarray(kernels.polyphase_resample(buf.samples, phases, half, up, down, n_out))
    if np.max(np.abs(buf.samples)) <= 1.0:
        # filter ringing may overshoot; keep a normalized signal within full scale
        out = np.clip(out, -1.0, 1.0)
    return AudioBuffer(out, to_rate)
