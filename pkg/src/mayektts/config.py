"""Plain-text ``key = value`` configuration shared by every CLI subcommand."""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .audio import CORPUS_RATE, TrimConfig
from .corpus import CorpusLimits
from .errors import TableFormatError
from .features import MelConfig, StftConfig
from .g2p import MappingTable
from .nncore.model import ModelDims
from .normalize import NormRules
from .script import ClassificationTable


def _data(name: str) -> Path:
    return Path(str(resources.files("mayektts.data").joinpath(name)))


@dataclass
class Config:
    classes: Path = field(default_factory=lambda: _data("mayek_classes.tsv"))
    rules: Path = field(default_factory=lambda: _data("norm_rules.tsv"))
    mapping: Path = field(default_factory=lambda: _data("mayek_arpabet.tsv"))

    trim_threshold_db: float = -40.0
    trim_frame_ms: float = 20.0
    trim_hop_ms: float = 10.0
    trim_keep_pad_ms: float = 50.0
    loudness_target_db: float = -20.0
    sample_rate: int = CORPUS_RATE

    n_fft: int = 1024
    hop: int = 256
    win_length: int = 1024
    n_mels: int = 80
    fmin: float = 0.0
    fmax: float = 8000.0

    embed_dim: int = 64
    encoder_dim: int = 128
    prenet_dim: int = 64
    decoder_dim: int = 256
    attention_dim: int = 64
    location_filters: int = 8
    location_kernel: int = 15
    postnet_channels: int = 128

    max_frames: int = 200
    stop_threshold: float = 0.5
    griffin_lim_iters: int = 60

    min_duration_s: float = 0.5
    max_duration_s: float = 15.0
    split_train: float = 0.8
    split_val: float = 0.1
    split_test: float = 0.1

    seed_model: int = 0
    seed_forward: int = 0
    seed_griffin_lim: int = 0
    seed_split: int = 0

    @classmethod
    def load(cls, path: str | Path) -> "Config":
        """Parse ``key = value`` lines. Dotted keys map to underscores
        (``trim.threshold_db`` -> ``trim_threshold_db``); table paths are
        resolved against the config file's directory."""
        path = Path(path)
        types = {f.name: f.type for f in dataclasses.fields(cls)}
        values: dict[str, object] = {}
        for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise TableFormatError(f"{path}:{lineno}: expected key = value")
            key = key.strip().replace(".", "_").replace("-", "_")
            value = value.strip()
            if key not in types:
                raise TableFormatError(f"{path}:{lineno}: unknown key {key!r}")
            kind = types[key]
            try:
                if kind == "Path":
                    p = Path(value)
                    values[key] = p if p.is_absolute() else path.parent / p
                elif kind == "int":
                    values[key] = int(value)
                else:
                    values[key] = float(value)
            except ValueError:
                raise TableFormatError(f"{path}:{lineno}: bad value {value!r} for {key}") from None
        cfg = cls(**values)
        for name in ("classes", "rules", "mapping"):
            if not getattr(cfg, name).is_file():
                raise TableFormatError(f"{name} table not found: {getattr(cfg, name)}")
        return cfg

    def load_classes(self) -> ClassificationTable:
        return ClassificationTable.load(self.classes)

    def load_rules(self) -> NormRules:
        return NormRules.load(self.rules)

    def load_mapping(self) -> MappingTable:
        return MappingTable.load(self.mapping)

    @property
    def trim(self) -> TrimConfig:
        return TrimConfig(self.trim_threshold_db, self.trim_frame_ms, self.trim_hop_ms, self.trim_keep_pad_ms)

    @property
    def stft(self) -> StftConfig:
        return StftConfig(self.n_fft, self.hop, self.win_length)

    @property
    def mel(self) -> MelConfig:
        return MelConfig(self.n_mels, self.fmin, self.fmax, self.sample_rate)

    @property
    def limits(self) -> CorpusLimits:
        return CorpusLimits(self.min_duration_s, self.max_duration_s)

    def model_dims(self, n_symbols: int) -> ModelDims:
        return ModelDims(n_symbols, self.embed_dim, self.encoder_dim, self.prenet_dim, self.decoder_dim,
                         self.attention_dim, self.location_filters, self.location_kernel,
                         self.postnet_channels, self.n_mels)
