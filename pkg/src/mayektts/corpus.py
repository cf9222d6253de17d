"""Text-audio pairing, corpus checks, deterministic splits and summary statistics."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .audio import TrimConfig, probe_wav, read_wav, trim_silence
from .errors import (DuplicateId, MayekError, MissingTextFile, MixedSampleRates, TooFewSamples,
                     UnmappedCharacter)
from .g2p import MappingTable, to_phonemes
from .normalize import NormRules, normalize_text
from .script import ClassificationTable, Issue, ValidationReport, validate_script

FIELDS = ("id", "wav_path", "text", "normalized", "phonemes", "duration_s")


@dataclass(frozen=True)
class ManifestEntry:
    id: str
    wav_path: str  # relative to the manifest root, forward slashes
    text: str
    normalized: str
    phonemes: str
    duration_s: float

    def to_line(self) -> str:
        return "|".join([self.id, self.wav_path, self.text, self.normalized, self.phonemes,
                         f"{self.duration_s:.6f}"])

    @classmethod
    def from_line(cls, line: str) -> "ManifestEntry":
        cols = line.rstrip("\n").split("|")
        if len(cols) != len(FIELDS):
            raise MayekError(f"manifest line has {len(cols)} fields, expected {len(FIELDS)}: {line!r}")
        return cls(cols[0], cols[1], cols[2], cols[3], cols[4], float(cols[5]))


@dataclass
class Manifest:
    entries: list[ManifestEntry] = field(default_factory=list)
    root: Path = Path(".")

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def wav(self, entry: ManifestEntry) -> Path:
        return self.root / entry.wav_path

    def dumps(self) -> str:
        return "".join(e.to_line() + "\n" for e in self.entries)

    def write(self, path: str | Path) -> None:
        Path(path).write_text(self.dumps(), encoding="utf-8", newline="\n")

    @classmethod
    def read(cls, path: str | Path) -> "Manifest":
        path = Path(path)
        lines = path.read_text(encoding="utf-8").splitlines()
        return cls([ManifestEntry.from_line(ln) for ln in lines if ln.strip()], path.parent)


def _probe_entry(line_no: int, raw_line: str, wav_dir: Path, base_dir: Path, rules: NormRules,
                 mapping: MappingTable, classes: ClassificationTable) -> ManifestEntry | list[Issue]:
    utt_id, sep, raw = raw_line.partition("|")
    utt_id = utt_id.strip()
    if not sep or not utt_id:
        return [Issue(-1, None, "BadLine", f"line {line_no}: expected id|raw_text", utt_id or None)]
    issues: list[Issue] = []
    if "|" in raw:
        return [Issue(-1, None, "BadLine", "raw text may not contain '|'", utt_id)]
    norm = normalize_text(raw, rules)
    report = validate_script(norm.text, classes)
    issues += [Issue(i.offset, i.codepoint, i.kind, i.message, utt_id) for i in report.issues]
    phones = ""
    if report.ok:
        try:
            phones = " ".join(to_phonemes(norm, mapping, classes).phones)
        except UnmappedCharacter as exc:
            issues.append(Issue(-1, exc.codepoint, "UnmappedCharacter", str(exc), utt_id))
        else:
            if not phones:
                issues.append(Issue(-1, None, "EmptyPhonemes", "text produced no phonemes", utt_id))
    wav = wav_dir / f"{utt_id}.wav"
    duration = 0.0
    if not wav.is_file():
        issues.append(Issue(-1, None, "MissingWav", f"{wav} not found", utt_id))
    else:
        try:
            duration = probe_wav(wav).duration
        except MayekError as exc:
            issues.append(Issue(-1, None, type(exc).__name__, str(exc), utt_id))
        else:
            if duration <= 0:
                issues.append(Issue(-1, None, "EmptyWav", f"{wav} has no samples", utt_id))
    if issues:
        return issues
    rel = Path(wav).resolve().relative_to(base_dir.resolve()) if _is_under(wav, base_dir) else Path(wav)
    return ManifestEntry(utt_id, rel.as_posix(), raw, norm.text, phones, duration)


def _is_under(path: Path, base: Path) -> bool:
    try:
        path.resolve().relative_to(base.resolve())
        return True
    except ValueError:
        return False


def build_manifest(text_file: str | Path, wav_dir: str | Path, rules: NormRules, mapping: MappingTable,
                   classes: ClassificationTable, base_dir: str | Path | None = None,
                   jobs: int = 1) -> tuple[Manifest, ValidationReport]:
    """Pair ``id|raw_text`` lines with ``<wav_dir>/<id>.wav``.

    Entries failing any check are left out and reported. ``wav_path`` is
    stored relative to ``base_dir`` (default: the parent of ``wav_dir``),
    which becomes the manifest root.
    """
    text_file, wav_dir = Path(text_file), Path(wav_dir)
    base = Path(base_dir) if base_dir is not None else wav_dir.parent
    if not text_file.is_file():
        raise MissingTextFile(str(text_file))
    lines = [(n, ln) for n, ln in enumerate(text_file.read_text(encoding="utf-8").splitlines(), 1)
             if ln.strip()]
    seen: dict[str, int] = {}
    for n, ln in lines:
        utt_id = ln.partition("|")[0].strip()
        if utt_id in seen:
            raise DuplicateId(f"id {utt_id!r} on lines {seen[utt_id]} and {n}")
        seen[utt_id] = n

    def work(item):
        return _probe_entry(item[0], item[1], wav_dir, base, rules, mapping, classes)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(work, lines))
    else:
        results = [work(item) for item in lines]

    manifest = Manifest(root=base)
    report = ValidationReport()
    for res in results:
        if isinstance(res, ManifestEntry):
            manifest.entries.append(res)
        else:
            report.issues.extend(res)
    return manifest, report


@dataclass(frozen=True)
class SplitSpec:
    ratios: tuple[float, float, float] = (0.8, 0.1, 0.1)
    seed: int = 0

    def __post_init__(self) -> None:
        if len(self.ratios) != 3 or any(r <= 0 for r in self.ratios) or abs(sum(self.ratios) - 1.0) > 1e-9:
            raise ValueError("split ratios must be three positive numbers summing to 1")


def split_sizes(n: int, ratios=(0.8, 0.1, 0.1)) -> tuple[int, int, int]:
    """floor(r0*n), floor(r1*n), remainder."""
    # nudge guards against products like 0.7*10 = 6.999...
    n_train = math.floor(ratios[0] * n + 1e-9)
    n_val = math.floor(ratios[1] * n + 1e-9)
    return n_train, n_val, n - n_train - n_val


def split_corpus(manifest: Manifest, spec: SplitSpec = SplitSpec()) -> tuple[Manifest, Manifest, Manifest]:
    n = len(manifest)
    if n < 3:
        raise TooFewSamples(f"need at least 3 entries to split, got {n}")
    ordered = sorted(manifest.entries, key=lambda e: e.id)  # input order must not matter
    perm = np.random.default_rng(spec.seed).permutation(n)
    shuffled = [ordered[i] for i in perm]
    n_train, n_val, _ = split_sizes(n, spec.ratios)
    parts = (shuffled[:n_train], shuffled[n_train:n_train + n_val], shuffled[n_train + n_val:])
    return tuple(Manifest(list(p), manifest.root) for p in parts)  # type: ignore[return-value]


@dataclass(frozen=True)
class CorpusStats:
    n_samples: int
    avg_chars_per_sentence: float
    n_unique_chars: int
    total_duration_min: float
    sample_rate: int

    def as_pairs(self) -> list[tuple[str, str]]:
        return [
            ("n_samples", str(self.n_samples)),
            ("avg_chars_per_sentence", f"{self.avg_chars_per_sentence:.4f}"),
            ("n_unique_chars", str(self.n_unique_chars)),
            ("total_duration_min", f"{self.total_duration_min:.4f}"),
            ("sample_rate", str(self.sample_rate)),
        ]

    def format_table(self) -> str:
        labels = {
            "n_samples": "Total number of speech samples",
            "avg_chars_per_sentence": "Average characters per sentence",
            "n_unique_chars": "Number of unique characters",
            "total_duration_min": "Total duration of audio (minutes)",
            "sample_rate": "Audio sampling rate (Hz)",
        }
        width = max(len(v) for v in labels.values())
        return "".join(f"{labels[k]:<{width}}  {v}\n" for k, v in self.as_pairs())

    def format_kv(self) -> str:
        return "".join(f"{k}={v}\n" for k, v in self.as_pairs())


def _letters(text: str) -> list[str]:
    return [ch for ch in text if not ch.isspace()]


def compute_stats(manifest: Manifest) -> CorpusStats:
    """Counts over raw text; duration and rate come from the WAV headers."""
    if not manifest.entries:
        return CorpusStats(0, 0.0, 0, 0.0, 0)
    n = len(manifest)
    n_chars = sum(len(_letters(e.text)) for e in manifest)
    unique = set()
    for e in manifest:
        unique.update(_letters(e.text))
    rates = set()
    frames = {}
    for e in manifest:
        info = probe_wav(manifest.wav(e))
        rates.add(info.sample_rate)
        frames[e.id] = info
    if len(rates) != 1:
        raise MixedSampleRates(f"sample rates differ across the corpus: {sorted(rates)}")
    # sum in id order so the float total does not depend on entry order
    total = math.fsum(frames[k].duration for k in sorted(frames))
    return CorpusStats(n, n_chars / n, len(unique), total / 60.0, rates.pop())


@dataclass(frozen=True)
class CorpusLimits:
    min_s: float = 0.5
    max_s: float = 15.0


def validate_corpus(manifest: Manifest, classes: ClassificationTable, mapping: MappingTable,
                    limits: CorpusLimits = CorpusLimits(), trim: TrimConfig = TrimConfig(),
                    check_audio: bool = True) -> ValidationReport:
    report = ValidationReport()
    by_text: dict[str, str] = {}
    for e in manifest:
        if not limits.min_s <= e.duration_s <= limits.max_s:
            report.issues.append(Issue(-1, None, "Duration",
                                       f"{e.duration_s:.3f} s outside [{limits.min_s}, {limits.max_s}]", e.id))
        try:
            to_phonemes(e.normalized, mapping, classes)
        except UnmappedCharacter as exc:
            report.issues.append(Issue(-1, exc.codepoint, "UnmappedCharacter", str(exc), e.id))
        except MayekError as exc:
            report.issues.append(Issue(-1, None, "Script", str(exc), e.id))
        if e.normalized in by_text:
            report.issues.append(Issue(-1, None, "DuplicateText", f"same text as {by_text[e.normalized]}", e.id))
        else:
            by_text[e.normalized] = e.id
        if check_audio:
            path = manifest.wav(e)
            try:
                if trim_silence(read_wav(path), trim).all_silent:
                    report.issues.append(Issue(-1, None, "SilentAudio", f"{path} is below the trim threshold", e.id))
            except (MayekError, OSError) as exc:
                report.issues.append(Issue(-1, None, "Audio", str(exc), e.id))
    return report
