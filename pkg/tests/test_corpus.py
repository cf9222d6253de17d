import shutil

import numpy as np
import pytest

from mayektts.audio import AudioBuffer, write_wav
from mayektts.corpus import (CorpusLimits, Manifest, ManifestEntry, SplitSpec, build_manifest, compute_stats,
                             split_corpus, split_sizes, validate_corpus)
from mayektts.errors import DuplicateId, MissingTextFile, MixedSampleRates, TooFewSamples


@pytest.fixture
def corpus_copy(tmp_path, fixture_dir):
    dst = tmp_path / "corpus"
    shutil.copytree(fixture_dir, dst)
    return dst


def _build(root, rules, mapping, classes, jobs=1):
    return build_manifest(root / "list.txt", root / "wavs", rules, mapping, classes, base_dir=root, jobs=jobs)


def test_fixture_manifest_golden(corpus_copy, rules, mapping, classes):
    manifest, report = _build(corpus_copy, rules, mapping, classes)
    assert report.ok
    out = corpus_copy / "built.psv"
    manifest.write(out)
    assert out.read_bytes() == (corpus_copy / "manifest.psv").read_bytes()


def test_build_is_idempotent_and_job_independent(corpus_copy, rules, mapping, classes):
    a, _ = _build(corpus_copy, rules, mapping, classes, jobs=1)
    b, _ = _build(corpus_copy, rules, mapping, classes, jobs=4)
    c, _ = _build(corpus_copy, rules, mapping, classes, jobs=1)
    assert a.dumps() == b.dumps() == c.dumps()


def test_missing_wav_is_reported(tmp_path, rules, mapping, classes):
    (tmp_path / "wavs").mkdir()
    for name in ("a", "b"):
        write_wav(tmp_path / "wavs" / f"{name}.wav", AudioBuffer(0.1 * np.ones(22050), 22050))
    (tmp_path / "list.txt").write_text("a|ꯀ\nb|ꯃ\nc|ꯅ\n", encoding="utf-8")
    manifest, report = _build(tmp_path, rules, mapping, classes)
    assert [e.id for e in manifest] == ["a", "b"]
    assert [(i.item, i.kind) for i in report.issues] == [("c", "MissingWav")]


def test_bad_text_is_excluded(tmp_path, rules, mapping, classes):
    (tmp_path / "wavs").mkdir()
    for name in ("a", "b", "c"):
        write_wav(tmp_path / "wavs" / f"{name}.wav", AudioBuffer(0.1 * np.ones(100), 22050))
    (tmp_path / "list.txt").write_text("a|ꯀ\nb|ꯨ\nc|hello\nno separator\n", encoding="utf-8")
    manifest, report = _build(tmp_path, rules, mapping, classes)
    assert [e.id for e in manifest] == ["a"]
    assert {(i.item, i.kind) for i in report.issues} >= {("b", "OrphanMark"), ("c", "Foreign")}
    assert "BadLine" in {i.kind for i in report.issues}


def test_empty_text_file(tmp_path, rules, mapping, classes):
    (tmp_path / "list.txt").write_text("", encoding="utf-8")
    manifest, report = build_manifest(tmp_path / "list.txt", tmp_path, rules, mapping, classes)
    assert len(manifest) == 0 and report.ok


def test_build_errors(tmp_path, rules, mapping, classes):
    with pytest.raises(MissingTextFile):
        build_manifest(tmp_path / "nope.txt", tmp_path, rules, mapping, classes)
    (tmp_path / "list.txt").write_text("a|ꯀ\na|ꯃ\n", encoding="utf-8")
    with pytest.raises(DuplicateId):
        build_manifest(tmp_path / "list.txt", tmp_path, rules, mapping, classes)


def test_manifest_line_round_trip():
    e = ManifestEntry("x1", "wavs/x1.wav", "ꯀ ꯃ", "ꯀ ꯃ", "K AH M AH", 1.25)
    assert ManifestEntry.from_line(e.to_line()) == e
    assert e.to_line().endswith("|1.250000")


@pytest.mark.parametrize("n, sizes", [(818, (654, 81, 83)), (10, (8, 1, 1)), (3, (2, 0, 1)), (7, (5, 0, 2))])
def test_split_sizes(n, sizes):
    assert split_sizes(n) == sizes


def _synthetic(n):
    return Manifest([ManifestEntry(f"u{i:04d}", f"wavs/u{i:04d}.wav", "ꯀ", "ꯀ", "K AH", 1.0) for i in range(n)])


def test_split_partition_and_determinism():
    m = _synthetic(818)
    parts = split_corpus(m, SplitSpec(seed=3))
    assert tuple(len(p) for p in parts) == (654, 81, 83)
    ids = [e.id for p in parts for e in p]
    assert sorted(ids) == sorted(e.id for e in m) and len(set(ids)) == 818
    again = split_corpus(Manifest(list(reversed(m.entries))), SplitSpec(seed=3))
    assert [[e.id for e in p] for p in parts] == [[e.id for e in p] for p in again]
    other = split_corpus(m, SplitSpec(seed=4))
    assert [e.id for e in other[0]] != [e.id for e in parts[0]]


def test_split_errors():
    with pytest.raises(TooFewSamples):
        split_corpus(_synthetic(2))
    with pytest.raises(ValueError):
        SplitSpec((0.5, 0.5, 0.1))


def test_fixture_stats_golden(fixture_dir):
    stats = compute_stats(Manifest.read(fixture_dir / "manifest.psv"))
    assert stats.format_kv() == (fixture_dir / "stats.kv").read_text(encoding="utf-8")
    assert "Average characters per sentence" in stats.format_table()


def test_stats_permutation_invariant(fixture_dir):
    m = Manifest.read(fixture_dir / "manifest.psv")
    shuffled = Manifest(m.entries[::-1], m.root)
    assert compute_stats(m) == compute_stats(shuffled)


def test_stats_empty_and_tiny(tmp_path):
    assert compute_stats(Manifest()).n_samples == 0
    write_wav(tmp_path / "a.wav", AudioBuffer(np.zeros(100), 8000))
    m = Manifest([ManifestEntry("a", "a.wav", "ab", "ab", "x", 0.0125)], tmp_path)
    s = compute_stats(m)
    assert (s.avg_chars_per_sentence, s.n_unique_chars, s.sample_rate) == (2.0, 2, 8000)


def test_stats_mixed_rates(tmp_path):
    write_wav(tmp_path / "a.wav", AudioBuffer(np.zeros(100), 8000))
    write_wav(tmp_path / "b.wav", AudioBuffer(np.zeros(100), 16000))
    m = Manifest([ManifestEntry(i, f"{i}.wav", "ꯀ", "ꯀ", "K AH", 0.01) for i in "ab"], tmp_path)
    with pytest.raises(MixedSampleRates):
        compute_stats(m)


def test_validate_clean_fixture(fixture_dir, classes, mapping):
    assert validate_corpus(Manifest.read(fixture_dir / "manifest.psv"), classes, mapping).ok


def test_validate_flags(tmp_path, classes, mapping):
    write_wav(tmp_path / "a.wav", AudioBuffer(0.2 * np.ones(8000), 8000))
    write_wav(tmp_path / "s.wav", AudioBuffer(np.zeros(8000), 8000))
    entries = [
        ManifestEntry("long", "a.wav", "ꯀ", "ꯀ", "K AH", 20.0),
        ManifestEntry("d1", "a.wav", "ꯃ", "ꯃ", "M AH", 1.0),
        ManifestEntry("d2", "a.wav", "ꯃ", "ꯃ", "M AH", 1.0),
        ManifestEntry("quiet", "s.wav", "ꯅ", "ꯅ", "N AH", 1.0),
    ]
    report = validate_corpus(Manifest(entries, tmp_path), classes, mapping, CorpusLimits())
    assert {(i.item, i.kind) for i in report.issues} == {
        ("long", "Duration"), ("d2", "DuplicateText"), ("quiet", "SilentAudio")}
