"""Invariants checked over generated inputs."""
import numpy as np
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from mayektts.audio import AudioBuffer, TrimConfig, normalize_loudness, resample, rms, trim_silence
from mayektts.corpus import Manifest, ManifestEntry, SplitSpec, split_corpus, split_sizes
from mayektts.g2p import default_mapping, ids_to_phonemes, phonemes_to_ids, to_phonemes
from mayektts.nncore import LstmParams, lstm_cell
from mayektts.normalize import NormRules, default_rules, normalize_text
from mayektts.script import (Category, ClassificationTable, Tone, classify_char, default_classes,
                             segment_syllables, validate_script)

CLASSES = default_classes()
RULES = default_rules()
MAPPING = default_mapping()
ONSETS = [chr(c) for c in CLASSES.codepoints(Category.ONSET)]
VOWELS = [chr(c) for c in CLASSES.codepoints(Category.VOWEL_SIGN)]
FINALS = [chr(c) for c in CLASSES.codepoints(Category.FINAL)]
LUM, APUN = "꯬", "꯭"
SETTINGS = settings(max_examples=150, deadline=None, suppress_health_check=[HealthCheck.too_slow])


@st.composite
def syllable_text(draw):
    out = draw(st.sampled_from(ONSETS))
    if draw(st.booleans()):
        out += APUN + draw(st.sampled_from(ONSETS))
    if draw(st.booleans()):
        out += draw(st.sampled_from(VOWELS))
    if draw(st.booleans()):
        out += draw(st.sampled_from(FINALS))
    if draw(st.booleans()):
        out += LUM
    return out


words = st.lists(syllable_text(), min_size=1, max_size=4).map("".join)
valid_text = st.lists(words, min_size=1, max_size=4).map(" ".join)
block_text = st.text(alphabet=st.characters(min_codepoint=0xABC0, max_codepoint=0xABFF) | st.sampled_from(
    [" ", "\t", "|", "A", ",", "‍", "।"]), max_size=30)


@SETTINGS
@given(st.integers(0, 0x10FFFF))
def test_classification_total(cp):
    assert isinstance(classify_char(cp, CLASSES).category, Category)


@SETTINGS
@given(valid_text)
def test_segmentation_partition_and_round_trip(text):
    assert validate_script(text, CLASSES).ok
    syls = segment_syllables(text, CLASSES)
    spans = [s.span for s in syls]
    assert all(a[1] <= b[0] for a, b in zip(spans, spans[1:]))
    letters = [i for i, ch in enumerate(text) if not ch.isspace()]
    assert sorted(i for s, e in spans for i in range(s, e)) == letters
    for syl in syls:
        assert segment_syllables(syl.serialize(CLASSES), CLASSES) == [syl]


@SETTINGS
@given(block_text)
def test_validation_implies_segmentation(text):
    if validate_script(text, CLASSES).ok:
        segment_syllables(text, CLASSES)


@SETTINGS
@given(block_text)
def test_normalize_idempotent(text):
    once = normalize_text(text, RULES).text
    assert normalize_text(once, RULES).text == once
    assert "  " not in once and once == once.strip()
    assert not any(0xABF0 <= ord(c) <= 0xABF9 for c in once)


@SETTINGS
@given(block_text, st.dictionaries(st.sampled_from(["ꯀ", "ꯀꯃ", "A", "ꯃ "]), st.sampled_from(["ꯅ", "x y", ""]),
                                   max_size=3))
def test_normalize_idempotent_any_rules(text, table):
    rules = NormRules(abbreviations=table, digit_lexicon=RULES.digit_lexicon)
    once = normalize_text(text, rules).text
    assert normalize_text(once, rules).text == once


@SETTINGS
@given(block_text)
def test_provenance_ordered_and_covering(text):
    out = normalize_text(text, RULES)
    spans = [p.output_span for p in out.provenance]
    assert sum(e - s for s, e in spans) == len(out.text)
    assert all(a[1] == b[0] for a, b in zip(spans, spans[1:]))
    ins = [p.input_span for p in out.provenance]
    assert all(a[0] <= b[0] for a, b in zip(ins, ins[1:]))


@SETTINGS
@given(valid_text)
def test_g2p_total_deterministic_and_ids_round_trip(text):
    seq = to_phonemes(text, MAPPING, CLASSES)
    assert seq == to_phonemes(text, MAPPING, CLASSES)
    assert set(seq.phones) <= set(MAPPING.inventory)
    assert all(a < b for a, b in zip(seq.word_boundaries, seq.word_boundaries[1:]))
    assert all(0 < b < len(seq.phones) for b in seq.word_boundaries)
    ids = phonemes_to_ids(seq, MAPPING, append_eos=False)
    assert ids_to_phonemes(ids, MAPPING) == seq.phones


@SETTINGS
@given(valid_text, st.data())
def test_tone_locality(text, data):
    syls = segment_syllables(text, CLASSES)
    level = [s for s in syls if s.tone is Tone.LEVEL]
    assume(level)
    target = data.draw(st.sampled_from(level))
    end = target.span[1]
    toned = text[:end] + LUM + text[end:]
    before = to_phonemes(text, MAPPING, CLASSES).phones
    after = to_phonemes(toned, MAPPING, CLASSES).phones
    assert len(before) == len(after)
    diff = [(a, b) for a, b in zip(before, after) if a != b]
    assert len(diff) == 1 and diff[0][1] == diff[0][0] + MAPPING.tone_suffix


@SETTINGS
@given(st.integers(3, 5000), st.integers(0, 2**32 - 1))
def test_split_partition(n, seed):
    m = Manifest([ManifestEntry(f"{i}", "w", "ꯀ", "ꯀ", "K AH", 1.0) for i in range(n)])
    parts = split_corpus(m, SplitSpec(seed=seed))
    assert tuple(len(p) for p in parts) == split_sizes(n)
    assert sorted(int(e.id) for p in parts for e in p) == list(range(n))


@SETTINGS
@given(st.integers(0, 2**32 - 1), st.integers(1, 4000), st.floats(1e-4, 0.9),
       st.sampled_from([8000, 16000, 22050]))
def test_trim_idempotent(seed, n, amp, rate):
    body = np.random.default_rng(seed).uniform(-amp, amp, n)
    x = np.concatenate([np.zeros(rate // 4), body, np.zeros(rate // 4)])
    once = trim_silence(AudioBuffer(x, rate), TrimConfig()).audio
    twice = trim_silence(once, TrimConfig()).audio
    assert np.array_equal(once.samples, twice.samples)


@SETTINGS
@given(st.lists(st.floats(-1, 1), min_size=50, max_size=500), st.floats(-40, -3))
def test_loudness_target(samples, target):
    x = np.asarray(samples)
    assume(rms(x) > 1e-6)
    out = normalize_loudness(AudioBuffer(x, 16000), target)
    assert np.max(np.abs(out.audio.samples)) <= 1.0 + 1e-12
    if not out.peak_limited:
        assert abs(rms(out.audio.samples) / 10 ** (target / 20) - 1) < 1e-6


@SETTINGS
@given(st.integers(1, 3000), st.sampled_from([8000, 16000, 22050, 44100, 48000]),
       st.sampled_from([8000, 16000, 22050, 44100]))
def test_resample_duration_and_bounds(n, a, b):
    x = np.sin(np.arange(n) * 0.37)
    out = resample(AudioBuffer(x, a), b)
    assert abs(len(out) / b - n / a) < 1 / b
    assert np.all(np.isfinite(out.samples)) and np.max(np.abs(out.samples), initial=0) <= 1.0


@SETTINGS
@given(st.integers(1, 6), st.integers(1, 6), st.lists(st.floats(-50, 50), min_size=6, max_size=6))
def test_lstm_zero_law(n, h, cvals):
    c0 = np.resize(np.asarray(cvals), h)
    hh, c = lstm_cell(np.ones(n), np.ones(h), c0, LstmParams.zeros(n, h))
    assert np.array_equal(c, 0.5 * c0) and np.array_equal(hh, 0.5 * np.tanh(0.5 * c0))


def test_custom_table_overrides_default():
    table = ClassificationTable.from_lines(["0041\tOnset\tLATIN A"])
    assert classify_char(0x41, table).category is Category.ONSET
    assert classify_char(0xABC0, table).category is Category.FOREIGN
