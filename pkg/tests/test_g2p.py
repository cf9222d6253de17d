import pytest

from mayektts.errors import TableFormatError, UnknownSymbol, UnmappedCharacter
from mayektts.g2p import (EOS, EOS_ID, PAD, MappingTable, PhonemeSeq, ids_to_phonemes, phonemes_to_ids,
                          to_phonemes)
from mayektts.normalize import normalize_text

X, V, LUM = "ꯀ", "ꯨ", "꯬"
TOY = MappingTable.from_lines(["!inherent\tAH", "!tone_suffix\t_F", "ABC0\tONSET\tK", "ABE8\tVOWEL\tUW"])


def test_inherent_vowel(classes):
    assert to_phonemes(X, TOY, classes).phones == ["K", "AH"]


def test_vowel_sign_overrides(classes):
    assert to_phonemes(X + V, TOY, classes).phones == ["K", "UW"]


def test_tone_suffix(classes):
    assert to_phonemes(X + V + LUM, TOY, classes).phones == ["K", "UW_F"]


def test_unmapped_is_hard_error(classes):
    with pytest.raises(UnmappedCharacter) as exc:
        to_phonemes("ꯃ", TOY, classes)
    assert exc.value.codepoint == 0xABC3


def test_toy_inventory_layout():
    assert TOY.inventory == [PAD, EOS, "AH", "AH_F", "K", "UW", "UW_F"]


def test_ids_examples():
    assert phonemes_to_ids(PhonemeSeq([]), TOY, append_eos=True) == [EOS_ID]
    assert phonemes_to_ids([TOY.inventory[5]], TOY, append_eos=False) == [5]
    with pytest.raises(UnknownSymbol):
        phonemes_to_ids(["ZZ"], TOY)
    with pytest.raises(UnknownSymbol):
        ids_to_phonemes([99], TOY)


def test_inventory_covers_every_emission(mapping):
    inv = set(mapping.inventory)
    for table in (mapping.onsets, mapping.vowels, mapping.finals):
        for phones in table.values():
            assert set(phones) <= inv
    for sym in mapping.tone_bearing():
        assert sym + mapping.tone_suffix in inv
    assert mapping.inventory[:2] == [PAD, EOS]
    assert len(set(mapping.inventory)) == mapping.n_symbols


def test_default_inventory_is_sorted_and_frozen(mapping):
    assert mapping.inventory[2:] == sorted(mapping.inventory[2:])
    # counted from the shipped table: 17 consonants, 8 vowels, 8 falling-tone variants, PAD, EOS
    assert mapping.n_symbols == 35


def test_vocalic_letters(mapping, classes):
    assert to_phonemes("ꯎ", mapping, classes).phones == ["UW"]
    assert to_phonemes("ꯏ꯬", mapping, classes).phones == ["IY_F"]


def test_word_boundaries(mapping, classes):
    seq = to_phonemes("ꯀꯨ ꯃ꯫ꯅ", mapping, classes)
    assert seq.phones == ["K", "UW", "M", "AH", "N", "AH"]
    assert seq.word_boundaries == [2, 4]


def test_fixture_golden(fixture_dir, fixture_lines, rules, mapping, classes):
    golden = (fixture_dir / "g2p.golden").read_text(encoding="utf-8").splitlines()
    got = [str(to_phonemes(normalize_text(raw, rules), mapping, classes)) for _, raw in fixture_lines]
    assert got == golden


def test_fixture_round_trip_ids(fixture_lines, rules, mapping, classes):
    for _, raw in fixture_lines:
        seq = to_phonemes(normalize_text(raw, rules), mapping, classes)
        ids = phonemes_to_ids(seq, mapping, append_eos=True)
        assert ids[-1] == EOS_ID and max(ids) < mapping.n_symbols
        assert ids_to_phonemes(ids[:-1], mapping) == seq.phones
        assert phonemes_to_ids(ids_to_phonemes(ids, mapping), mapping, append_eos=False) == ids


def test_bad_mapping_rows():
    with pytest.raises(TableFormatError):
        MappingTable.from_lines(["ABC0\tCODA\tK"])
    with pytest.raises(TableFormatError):
        MappingTable.from_lines(["!colour\tblue"])
