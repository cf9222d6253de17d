import pytest

from mayektts.errors import MissingLexeme, TableFormatError
from mayektts.normalize import NormRules, expand_digits, normalize_text
from mayektts.script import Category, validate_script

EMPTY = NormRules()
LEX = {1: "ama", 0: "phun", 9: "mapan"}


def test_whitespace_only():
    assert normalize_text("  A  B ", EMPTY).text == "A B"


def test_abbreviation_forced():
    rules = NormRules(abbreviations={"Dr.": "doctor"})
    assert normalize_text("Dr.", rules).text == "doctor"


def test_abbreviation_is_token_bounded():
    rules = NormRules(abbreviations={"ab": "X"})
    assert normalize_text("ab cab ab, abc", rules).text == "X cab X, abc"


def test_abbreviation_prefers_longest_then_falls_back():
    rules = NormRules(abbreviations={"a": "1", "a b": "2"})
    assert normalize_text("a b a", rules).text == "2 1"
    assert normalize_text("a c", rules).text == "1 c"


def test_digit_run_digit_by_digit():
    rules = NormRules(digit_lexicon=LEX)
    assert normalize_text("꯱꯰", rules).text == "ama phun"


def test_digits_get_separated_from_letters():
    rules = NormRules(digit_lexicon=LEX)
    assert normalize_text("x꯹y", rules).text == "x mapan y"


def test_missing_lexeme_leaves_digit():
    out = normalize_text("꯲", NormRules(digit_lexicon=LEX)).text
    assert out == "꯲"


@pytest.mark.parametrize("run, expected", [("", ""), ("꯱", "ama"), ("꯹꯹", "mapan mapan")])
def test_expand_digits(run, expected):
    assert expand_digits(run, LEX) == expected


def test_expand_digits_missing():
    with pytest.raises(MissingLexeme):
        expand_digits("꯵", LEX)


def test_default_punct_and_joiners(rules):
    assert normalize_text("ꯀ|ꯃ‍", rules).text == "ꯀ꯫ꯃ"


def test_nfc_applied():
    assert normalize_text("é", EMPTY).text == "é"


def test_variants_longest_match():
    rules = NormRules(spelling_variants={"ab": "X", "abc": "Y"})
    assert normalize_text("abcab", rules).text == "YX"


def test_nonconverging_rules_raise():
    from mayektts.errors import MayekError
    rules = NormRules(spelling_variants={"a": "aa"})
    with pytest.raises(MayekError):
        normalize_text("a", rules)


def test_provenance_maps_back_to_raw():
    rules = NormRules(digit_lexicon=LEX)
    raw = "  ꯀ ꯱꯰"
    out = normalize_text(raw, rules)
    assert out.text == "ꯀ ama phun"
    outs = [p.output_span for p in out.provenance]
    assert outs[0][0] == 0 and outs[-1][1] == len(out.text)
    assert all(a[1] == b[0] for a, b in zip(outs, outs[1:]))
    by_rule = {p.rule: p for p in out.provenance}
    assert raw[slice(*by_rule["digits"].input_span)] == "꯱꯰"
    copy = out.provenance[0]
    assert raw[slice(*copy.input_span)] == out.text[slice(*copy.output_span)] == "ꯀ"


def test_default_rules_output_validates(rules, classes):
    for d in range(10):
        text = normalize_text(chr(0xABF0 + d), rules).text
        assert validate_script(text, classes).ok, text


def test_default_rules_values_are_valid(rules, classes):
    for value in list(rules.digit_lexicon.values()) + list(rules.punct_map.values()):
        report = validate_script(value, classes)
        assert all(i.kind == "Foreign" and chr(i.codepoint) in "'\"-" for i in report.issues)


def test_rules_file_errors():
    with pytest.raises(TableFormatError):
        NormRules.from_lines(["[nope]"])
    with pytest.raises(TableFormatError):
        NormRules.from_lines(["[digits]", "x\ty"])
    with pytest.raises(TableFormatError):
        NormRules.from_lines(["k\tv"])


def test_escapes():
    rules = NormRules.from_lines(["[punct]", "005F\t<space>", "007E\t<empty>"])
    assert normalize_text("a_b~c", rules).text == "a bc"


def test_fixture_output_has_no_digits(rules, classes, fixture_lines):
    for _, raw in fixture_lines:
        text = normalize_text(raw, rules).text
        assert not any(classes.classify(ord(c)).category is Category.DIGIT for c in text)
        assert "  " not in text and text == text.strip()
