"""Text normalization: punctuation, spelling variants, abbreviations, digits, spaces.

Each pass applies the stages in a fixed order. ``normalize_text`` repeats
passes until the text stops changing, which makes the result a fixed point
of one pass and therefore idempotent.

Provenance is tracked per output character. Each character remembers the
input span it came from and the rule that produced it, so the composed
mapping survives any number of passes.
"""
from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable

from .errors import MayekError, MissingLexeme, TableFormatError

DIGIT_ZERO = 0xABF0
MAX_PASSES = 8

COPY = "copy"


def is_digit(ch: str) -> bool:
    return DIGIT_ZERO <= ord(ch) <= DIGIT_ZERO + 9


@dataclass
class NormRules:
    abbreviations: dict[str, str] = field(default_factory=dict)
    digit_lexicon: dict[int, str] = field(default_factory=dict)
    punct_map: dict[int, str] = field(default_factory=dict)
    spelling_variants: dict[str, str] = field(default_factory=dict)

    @classmethod
    def from_lines(cls, lines: Iterable[str]) -> "NormRules":
        rules = cls()
        section = None
        for lineno, raw in enumerate(lines, 1):
            line = raw.rstrip("\r\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            if line.startswith("[") and line.rstrip().endswith("]"):
                section = line.strip()[1:-1]
                if section not in ("abbrev", "digits", "punct", "variants"):
                    raise TableFormatError(f"line {lineno}: unknown section [{section}]")
                continue
            key, sep, value = line.partition("\t")
            if not sep:
                raise TableFormatError(f"line {lineno}: expected key<TAB>value")
            value = _unescape(value)
            if section == "abbrev":
                rules.abbreviations[unicodedata.normalize("NFC", key)] = value
            elif section == "variants":
                rules.spelling_variants[unicodedata.normalize("NFC", key)] = value
            elif section == "digits":
                if key not in "0123456789" or len(key) != 1:
                    raise TableFormatError(f"line {lineno}: digit key must be 0-9, got {key!r}")
                rules.digit_lexicon[int(key)] = value
            elif section == "punct":
                try:
                    rules.punct_map[int(key, 16)] = value
                except ValueError:
                    raise TableFormatError(f"line {lineno}: punct key must be a hex codepoint") from None
            else:
                raise TableFormatError(f"line {lineno}: entry outside any section")
        return rules

    @classmethod
    def load(cls, path: str | Path) -> "NormRules":
        with open(path, encoding="utf-8") as fh:
            return cls.from_lines(fh)


def _unescape(value: str) -> str:
    if value == "<space>":
        return " "
    if value == "<empty>":
        return ""
    return unicodedata.normalize("NFC", value)


def default_rules() -> NormRules:
    text = resources.files("mayektts.data").joinpath("norm_rules.tsv").read_text("utf-8")
    return NormRules.from_lines(text.splitlines())


@dataclass(frozen=True)
class Provenance:
    input_span: tuple[int, int]
    output_span: tuple[int, int]
    rule: str


@dataclass
class NormalizedText:
    text: str
    provenance: list[Provenance] = field(default_factory=list)


def expand_digits(run: str, lexicon: dict[int, str], mode: str = "DigitByDigit") -> str:
    """Spell a run of Meetei Mayek digits one digit at a time."""
    if mode != "DigitByDigit":
        raise ValueError(f"unsupported number mode {mode!r}")
    words = []
    for ch in run:
        if not is_digit(ch):
            raise ValueError(f"U+{ord(ch):04X} is not a Meetei Mayek digit")
        d = ord(ch) - DIGIT_ZERO
        if d not in lexicon:
            raise MissingLexeme(f"no lexicon entry for digit {d}")
        words.append(lexicon[d])
    return " ".join(words)


# one output character: (char, src_start, src_end, rule)
_Cell = tuple[str, int, int, str]


def _apply(cells: list[_Cell], edits: list[tuple[int, int, str, str]]) -> list[_Cell]:
    """Replace cell ranges [start, end) with new text; edits are sorted and disjoint."""
    if not edits:
        return cells
    out: list[_Cell] = []
    pos = 0
    for start, end, repl, rule in edits:
        out.extend(cells[pos:start])
        if start < end:
            src = (cells[start][1], cells[end - 1][2])
        elif start < len(cells):
            src = (cells[start][1], cells[start][1])
        else:
            src = (cells[-1][2], cells[-1][2]) if cells else (0, 0)
        out.extend((ch, src[0], src[1], rule) for ch in repl)
        pos = end
    out.extend(cells[pos:])
    return out


def _alternation(keys: Iterable[str]) -> str | None:
    keys = sorted((k for k in keys if k), key=lambda k: (-len(k), k))
    if not keys:
        return None
    return "|".join(re.escape(k) for k in keys)


def _is_boundary(ch: str) -> bool:
    return ch.isspace() or unicodedata.category(ch).startswith("P")


class _Pass:
    def __init__(self, rules: NormRules):
        self.rules = rules
        self.punct = {chr(cp): v for cp, v in rules.punct_map.items()}
        alt = _alternation(rules.spelling_variants)
        self.variant_re = re.compile(alt) if alt else None
        self.abbrev_keys = sorted((k for k in rules.abbreviations if k), key=lambda k: (-len(k), k))

    def run(self, cells: list[_Cell]) -> list[_Cell]:
        text = "".join(c[0] for c in cells)
        nfc = unicodedata.normalize("NFC", text)
        if nfc != text:
            cells = _apply(cells, [(0, len(cells), nfc, "nfc")])

        text = "".join(c[0] for c in cells)
        cells = _apply(cells, [(i, i + 1, self.punct[ch], "punct") for i, ch in enumerate(text) if ch in self.punct])

        if self.variant_re is not None:
            text = "".join(c[0] for c in cells)
            edits = [(m.start(), m.end(), self.rules.spelling_variants[m.group()], "variant")
                     for m in self.variant_re.finditer(text)]
            cells = _apply(cells, edits)

        if self.abbrev_keys:
            text = "".join(c[0] for c in cells)
            edits = []
            pos = 0
            while pos < len(text):
                hit = None
                if pos == 0 or _is_boundary(text[pos - 1]):
                    for key in self.abbrev_keys:
                        end = pos + len(key)
                        if text.startswith(key, pos) and (end == len(text) or _is_boundary(text[end])):
                            hit = key
                            break
                if hit is None:
                    pos += 1
                else:
                    edits.append((pos, pos + len(hit), self.rules.abbreviations[hit], "abbrev"))
                    pos += len(hit)
            cells = _apply(cells, edits)

        text = "".join(c[0] for c in cells)
        edits = []
        for m in re.finditer("[\uABF0-\uABF9]+", text):
            try:
                words = expand_digits(m.group(), self.rules.digit_lexicon)
            except MissingLexeme:
                continue  # left for validate_script to report
            edits.append((m.start(), m.end(), f" {words} ", "digits"))
        cells = _apply(cells, edits)

        text = "".join(c[0] for c in cells)
        edits = []
        for m in re.finditer(r"\s+", text):
            at_edge = m.start() == 0 or m.end() == len(text)
            repl = "" if at_edge else " "
            if m.group() != repl:
                edits.append((m.start(), m.end(), repl, "space"))
        return _apply(cells, edits)


def _provenance(cells: list[_Cell]) -> list[Provenance]:
    groups: list[list] = []
    for pos, (_, s, e, rule) in enumerate(cells):
        if groups:
            g = groups[-1]
            same_rewrite = rule != COPY and g[2] == rule and g[0] == (s, e)
            contiguous_copy = rule == COPY and g[2] == COPY and g[0][1] == s
            if same_rewrite or contiguous_copy:
                g[0] = (g[0][0], e)
                g[1] = (g[1][0], pos + 1)
                continue
        groups.append([(s, e), (pos, pos + 1), rule])
    return [Provenance(g[0], g[1], g[2]) for g in groups]


def normalize_text(raw: str, rules: NormRules) -> NormalizedText:
    """Canonicalize ``raw``.

    Input spans in the provenance index into ``raw`` (codepoint offsets).
    Raises MayekError only if the rules keep rewriting their own output.
    """
    cells: list[_Cell] = [(ch, i, i + 1, COPY) for i, ch in enumerate(raw)]
    one_pass = _Pass(rules)
    for _ in range(MAX_PASSES):
        before = "".join(c[0] for c in cells)
        cells = one_pass.run(cells)
        after = "".join(c[0] for c in cells)
        if after == before:
            return NormalizedText(after, _provenance(cells))
    raise MayekError("normalization rules do not converge; a rule output re-triggers a rule")
