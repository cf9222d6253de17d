"""Meetei Mayek codepoint classification and syllable segmentation.

The classification table is data (``data/mayek_classes.tsv``); the syllable
grammar is fixed::

    Onset (KillerMark Onset)? VowelSign? Final? ToneMark?

Marks in Meetei Mayek always follow the letter they modify, so a greedy
left-to-right scan with one symbol of lookahead is enough.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping

from .errors import OrphanMark, TableFormatError


class Category(enum.Enum):
    ONSET = "Onset"
    FINAL = "Final"
    VOWEL_SIGN = "VowelSign"
    TONE_MARK = "ToneMark"
    KILLER_MARK = "KillerMark"
    DIGIT = "Digit"
    PUNCT = "Punct"
    SPACE = "Space"
    FOREIGN = "Foreign"


LETTER_CATEGORIES = frozenset(
    {Category.ONSET, Category.FINAL, Category.VOWEL_SIGN, Category.TONE_MARK, Category.KILLER_MARK}
)
# categories validate_script lets through without complaint
PASS_THROUGH = frozenset({Category.PUNCT, Category.SPACE})


@dataclass(frozen=True)
class CharClass:
    category: Category
    name: str = ""


FOREIGN = CharClass(Category.FOREIGN, "")


@dataclass(frozen=True)
class ClassificationTable:
    entries: Mapping[int, CharClass]
    version: str = ""

    def classify(self, cp: int) -> CharClass:
        return self.entries.get(cp, FOREIGN)

    def codepoints(self, category: Category) -> list[int]:
        return sorted(cp for cp, cc in self.entries.items() if cc.category is category)

    @classmethod
    def from_lines(cls, lines: Iterable[str]) -> "ClassificationTable":
        entries: dict[int, CharClass] = {}
        version = ""
        for lineno, raw in enumerate(lines, 1):
            line = raw.rstrip("\r\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            cols = line.split("\t")
            if cols[0] == "!version":
                version = cols[1].strip() if len(cols) > 1 else ""
                continue
            if len(cols) < 2:
                raise TableFormatError(f"line {lineno}: expected codepoint<TAB>category[<TAB>name]")
            try:
                cp = int(cols[0], 16)
                category = Category(cols[1].strip())
            except ValueError as exc:
                raise TableFormatError(f"line {lineno}: {exc}") from None
            if cp in entries:
                raise TableFormatError(f"line {lineno}: duplicate codepoint U+{cp:04X}")
            entries[cp] = CharClass(category, cols[2].strip() if len(cols) > 2 else "")
        return cls(entries, version)

    @classmethod
    def load(cls, path: str | Path) -> "ClassificationTable":
        with open(path, encoding="utf-8") as fh:
            return cls.from_lines(fh)


def default_classes() -> ClassificationTable:
    text = resources.files("mayektts.data").joinpath("mayek_classes.tsv").read_text("utf-8")
    return ClassificationTable.from_lines(text.splitlines())


def classify_char(cp: int, table: ClassificationTable) -> CharClass:
    return table.classify(cp)


class Tone(enum.Enum):
    LEVEL = "Level"
    FALLING = "Falling"


@dataclass(frozen=True)
class Syllable:
    onset: int
    cluster: int | None = None
    vowel: int | None = None
    final: int | None = None
    tone: Tone = Tone.LEVEL
    # codepoint offsets [start, end) into the segmented text
    span: tuple[int, int] = field(default=(0, 0), compare=False)

    def serialize(self, table: ClassificationTable) -> str:
        out = [chr(self.onset)]
        if self.cluster is not None:
            out += [chr(_single(table, Category.KILLER_MARK)), chr(self.cluster)]
        if self.vowel is not None:
            out.append(chr(self.vowel))
        if self.final is not None:
            out.append(chr(self.final))
        if self.tone is Tone.FALLING:
            out.append(chr(_single(table, Category.TONE_MARK)))
        return "".join(out)


def _single(table: ClassificationTable, category: Category) -> int:
    cps = table.codepoints(category)
    if not cps:
        raise TableFormatError(f"table has no {category.value} codepoint")
    return cps[0]


@dataclass(frozen=True)
class Issue:
    offset: int  # UTF-8 byte offset, -1 when not tied to a text position
    codepoint: int | None
    kind: str
    message: str
    item: str | None = None  # e.g. manifest entry id


@dataclass
class ValidationReport:
    issues: list[Issue] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.issues

    def extend(self, other: "ValidationReport") -> None:
        self.issues.extend(other.issues)

    def format(self) -> str:
        lines = []
        for iss in self.issues:
            where = f"{iss.item}: " if iss.item else ""
            pos = f"@{iss.offset} " if iss.offset >= 0 else ""
            lines.append(f"{where}{pos}{iss.kind}: {iss.message}")
        return "\n".join(lines)


def _parse(text: str, table: ClassificationTable) -> tuple[list[Syllable], list[tuple[int, int, str]]]:
    """Greedy parse; returns syllables and (char-index, codepoint, message) violations.

    Violations do not stop the scan: the offending codepoint is skipped so a
    single pass reports every problem.
    """
    syllables: list[Syllable] = []
    errors: list[tuple[int, int, str]] = []
    cats = [table.classify(ord(ch)).category for ch in text]
    n = len(text)
    i = 0
    while i < n:
        cat = cats[i]
        if cat is Category.ONSET:
            start = i
            onset = ord(text[i])
            cluster = vowel = final = None
            tone = Tone.LEVEL
            i += 1
            if i < n and cats[i] is Category.KILLER_MARK:
                if i + 1 < n and cats[i + 1] is Category.ONSET:
                    cluster = ord(text[i + 1])
                    i += 2
                else:
                    errors.append((i, ord(text[i]), "killer mark not followed by an onset"))
                    i += 1
            if i < n and cats[i] is Category.VOWEL_SIGN:
                vowel = ord(text[i])
                i += 1
            if i < n and cats[i] is Category.FINAL:
                final = ord(text[i])
                i += 1
            if i < n and cats[i] is Category.TONE_MARK:
                tone = Tone.FALLING
                i += 1
            syllables.append(Syllable(onset, cluster, vowel, final, tone, (start, i)))
        elif cat in (Category.VOWEL_SIGN, Category.FINAL, Category.TONE_MARK, Category.KILLER_MARK):
            errors.append((i, ord(text[i]), f"{cat.value} with no preceding onset"))
            i += 1
        elif cat is Category.DIGIT:
            errors.append((i, ord(text[i]), "digit left unexpanded"))
            i += 1
        else:
            i += 1
    return syllables, errors


def _byte_offsets(text: str) -> list[int]:
    offs = []
    pos = 0
    for ch in text:
        offs.append(pos)
        pos += len(ch.encode("utf-8"))
    offs.append(pos)
    return offs


def segment_syllables(text: str, table: ClassificationTable) -> list[Syllable]:
    syllables, errors = _parse(text, table)
    if errors:
        idx, cp, msg = errors[0]
        raise OrphanMark(_byte_offsets(text)[idx], cp, msg)
    return syllables


def validate_script(text: str, table: ClassificationTable) -> ValidationReport:
    offs = _byte_offsets(text)
    found: list[tuple[int, Issue]] = []
    for i, ch in enumerate(text):
        if table.classify(ord(ch)).category is Category.FOREIGN:
            found.append((i, Issue(offs[i], ord(ch), "Foreign", f"U+{ord(ch):04X} is outside the script table")))
    _, errors = _parse(text, table)
    for i, cp, msg in errors:
        kind = "Digit" if table.classify(cp).category is Category.DIGIT else "OrphanMark"
        found.append((i, Issue(offs[i], cp, kind, msg)))
    found.sort(key=lambda t: t[0])
    return ValidationReport([iss for _, iss in found])
