"""Rule-based Meetei Mayek to ARPAbet conversion with falling-tone marking."""
from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable

from .errors import TableFormatError, UnknownSymbol, UnmappedCharacter
from .normalize import NormalizedText
from .script import Category, ClassificationTable, Tone, segment_syllables

PAD = "<pad>"
EOS = "<eos>"
PAD_ID = 0
EOS_ID = 1


@dataclass
class MappingTable:
    onsets: dict[int, list[str]]
    vowels: dict[int, list[str]]
    finals: dict[int, list[str]]
    inherent_vowel: str = "AH"
    tone_suffix: str = "_F"
    # onset letters that already carry their vowel (no inherent vowel appended)
    vocalic: frozenset[int] = frozenset()
    inventory: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.inventory:
            self.inventory = self._derive_inventory()
        if self.inventory[:2] != [PAD, EOS]:
            raise TableFormatError("inventory must start with PAD, EOS")
        if len(set(self.inventory)) != len(self.inventory):
            raise TableFormatError("inventory symbols must be unique")
        self._index = {s: i for i, s in enumerate(self.inventory)}

    def tone_bearing(self) -> set[str]:
        """Symbols that can carry the tone suffix."""
        out = {self.inherent_vowel}
        for phones in self.vowels.values():
            if phones:
                out.add(phones[-1])
        for cp in self.vocalic:
            if self.onsets.get(cp):
                out.add(self.onsets[cp][-1])
        return out

    def _derive_inventory(self) -> list[str]:
        symbols = {self.inherent_vowel}
        for table in (self.onsets, self.vowels, self.finals):
            for phones in table.values():
                symbols.update(phones)
        symbols.update(s + self.tone_suffix for s in self.tone_bearing())
        return [PAD, EOS] + sorted(symbols)

    def symbol_id(self, symbol: str) -> int:
        try:
            return self._index[symbol]
        except KeyError:
            raise UnknownSymbol(symbol) from None

    @property
    def n_symbols(self) -> int:
        return len(self.inventory)

    @classmethod
    def from_lines(cls, lines: Iterable[str]) -> "MappingTable":
        onsets: dict[int, list[str]] = {}
        vowels: dict[int, list[str]] = {}
        finals: dict[int, list[str]] = {}
        opts = {"inherent": "AH", "tone_suffix": "_F"}
        vocalic: set[int] = set()
        by_role = {"ONSET": onsets, "VOWEL": vowels, "FINAL": finals}
        for lineno, raw in enumerate(lines, 1):
            line = raw.rstrip("\r\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            cols = [c for c in line.split("\t")]
            if cols[0].startswith("!"):
                key = cols[0][1:]
                val = cols[1].strip() if len(cols) > 1 else ""
                if key == "vocalic":
                    vocalic.update(int(h, 16) for h in val.split())
                elif key in opts:
                    opts[key] = val
                else:
                    raise TableFormatError(f"line {lineno}: unknown directive !{key}")
                continue
            if len(cols) < 3:
                raise TableFormatError(f"line {lineno}: expected codepoint<TAB>role<TAB>phonemes")
            try:
                cp = int(cols[0], 16)
            except ValueError:
                raise TableFormatError(f"line {lineno}: bad codepoint {cols[0]!r}") from None
            role = cols[1].strip()
            if role not in by_role:
                raise TableFormatError(f"line {lineno}: role must be ONSET, VOWEL or FINAL")
            phones = [] if cols[2].strip() == "-" else cols[2].split()
            by_role[role][cp] = phones
        return cls(onsets, vowels, finals, opts["inherent"], opts["tone_suffix"], frozenset(vocalic))

    @classmethod
    def load(cls, path: str | Path) -> "MappingTable":
        with open(path, encoding="utf-8") as fh:
            return cls.from_lines(fh)


def default_mapping() -> MappingTable:
    text = resources.files("mayektts.data").joinpath("mayek_arpabet.tsv").read_text("utf-8")
    return MappingTable.from_lines(text.splitlines())


@dataclass
class PhonemeSeq:
    phones: list[str]
    word_boundaries: list[int] = field(default_factory=list)

    def __str__(self) -> str:
        return " ".join(self.phones)


def _lookup(table: dict[int, list[str]], cp: int) -> list[str]:
    try:
        return table[cp]
    except KeyError:
        raise UnmappedCharacter(cp) from None


def to_phonemes(text: NormalizedText | str, table: MappingTable, classes: ClassificationTable) -> PhonemeSeq:
    """Convert normalized text to phonemes.

    Spaces and pass-through punctuation separate words; ``word_boundaries``
    holds the index of the first phone of every word after the first.
    """
    s = text.text if isinstance(text, NormalizedText) else text
    syllables = segment_syllables(s, classes)
    phones: list[str] = []
    bounds: list[int] = []
    prev_end = 0
    for syl in syllables:
        start = syl.span[0]
        gap = s[prev_end:start]
        if phones and any(classes.classify(ord(ch)).category in (Category.SPACE, Category.PUNCT) for ch in gap):
            if not bounds or bounds[-1] != len(phones):
                bounds.append(len(phones))
        prev_end = syl.span[1]

        out = list(_lookup(table.onsets, syl.onset))
        if syl.cluster is not None:
            out += _lookup(table.onsets, syl.cluster)
        if syl.vowel is not None:
            out += _lookup(table.vowels, syl.vowel)
            nucleus = len(out) - 1
        elif syl.onset in table.vocalic and syl.cluster is None:
            nucleus = len(out) - 1
        else:
            out.append(table.inherent_vowel)
            nucleus = len(out) - 1
        if syl.final is not None:
            out += _lookup(table.finals, syl.final)
        if syl.tone is Tone.FALLING:
            if nucleus < 0:
                raise UnmappedCharacter(syl.vowel if syl.vowel is not None else syl.onset)
            out[nucleus] += table.tone_suffix
        phones += out
    return PhonemeSeq(phones, bounds)


def phonemes_to_ids(seq: PhonemeSeq | list[str], table: MappingTable, append_eos: bool = True) -> list[int]:
    phones = seq.phones if isinstance(seq, PhonemeSeq) else seq
    ids = [table.symbol_id(p) for p in phones]
    if append_eos:
        ids.append(EOS_ID)
    return ids


def ids_to_phonemes(ids: Iterable[int], table: MappingTable) -> list[str]:
    out = []
    for i in ids:
        if not 0 <= i < len(table.inventory):
            raise UnknownSymbol(i)
        out.append(table.inventory[i])
    return out
