"""Exception hierarchy shared by every stage of the toolchain."""


class MayekError(Exception):
    """Base class for all errors raised by mayektts."""


class TableFormatError(MayekError, ValueError):
    """A bundled or user-supplied TSV/config table could not be parsed."""


# script / normalize / g2p


class OrphanMark(MayekError, ValueError):
    def __init__(self, offset: int, codepoint: int, message: str = ""):
        self.offset = offset
        self.codepoint = codepoint
        super().__init__(message or f"orphan mark U+{codepoint:04X} at offset {offset}")


class MissingLexeme(MayekError, KeyError):
    pass


class UnmappedCharacter(MayekError, KeyError):
    def __init__(self, codepoint: int):
        self.codepoint = codepoint
        super().__init__(f"no mapping for U+{codepoint:04X}")


class UnknownSymbol(MayekError, KeyError):
    pass


# audio / features


class UnsupportedFormat(MayekError, ValueError):
    pass


class CorruptHeader(MayekError, ValueError):
    pass


class SilentInput(MayekError, ValueError):
    pass


class EmptySignal(MayekError, ValueError):
    pass


# nncore


class ShapeMismatch(MayekError, ValueError):
    pass


class IndexOutOfRange(MayekError, IndexError):
    pass


class InvalidP(MayekError, ValueError):
    pass


class BadMagic(MayekError, ValueError):
    pass


class TruncatedFile(MayekError, ValueError):
    pass


# corpus


class MissingTextFile(MayekError, FileNotFoundError):
    pass


class DuplicateId(MayekError, ValueError):
    pass


class TooFewSamples(MayekError, ValueError):
    pass


class MixedSampleRates(MayekError, ValueError):
    pass
