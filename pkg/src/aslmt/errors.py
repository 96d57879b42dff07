"""Exception types shared across the package."""


class AslmtError(Exception):
    """Base class for every error this package raises deliberately."""


class UsageError(AslmtError):
    """Bad command-line usage (exit code 1)."""


class MalformedGlossError(AslmtError):
    """ASL gloss text that cannot be tokenized."""


class CorpusFormatError(AslmtError):
    """A corpus file that does not follow the one-pair-per-line format."""


class SplitTooSmallError(AslmtError):
    """Corpus too small to produce a train/dev/test split."""


class EmptyCorpusError(AslmtError):
    """An operation that needs at least one sentence pair got none."""


class NgramFormatError(AslmtError):
    """An n-gram count file that does not follow the record format."""


class TableFormatError(AslmtError):
    """A serialized translation table that cannot be parsed."""


class EnumerationSizeError(AslmtError):
    """Brute-force alignment enumeration refused: space too large."""


class NoTranslationError(AslmtError):
    """Decoder finished with an empty final queue."""
