"""Exception hierarchy.

Every error raised on purpose by the library derives from :class:`UrbanloreError`.
The CLI maps :class:`ConfigError` to exit status 1, :class:`DataError` to 2 and
:class:`InvariantError` to 3.
"""
from __future__ import annotations


class UrbanloreError(Exception):
    """Base class for library errors."""


class ConfigError(UrbanloreError):
    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class DataError(UrbanloreError):
    """Bad input data: malformed files, degenerate documents or samples."""


class InvariantError(UrbanloreError):
    """An internal or data-level invariant does not hold."""


class FormatError(DataError):
    def __init__(self, line: int, message: str, path: str | None = None):
        self.line = line
        self.path = path
        where = f"{path}:{line}" if path else f"line {line}"
        super().__init__(f"{where}: {message}")


class ParseError(FormatError):
    pass


class DuplicateId(DataError):
    def __init__(self, doc_id: str, line: int | None = None):
        self.doc_id = doc_id
        self.line = line
        suffix = f" (line {line})" if line is not None else ""
        super().__init__(f"duplicate document id {doc_id!r}{suffix}")


class EmptyDocument(DataError):
    pass


class DegenerateProfile(DataError):
    pass


class UnknownLemma(KeyError):
    """Lemma missing from a polarity lexicon. Callers usually treat it as neutral."""


class InsufficientCorpus(DataError):
    pass


class EmotionWithoutSeeds(DataError):
    def __init__(self, label: str):
        self.label = label
        super().__init__(f"emotion {label!r} has no in-vocabulary seed words")


class OutOfVocabularyDocument(DataError):
    pass


class InsufficientRows(DataError):
    pass


class SingleClassDataset(DataError):
    pass


class TooFewInstances(DataError):
    def __init__(self, label: str, count: int, k: int):
        self.label = label
        self.count = count
        self.k = k
        super().__init__(f"class {label!r} has {count} instances, fewer than k={k}")


class NonFiniteFeature(DataError):
    pass


class SchemaMismatch(DataError):
    pass


class EmptyMatrix(DataError):
    pass


class EmptyGroup(DataError):
    pass


class DegenerateSample(DataError):
    pass


class ZeroVariance(DataError):
    pass


class LengthMismatch(DataError):
    pass


class InvalidSpec(ConfigError):
    def __init__(self, message: str, field: str = "spec"):
        super().__init__(field, message)


class InvalidThreshold(ConfigError):
    def __init__(self, message: str, field: str = "max_words"):
        super().__init__(field, message)
