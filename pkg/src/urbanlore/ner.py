"""Gazetteer and cue-word named entity recognition (PER, LOC, ORG, MISC).

Recognition runs in two layers. Gazetteer entries are matched first, longest
match wins and ties go to the leftmost start. Remaining runs of capitalized
words are then tagged from cue words: a preceding title makes a person, an
organization keyword makes an organization, a location suffix or a location
preposition plus a known place token makes a location, a known given name makes
a person, and anything else is MISC. Sentence-initial words need a cue.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping

from .errors import FormatError
from .text_core import AnnotationSpan, Document, Token, TokenKind, tokenize

__all__ = [
    "ENTITY_TAGS",
    "Cues",
    "EntitySpan",
    "Gazetteer",
    "default_cues",
    "default_gazetteer",
    "iob2_tags",
    "load_gazetteer",
    "recognize_entities",
    "to_iob2",
]

ENTITY_TAGS = ("PER", "LOC", "ORG", "MISC")
MAX_ENTRY_TOKENS = 8

EntitySpan = AnnotationSpan


def _key(surface: str) -> tuple[str, ...]:
    return tuple(t.surface.lower() for t in tokenize(surface))


@dataclass(frozen=True)
class Gazetteer:
    """Case-normalized multi-token surface forms mapped to entity tags."""

    entries: Mapping[tuple[str, ...], str]
    source: str = "<memory>"

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[str, str]], source: str = "<memory>") -> "Gazetteer":
        entries: dict[tuple[str, ...], str] = {}
        for surface, tag in pairs:
            if tag not in ENTITY_TAGS:
                raise ValueError(f"unknown tag {tag!r}")
            key = _key(surface)
            if not key or len(key) > MAX_ENTRY_TOKENS:
                raise ValueError(f"entry {surface!r} must have 1..{MAX_ENTRY_TOKENS} tokens")
            entries[key] = tag
        return cls(entries, source)

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def max_len(self) -> int:
        return max(map(len, self.entries), default=0)

    @cached_property
    def _token_index(self) -> dict[str, frozenset[str]]:
        index: dict[str, set[str]] = {tag: set() for tag in ENTITY_TAGS}
        for key, tag in self.entries.items():
            index[tag].update(t for t in key if t.isalpha())
        return {tag: frozenset(v) for tag, v in index.items()}

    def tokens_for(self, tag: str) -> frozenset[str]:
        """Every lowercased alphabetic token occurring in an entry of ``tag``."""
        return self._token_index[tag]


def load_gazetteer(path: str | Path) -> Gazetteer:
    """Read a ``surface<TAB>TAG`` file; ``#`` lines and blank lines are skipped.

    Later duplicates of a surface replace earlier ones.
    """
    path = Path(path)
    entries: dict[tuple[str, ...], str] = {}
    with path.open(encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.rstrip("\r\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise FormatError(lineno, "expected exactly one TAB", str(path))
            surface, tag = parts[0].strip(), parts[1].strip()
            if tag not in ENTITY_TAGS:
                raise FormatError(lineno, f"unknown tag {tag!r}", str(path))
            key = _key(surface)
            if not key:
                raise FormatError(lineno, "empty surface form", str(path))
            if len(key) > MAX_ENTRY_TOKENS:
                raise FormatError(lineno, f"entry longer than {MAX_ENTRY_TOKENS} tokens", str(path))
            entries[key] = tag
    return Gazetteer(entries, str(path))


def _data_lines(name: str) -> list[str]:
    text = resources.files("urbanlore.data").joinpath(name).read_text(encoding="utf-8")
    return [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]


def default_gazetteer() -> Gazetteer:
    with resources.as_file(resources.files("urbanlore.data").joinpath("gazetteer.tsv")) as p:
        return load_gazetteer(p)


TITLES = frozenset(
    """mr mrs ms miss dr prof sir dame lord lady king queen prince princess president
    senator governor mayor judge reverend rev father sister brother uncle aunt captain capt
    general gen colonel col lieutenant lt sergeant sgt officer detective pastor bishop pope
    saint st""".split()
)
LOC_SUFFIXES = frozenset(
    """city county street avenue road boulevard lane drive highway river lake mountain mountains
    island islands beach park valley bay canyon falls ocean sea coast state province
    district square bridge airport""".split()
)
LOC_PREPOSITIONS = frozenset({"in", "at", "near"})
CONNECTORS = frozenset({"of", "&", "de", "del", "van", "von", "la"})
NEVER_ENTITIES = frozenset(
    """i i'm i've i'll i'd january february march april may june july august september october
    november december monday tuesday wednesday thursday friday saturday sunday""".split()
)


@dataclass(frozen=True)
class Cues:
    given_names: frozenset[str] = field(default_factory=frozenset)
    org_keywords: frozenset[str] = field(default_factory=frozenset)
    titles: frozenset[str] = TITLES
    loc_suffixes: frozenset[str] = LOC_SUFFIXES


def default_cues() -> Cues:
    return Cues(
        given_names=frozenset(w.lower() for w in _data_lines("given_names.txt")),
        org_keywords=frozenset(w.lower() for w in _data_lines("org_suffixes.txt")),
    )


_DEFAULT_CUES: Cues | None = None


def _cues(cues: Cues | None) -> Cues:
    global _DEFAULT_CUES
    if cues is not None:
        return cues
    if _DEFAULT_CUES is None:
        _DEFAULT_CUES = default_cues()
    return _DEFAULT_CUES


def _capitalized(tok: Token) -> bool:
    return (
        tok.kind is TokenKind.WORD
        and tok.surface[0].isupper()
        and tok.surface.lower() not in NEVER_ENTITIES
    )


def _sentence_initial(doc: Document) -> set[int]:
    starts = set()
    for s in doc.sentences:
        i = s.token_start
        while i < s.token_end and doc.tokens[i].kind is TokenKind.PUNCT:
            i += 1
        if i < s.token_end:
            starts.add(i)
    return starts


def _gazetteer_spans(tokens: list[Token], gaz: Gazetteer) -> list[AnnotationSpan]:
    spans = []
    lowered = [t.surface.lower() for t in tokens]
    firsts = {k[0] for k in gaz.entries}
    longest = gaz.max_len
    i, n = 0, len(tokens)
    while i < n:
        head = tokens[i].surface[0]
        if tokens[i].kind is not TokenKind.PUNCT and (head.isupper() or head.isdigit()) and lowered[i] in firsts:
            for length in range(min(longest, n - i), 0, -1):
                tag = gaz.entries.get(tuple(lowered[i : i + length]))
                if tag is not None:
                    spans.append(AnnotationSpan(i, i + length, tag))
                    i += length
                    break
            else:
                i += 1
        else:
            i += 1
    return spans


class _Heuristic:
    def __init__(self, doc: Document, gaz: Gazetteer, cues: Cues, covered: list[bool]):
        self.tokens = doc.tokens
        self.lowered = [t.surface.lower() for t in self.tokens]
        self.initial = _sentence_initial(doc)
        self.loc_tokens = gaz.tokens_for("LOC")
        self.cues = cues
        self.covered = covered

    def runs(self) -> Iterable[tuple[int, int]]:
        toks, covered = self.tokens, self.covered
        i, n = 0, len(toks)
        while i < n:
            if covered[i] or not _capitalized(toks[i]):
                i += 1
                continue
            j = i + 1
            while j < n:
                if not covered[j] and _capitalized(toks[j]) and toks[j].char_start > toks[j - 1].char_end:
                    j += 1
                elif (
                    self.lowered[j] in CONNECTORS
                    and j + 1 < n
                    and not covered[j + 1]
                    and _capitalized(toks[j + 1])
                    and toks[j].char_start > toks[j - 1].char_end
                ):
                    j += 2
                else:
                    break
            yield i, j
            i = j

    def previous_word(self, i: int) -> str | None:
        return self.lowered[i - 1] if i > 0 else None

    def cue_tag(self, start: int, end: int) -> str | None:
        low = self.lowered[start:end]
        prev = self.previous_word(start)
        titled = prev in self.cues.titles or (
            prev == "." and start > 1 and self.lowered[start - 2] in self.cues.titles
        )
        if titled:
            return "PER"
        if any(w in self.cues.org_keywords for w in low):
            return "ORG"
        if low[-1] in self.cues.loc_suffixes:
            return "LOC"
        if prev in LOC_PREPOSITIONS and any(w in self.loc_tokens for w in low):
            return "LOC"
        if low[0] in self.cues.given_names:
            return "PER"
        return None

    def classify(self, start: int, end: int) -> list[AnnotationSpan]:
        while start < end and self.lowered[start] in CONNECTORS:
            start += 1
        if all(w in self.cues.titles for w in self.lowered[start:end]):
            return []
        # a leading title belongs to the cue, not the entity: "President Lincoln"
        if self.lowered[start] in self.cues.titles and end - start > 1:
            return self.classify_tagged(start + 1, end, "PER")
        tag = self.cue_tag(start, end)
        if tag is None:
            if start in self.initial:
                return self.classify(start + 1, end) if end - start > 1 else []
            tag = "MISC"
        return self.classify_tagged(start, end, tag)

    def classify_tagged(self, start: int, end: int, tag: str) -> list[AnnotationSpan]:
        while end > start and self.lowered[end - 1] in CONNECTORS:
            end -= 1
        return [AnnotationSpan(start, end, tag)] if end > start else []


def recognize_entities(
    doc: Document | str, gaz: Gazetteer, cues: Cues | None = None
) -> list[EntitySpan]:
    """Non-overlapping entity spans in token order."""
    if isinstance(doc, str):
        doc = Document("_", doc)
    tokens = doc.tokens
    spans = _gazetteer_spans(tokens, gaz)
    covered = [False] * len(tokens)
    for s in spans:
        for k in range(s.token_start, s.token_end):
            covered[k] = True
    heuristic = _Heuristic(doc, gaz, _cues(cues), covered)
    for start, end in heuristic.runs():
        spans.extend(heuristic.classify(start, end))
    spans.sort()
    return spans


def iob2_tags(n_tokens: int, spans: Iterable[AnnotationSpan]) -> list[str]:
    tags = ["O"] * n_tokens
    for s in spans:
        tags[s.token_start] = f"B-{s.tag}"
        for k in range(s.token_start + 1, s.token_end):
            tags[k] = f"I-{s.tag}"
    return tags


def to_iob2(doc: Document, spans: Iterable[AnnotationSpan]) -> str:
    """``token<TAB>tag`` lines with a blank line between sentences."""
    tags = iob2_tags(len(doc.tokens), spans)
    blocks = []
    for s in doc.sentences:
        blocks.append(
            "\n".join(f"{doc.tokens[k].surface}\t{tags[k]}" for k in range(s.token_start, s.token_end))
        )
    return "\n\n".join(blocks) + ("\n" if blocks else "")
