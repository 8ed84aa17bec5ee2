"""Tokenization, sentence splitting, syllable counting and count profiles.

Everything here is a pure function of its input text. The rules are simple and
locale-free on purpose: downstream features only need stable counts.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property

from .errors import EmptyDocument

__all__ = [
    "ABBREVIATIONS",
    "AnnotationSpan",
    "Document",
    "Sentence",
    "TextProfile",
    "Token",
    "TokenKind",
    "count_syllables",
    "split_sentences",
    "text_profile",
    "tokenize",
]


class TokenKind(str, Enum):
    WORD = "word"
    NUMBER = "number"
    PUNCT = "punct"


@dataclass(frozen=True)
class Token:
    surface: str
    char_start: int
    char_end: int
    kind: TokenKind

    @property
    def is_word(self) -> bool:
        """True for tokens that count toward the word total (words and numbers)."""
        return self.kind is not TokenKind.PUNCT


@dataclass(frozen=True)
class Sentence:
    token_start: int
    token_end: int
    char_start: int
    char_end: int


@dataclass(frozen=True, order=True)
class AnnotationSpan:
    """A tagged token range ``[token_start, token_end)``; used for entities and timexes."""

    token_start: int
    token_end: int
    tag: str

    def __post_init__(self):
        if self.token_start >= self.token_end:
            raise ValueError(f"empty span [{self.token_start}, {self.token_end})")

    def __len__(self) -> int:
        return self.token_end - self.token_start


@dataclass(frozen=True)
class Document:
    """A labeled text. Token and sentence analyses are computed once and cached."""

    id: str
    text: str
    label: str = ""
    source: str | None = field(default=None, compare=False)

    def __post_init__(self):
        if not self.text.strip():
            raise EmptyDocument(f"document {self.id!r} has no text")

    @cached_property
    def tokens(self) -> list[Token]:
        return tokenize(self.text)

    @cached_property
    def sentences(self) -> list[Sentence]:
        return _sentences_from_tokens(self.text, self.tokens)

    @cached_property
    def profile(self) -> "TextProfile":
        return text_profile(self)


@dataclass(frozen=True)
class TextProfile:
    words: int
    sentences: int
    syllables: int
    complex_words: int


_CHUNK = re.compile(r"\S+")
_NUMBER = re.compile(r"\d+(?:[.,:]\d+)*")


def tokenize(text: str) -> list[Token]:
    """Split ``text`` into word, number and punctuation tokens.

    Whitespace separates chunks. Non-alphanumeric characters at either end of a
    chunk become single-character punctuation tokens; whatever remains in the
    middle (internal hyphens, apostrophes and dots included) is one token.

    >>> [t.surface for t in tokenize("Dear Friends:")]
    ['Dear', 'Friends', ':']
    """
    tokens: list[Token] = []
    for m in _CHUNK.finditer(text):
        chunk, base = m.group(), m.start()
        lo, hi = 0, len(chunk)
        while lo < hi and not chunk[lo].isalnum():
            lo += 1
        while hi > lo and not chunk[hi - 1].isalnum():
            hi -= 1
        for i in range(lo):
            tokens.append(Token(chunk[i], base + i, base + i + 1, TokenKind.PUNCT))
        if lo < hi:
            core = chunk[lo:hi]
            kind = TokenKind.NUMBER if _NUMBER.fullmatch(core) else TokenKind.WORD
            tokens.append(Token(core, base + lo, base + hi, kind))
        for i in range(max(hi, lo), len(chunk)):
            tokens.append(Token(chunk[i], base + i, base + i + 1, TokenKind.PUNCT))
    return tokens


# Lowercased, with the trailing period. A period after any of these never ends a sentence.
ABBREVIATIONS = frozenset(
    """
    mr. mrs. ms. dr. st. jr. sr. prof. rev. gen. col. capt. lt. sgt. gov. sen. rep.
    mt. ft. ave. blvd. rd. co. corp. inc. ltd. dept. univ. no. vol. vs. etc. e.g. i.e.
    u.s. u.k. u.n. a.m. p.m. jan. feb. mar. apr. jun. jul. aug. sep. sept. oct. nov. dec.
    """.split()
)

_TERMINAL = frozenset(".!?")
_CLOSERS = frozenset("\"')]}’”»")
_OPENERS = frozenset("\"'([{‘“«")


def _is_abbreviation(prev: Token, stop: Token) -> bool:
    if stop.surface != "." or prev.char_end != stop.char_start or prev.kind is TokenKind.PUNCT:
        return False
    if len(prev.surface) == 1 and prev.surface.isalpha():  # initials: "J. Smith"
        return True
    return prev.surface.lower() + "." in ABBREVIATIONS


def _starts_sentence(text: str, tokens: list[Token], j: int) -> bool:
    # tokens[j] is the first token after a candidate boundary
    if tokens[j].char_start == tokens[j - 1].char_end:
        return False
    while j < len(tokens) and tokens[j].surface in _OPENERS:
        j += 1
    if j == len(tokens):
        return True
    first = tokens[j].surface[0]
    return first.isupper() or first.isdigit()


def _sentences_from_tokens(text: str, tokens: list[Token]) -> list[Sentence]:
    if not tokens:
        return []
    bounds: list[int] = []  # exclusive token index of each sentence end
    i, n = 0, len(tokens)
    while i < n:
        tok = tokens[i]
        if tok.surface in _TERMINAL and not (i > 0 and _is_abbreviation(tokens[i - 1], tok)):
            end = i + 1
            while (
                end < n
                and (tokens[end].surface in _TERMINAL or tokens[end].surface in _CLOSERS)
                and tokens[end].char_start == tokens[end - 1].char_end
            ):
                end += 1
            if end == n or _starts_sentence(text, tokens, end):
                bounds.append(end)
            i = end
        else:
            i += 1
    if not bounds or bounds[-1] != n:
        bounds.append(n)
    sentences = []
    start = 0
    for end in bounds:
        sentences.append(Sentence(start, end, tokens[start].char_start, tokens[end - 1].char_end))
        start = end
    return sentences


def split_sentences(text: str) -> list[Sentence]:
    """Sentence spans over ``text``; text without terminal punctuation is one sentence."""
    return _sentences_from_tokens(text, tokenize(text))


_VOWELS = "aeiouy"
_VOWEL_GROUP = re.compile(r"[aeiouy]+")
_NON_ALPHA = re.compile(r"[^a-z]")


def count_syllables(word: str) -> int:
    """Heuristic syllable count: vowel groups minus silent endings, never below 1."""
    w = _NON_ALPHA.sub("", word.lower())
    n = len(_VOWEL_GROUP.findall(w))
    if n > 1 and len(w) > 2 and w[-2] not in _VOWELS:
        if w.endswith("e"):
            if not (w.endswith("le") and w[-3] not in _VOWELS):
                n -= 1
    elif n > 1 and len(w) > 3 and w[-3] not in _VOWELS:
        if w.endswith("ed") and w[-3] not in "td":
            n -= 1
        elif w.endswith("es") and w[-3] not in "sxzcg" and not w.endswith(("ches", "shes")):
            if not (w.endswith("les") and len(w) > 4 and w[-4] not in _VOWELS):
                n -= 1
    return max(n, 1)


def text_profile(doc: Document | str) -> TextProfile:
    """Count words, sentences, syllables and complex words of a document.

    Numbers count as words with one syllable; only word tokens can be complex.
    """
    if isinstance(doc, Document):
        text, tokens, sentences = doc.text, doc.tokens, doc.sentences
    else:
        text = doc
        tokens = tokenize(text)
        sentences = _sentences_from_tokens(text, tokens)
    words = syllables = complex_words = 0
    for tok in tokens:
        if tok.kind is TokenKind.WORD:
            s = count_syllables(tok.surface)
            words += 1
            syllables += s
            complex_words += s >= 3
        elif tok.kind is TokenKind.NUMBER:
            words += 1
            syllables += 1
    if words == 0:
        raise EmptyDocument("document has no word tokens")
    return TextProfile(words, len(sentences), syllables, complex_words)
