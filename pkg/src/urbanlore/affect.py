"""Prior-polarity sentiment and LSA emotion load.

Sentiment uses a sense-level lexicon. A word's prior polarity is the mean of its
sense scores weighted by the harmonic series 1, 1/2, 1/3, ... so frequent senses
dominate. Emotion load compares a document vector with six emotion centroids in a
latent semantic space learned from a corpus by truncated SVD.
"""
from __future__ import annotations

import hashlib
import json
import math
from collections import defaultdict
from dataclasses import dataclass
from functools import cached_property
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import (
    EmotionWithoutSeeds,
    EmptyDocument,
    FormatError,
    InsufficientCorpus,
    InvariantError,
    OutOfVocabularyDocument,
    UnknownLemma,
)
from .text_core import Document, TokenKind, tokenize

__all__ = [
    "EMOTIONS",
    "NEGATIVE_EMOTIONS",
    "POSITIVE_EMOTIONS",
    "EmotionLoad",
    "EmotionSpace",
    "PolarityLexicon",
    "SenseEntry",
    "SentimentScores",
    "build_emotion_space",
    "default_lexicon",
    "default_seeds",
    "document_sentiment",
    "emotion_load",
    "load_emotion_seeds",
    "load_emotion_space",
    "load_polarity_lexicon",
    "prior_polarity",
    "save_emotion_space",
    "term_document_matrix",
    "truncated_svd",
]

EMOTIONS = ("anger", "disgust", "fear", "joy", "sadness", "surprise")
POSITIVE_EMOTIONS = ("joy", "surprise")
NEGATIVE_EMOTIONS = ("anger", "disgust", "fear", "sadness")


@dataclass(frozen=True)
class SenseEntry:
    lemma: str
    sense_rank: int
    pos_score: float
    neg_score: float


class PolarityLexicon:
    """Sense lists per lowercased lemma, ordered by sense rank."""

    def __init__(self, entries: Mapping[str, Sequence[SenseEntry]]):
        self.entries = {k.lower(): tuple(sorted(v, key=lambda e: e.sense_rank)) for k, v in entries.items()}

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, lemma: str) -> bool:
        return lemma.lower() in self.entries

    @cached_property
    def priors(self) -> dict[str, tuple[float, float]]:
        return {lemma: _harmonic_mean(senses) for lemma, senses in self.entries.items()}


def _harmonic_mean(senses: Sequence[SenseEntry]) -> tuple[float, float]:
    weights = [1.0 / e.sense_rank for e in senses]
    total = math.fsum(weights)
    pos = math.fsum(w * e.pos_score for w, e in zip(weights, senses)) / total
    neg = math.fsum(w * e.neg_score for w, e in zip(weights, senses)) / total
    return pos, neg


def load_polarity_lexicon(path: str | Path) -> PolarityLexicon:
    """Read ``lemma<TAB>sense_rank<TAB>pos_score<TAB>neg_score`` rows.

    Raises FormatError for unparsable rows or a repeated (lemma, rank) pair, and
    InvariantError when pos + neg exceeds 1 or a lemma's ranks are not 1..n.
    """
    path = Path(path)
    senses: dict[str, dict[int, SenseEntry]] = defaultdict(dict)
    first_line: dict[str, int] = {}
    with path.open(encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.rstrip("\r\n")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 4:
                raise FormatError(lineno, "expected 4 TAB-separated fields", str(path))
            lemma = parts[0].strip().lower()
            try:
                rank = int(parts[1])
                pos, neg = float(parts[2]), float(parts[3])
            except ValueError:
                raise FormatError(lineno, "bad numeric field", str(path)) from None
            if not lemma or rank < 1 or not (0.0 <= pos <= 1.0 and 0.0 <= neg <= 1.0):
                raise FormatError(lineno, "lemma empty, rank < 1 or score outside [0, 1]", str(path))
            if pos + neg > 1.0 + 1e-12:
                raise InvariantError(f"{path}:{lineno}: pos + neg = {pos + neg} > 1")
            if rank in senses[lemma]:
                raise FormatError(lineno, f"duplicate sense {lemma!r}#{rank}", str(path))
            senses[lemma][rank] = SenseEntry(lemma, rank, pos, neg)
            first_line.setdefault(lemma, lineno)
    for lemma, by_rank in senses.items():
        if sorted(by_rank) != list(range(1, len(by_rank) + 1)):
            raise InvariantError(
                f"{path}:{first_line[lemma]}: sense ranks of {lemma!r} are {sorted(by_rank)}, not 1..n"
            )
    return PolarityLexicon({k: list(v.values()) for k, v in senses.items()})


def default_lexicon() -> PolarityLexicon:
    with resources.as_file(resources.files("urbanlore.data").joinpath("polarity_lexicon.tsv")) as p:
        return load_polarity_lexicon(p)


def prior_polarity(lemma: str, lexicon: PolarityLexicon) -> tuple[float, float]:
    """Harmonically weighted (POS, NEG) prior polarity of ``lemma``.

    >>> lex = PolarityLexicon({"x": [SenseEntry("x", 1, 0.5, 0.0), SenseEntry("x", 2, 0.25, 0.0)]})
    >>> round(prior_polarity("x", lex)[0], 6)
    0.416667
    """
    try:
        return lexicon.priors[lemma.lower()]
    except KeyError:
        raise UnknownLemma(lemma) from None


@dataclass(frozen=True)
class SentimentScores:
    pos: float
    neg: float
    all: float


def _lookup_forms(surface: str) -> tuple[str, ...]:
    low = surface.lower()
    for suffix in ("'s", "’s"):
        if low.endswith(suffix):
            return low, low[: -len(suffix)]
    return (low,)


def document_sentiment(doc: Document | str, lexicon: PolarityLexicon) -> SentimentScores:
    """Summed prior polarity as a percentage of the document's words.

    Unknown words add nothing but still count in the denominator.
    """
    tokens = doc.tokens if isinstance(doc, Document) else tokenize(doc)
    priors = lexicon.priors
    words = 0
    pos_parts, neg_parts = [], []
    for tok in tokens:
        if tok.kind is TokenKind.PUNCT:
            continue
        words += 1
        if tok.kind is TokenKind.WORD:
            for form in _lookup_forms(tok.surface):
                hit = priors.get(form)
                if hit is not None:
                    pos_parts.append(hit[0])
                    neg_parts.append(hit[1])
                    break
    if words == 0:
        raise EmptyDocument("document has no word tokens")
    pos = 100.0 * math.fsum(pos_parts) / words
    neg = 100.0 * math.fsum(neg_parts) / words
    return SentimentScores(pos, neg, pos + neg)


# ---------------------------------------------------------------------------
# Emotion space


def _content_words(text: str) -> list[str]:
    return [t.surface.lower() for t in tokenize(text) if t.kind is TokenKind.WORD]


def term_document_matrix(
    texts: Iterable[str], min_df: int = 1
) -> tuple[list[str], sp.csr_matrix]:
    """Sorted vocabulary and the log(1 + tf) weighted word-by-document matrix."""
    doc_counts: list[dict[str, int]] = []
    df: dict[str, int] = defaultdict(int)
    for text in texts:
        counts: dict[str, int] = defaultdict(int)
        for w in _content_words(text):
            counts[w] += 1
        for w in counts:
            df[w] += 1
        doc_counts.append(counts)
    vocab = sorted(w for w, n in df.items() if n >= min_df)
    index = {w: i for i, w in enumerate(vocab)}
    rows, cols, vals = [], [], []
    for j, counts in enumerate(doc_counts):
        for w, c in counts.items():
            i = index.get(w)
            if i is not None:
                rows.append(i)
                cols.append(j)
                vals.append(math.log1p(c))
    matrix = sp.csr_matrix(
        (np.asarray(vals, dtype=np.float64), (rows, cols)), shape=(len(vocab), len(doc_counts))
    )
    return vocab, matrix


def _orthonormal(a: np.ndarray) -> np.ndarray:
    q, _ = np.linalg.qr(a)
    return q


def truncated_svd(matrix, d: int, seed: int = 0, oversample: int = 10, n_iter: int = 7):
    """Top-``d`` singular triplets by randomized subspace iteration.

    The sketch is re-orthonormalized after every multiplication. Each singular
    vector pair is sign-fixed so the largest-magnitude entry of the left vector
    is positive, which makes the output comparable across SVD routines.

    Returns ``(u, s, vt)`` with shapes (m, d), (d,), (d, n).
    """
    m, n = matrix.shape
    if not 1 <= d <= min(m, n):
        raise ValueError(f"d={d} must lie in [1, {min(m, n)}]")
    width = min(d + oversample, min(m, n))
    rng = np.random.default_rng(seed)
    q = _orthonormal(matrix @ rng.standard_normal((n, width)))
    for _ in range(n_iter):
        z = _orthonormal(matrix.T @ q)
        q = _orthonormal(matrix @ z)
    b = np.asarray((matrix.T @ q).T)
    ub, s, vt = np.linalg.svd(b, full_matrices=False)
    u = q @ ub
    u, s, vt = u[:, :d], s[:d], vt[:d]
    return _fix_signs(u, s, vt)


def _fix_signs(u: np.ndarray, s: np.ndarray, vt: np.ndarray):
    pivots = np.abs(u).argmax(axis=0)
    signs = np.sign(u[pivots, np.arange(u.shape[1])])
    signs[signs == 0] = 1.0
    return u * signs, s, vt * signs[:, None]


@dataclass(frozen=True, eq=False)
class EmotionSpace:
    """Word vectors plus one unit-norm centroid per emotion label."""

    vocabulary: tuple[str, ...]
    vectors: np.ndarray  # (vocab, dims)
    centroids: np.ndarray  # (6, dims), rows ordered as EMOTIONS

    @property
    def dims(self) -> int:
        return self.vectors.shape[1]

    @cached_property
    def index(self) -> dict[str, int]:
        return {w: i for i, w in enumerate(self.vocabulary)}

    def vector(self, word: str) -> np.ndarray | None:
        i = self.index.get(word.lower())
        return None if i is None else self.vectors[i]


def load_emotion_seeds(path: str | Path) -> dict[str, list[str]]:
    path = Path(path)
    seeds: dict[str, list[str]] = {label: [] for label in EMOTIONS}
    with path.open(encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2 or not parts[1].strip():
                raise FormatError(lineno, "expected label<TAB>word", str(path))
            label = parts[0].strip().lower()
            if label not in seeds:
                raise FormatError(lineno, f"unknown emotion {label!r}", str(path))
            seeds[label].append(parts[1].strip().lower())
    return seeds


def default_seeds() -> dict[str, list[str]]:
    with resources.as_file(resources.files("urbanlore.data").joinpath("emotion_seeds.tsv")) as p:
        return load_emotion_seeds(p)


def build_emotion_space(
    texts: Sequence[str],
    dims: int = 100,
    seeds: Mapping[str, Sequence[str]] | None = None,
    seed: int = 0,
    min_documents: int = 100,
    min_df: int = 1,
) -> EmotionSpace:
    """Learn word vectors from ``texts`` and place the six emotion centroids.

    Word vectors are rows of the top-``dims`` left singular vectors of the
    log-weighted word-by-document matrix. A centroid is the mean of its
    in-vocabulary seed-word vectors, scaled to unit norm.
    """
    if len(texts) < min_documents:
        raise InsufficientCorpus(f"need at least {min_documents} documents, got {len(texts)}")
    seeds = default_seeds() if seeds is None else seeds
    vocab, matrix = term_document_matrix(texts, min_df=min_df)
    if dims > min(matrix.shape):
        raise InsufficientCorpus(
            f"dims={dims} exceeds min(vocabulary={matrix.shape[0]}, documents={matrix.shape[1]})"
        )
    u, _, _ = truncated_svd(matrix, dims, seed=seed)
    index = {w: i for i, w in enumerate(vocab)}
    centroids = np.empty((len(EMOTIONS), dims))
    for k, label in enumerate(EMOTIONS):
        rows = sorted({index[w.lower()] for w in seeds.get(label, ()) if w.lower() in index})
        if not rows:
            raise EmotionWithoutSeeds(label)
        c = u[rows].mean(axis=0)
        norm = np.linalg.norm(c)
        if norm == 0.0:
            raise EmotionWithoutSeeds(label)
        centroids[k] = c / norm
    return EmotionSpace(tuple(vocab), u, centroids)


@dataclass(frozen=True)
class EmotionLoad:
    similarities: dict[str, float]
    pos: float
    neg: float
    all: float

    @classmethod
    def neutral(cls) -> "EmotionLoad":
        return cls({label: 0.5 for label in EMOTIONS}, 0.5, 0.5, 0.5)


def emotion_load(doc: Document | str, space: EmotionSpace) -> EmotionLoad:
    """Per-emotion similarity in [0, 1] as (1 + cos) / 2, plus grouped means.

    Raises OutOfVocabularyDocument when no word of the document has a vector.
    """
    tokens = doc.tokens if isinstance(doc, Document) else tokenize(doc)
    index = space.index
    rows = [index[w] for w in (t.surface.lower() for t in tokens if t.kind is TokenKind.WORD) if w in index]
    if not rows:
        raise OutOfVocabularyDocument("no in-vocabulary words")
    v = space.vectors[rows].mean(axis=0)
    norm = np.linalg.norm(v)
    if norm == 0.0:
        raise OutOfVocabularyDocument("document vector is zero")
    cos = space.centroids @ (v / norm)
    sims = {label: float((1.0 + min(1.0, max(-1.0, c))) / 2.0) for label, c in zip(EMOTIONS, cos)}
    return EmotionLoad(
        sims,
        pos=math.fsum(sims[e] for e in POSITIVE_EMOTIONS) / len(POSITIVE_EMOTIONS),
        neg=math.fsum(sims[e] for e in NEGATIVE_EMOTIONS) / len(NEGATIVE_EMOTIONS),
        all=math.fsum(sims.values()) / len(EMOTIONS),
    )


_MAGIC = "urbanlore-emotion-space"
_VERSION = 1


def save_emotion_space(space: EmotionSpace, path: str | Path) -> None:
    """One JSON header line, then (vocab + 6) x dims little-endian float32 rows."""
    payload = np.vstack([space.vectors, space.centroids]).astype("<f4").tobytes()
    header = {
        "format": _MAGIC,
        "version": _VERSION,
        "dims": space.dims,
        "vocab_size": len(space.vocabulary),
        "emotions": list(EMOTIONS),
        "checksum": "sha256:" + hashlib.sha256(payload).hexdigest(),
        "vocabulary": list(space.vocabulary),
    }
    with Path(path).open("wb") as fh:
        fh.write(json.dumps(header, ensure_ascii=False).encode("utf-8") + b"\n")
        fh.write(payload)


def load_emotion_space(path: str | Path) -> EmotionSpace:
    path = Path(path)
    raw = path.read_bytes()
    cut = raw.find(b"\n")
    try:
        header = json.loads(raw[:cut].decode("utf-8"))
    except (ValueError, UnicodeDecodeError):
        raise FormatError(1, "unreadable emotion-space header", str(path)) from None
    if header.get("format") != _MAGIC or header.get("version") != _VERSION:
        raise FormatError(1, "not a version-1 emotion space file", str(path))
    payload = raw[cut + 1 :]
    if "sha256:" + hashlib.sha256(payload).hexdigest() != header["checksum"]:
        raise FormatError(1, "checksum mismatch", str(path))
    dims, vocab = header["dims"], header["vocabulary"]
    if header["emotions"] != list(EMOTIONS) or len(vocab) != header["vocab_size"]:
        raise FormatError(1, "header fields are inconsistent", str(path))
    if len(payload) != (len(vocab) + len(EMOTIONS)) * dims * 4:
        raise FormatError(1, "payload size does not match header", str(path))
    matrix = np.frombuffer(payload, dtype="<f4").reshape(len(vocab) + len(EMOTIONS), dims).astype(np.float64)
    return EmotionSpace(tuple(vocab), matrix[: len(vocab)], matrix[len(vocab) :])
