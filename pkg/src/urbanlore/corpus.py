"""Corpus ingestion, the minimum-length filter and long-document splitting."""
from __future__ import annotations

import json
import re
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .errors import DuplicateId, InvalidThreshold, ParseError
from .text_core import TokenKind, split_sentences, tokenize

__all__ = [
    "CorpusRecord",
    "DroppedRecord",
    "dump_corpus",
    "filter_min_tokens",
    "load_corpus",
    "split_long_documents",
    "word_count",
]

MIN_TOKENS = 30
MAX_WORDS = 1000


@dataclass(frozen=True)
class CorpusRecord:
    id: str
    text: str
    label: str
    source: str | None = None

    def to_json(self) -> str:
        d = asdict(self)
        if d["source"] is None:
            del d["source"]
        return json.dumps(d, ensure_ascii=False, sort_keys=True)


@dataclass(frozen=True)
class DroppedRecord:
    id: str
    word_count: int


def word_count(text: str) -> int:
    return sum(1 for t in tokenize(text) if t.kind is not TokenKind.PUNCT)


def load_corpus(path: str | Path, default_label: str | None = None) -> list[CorpusRecord]:
    """Read JSONL records ``{"id", "text", "label", "source"?}`` in file order.

    Blank lines are skipped. ``default_label`` fills in a missing label.
    """
    path = Path(path)
    records: list[CorpusRecord] = []
    seen: dict[str, int] = {}
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(lineno, f"invalid JSON: {exc.msg}", str(path)) from None
            if not isinstance(obj, dict):
                raise ParseError(lineno, "record must be a JSON object", str(path))
            rid, text = obj.get("id"), obj.get("text")
            label = obj.get("label") or default_label
            source = obj.get("source")
            if not isinstance(rid, str) or not rid:
                raise ParseError(lineno, "missing or non-string 'id'", str(path))
            if not isinstance(text, str):
                raise ParseError(lineno, "missing or non-string 'text'", str(path))
            if not isinstance(label, str) or not label:
                raise ParseError(lineno, "missing or empty 'label'", str(path))
            if source is not None and not isinstance(source, str):
                raise ParseError(lineno, "'source' must be a string", str(path))
            if rid in seen:
                raise DuplicateId(rid, lineno)
            seen[rid] = lineno
            records.append(CorpusRecord(rid, text, label, source))
    return records


def dump_corpus(records: Iterable[CorpusRecord], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="\n") as fh:
        for r in records:
            fh.write(r.to_json() + "\n")


def filter_min_tokens(records: Sequence[CorpusRecord], min_tokens: int = MIN_TOKENS
                      ) -> tuple[list[CorpusRecord], list[DroppedRecord]]:
    """Keep records with at least ``min_tokens`` words; report the rest."""
    kept, dropped = [], []
    for r in records:
        n = word_count(r.text)
        if n >= min_tokens:
            kept.append(r)
        else:
            dropped.append(DroppedRecord(r.id, n))
    return kept, dropped


_PARA = re.compile(r"\n[ \t]*\n\s*")


def _boundaries(text: str) -> tuple[list[tuple[int, int]], list[tuple[int, int]]]:
    """Candidate cut points as (cut_start, cut_end) character ranges of consumed whitespace."""
    paras = [(m.start(), m.end()) for m in _PARA.finditer(text)]
    sents = []
    spans = split_sentences(text)
    for a, b in zip(spans, spans[1:]):
        sents.append((a.char_end, b.char_start))
    return paras, sents


def _words_before(text: str, positions: list[int]) -> list[int]:
    starts = [t.char_start for t in tokenize(text) if t.kind is not TokenKind.PUNCT]
    out, k = [], 0
    for p in positions:
        while k < len(starts) and starts[k] < p:
            k += 1
        out.append(k)
    return out


def split_long_documents(records: Sequence[CorpusRecord], max_words: int = MAX_WORDS,
                         min_tokens: int = MIN_TOKENS) -> list[CorpusRecord]:
    """Split records longer than ``max_words`` into ``id#1``, ``id#2``, ...

    Cuts go at the paragraph break nearest each multiple of ``max_words``; when a
    stretch has no usable paragraph break, sentence boundaries are used. A cut is
    only taken when both sides keep at least ``min_tokens`` words, so a short
    tail stays with the part before it.
    """
    if max_words < 2 * min_tokens:
        raise InvalidThreshold("max_words", f"max_words={max_words} must be at least 2 * min_tokens={2 * min_tokens}")
    out: list[CorpusRecord] = []
    for r in records:
        total = word_count(r.text)
        if total <= max_words:
            out.append(r)
            continue
        paras, sents = _boundaries(r.text)
        pw = _words_before(r.text, [s for s, _ in paras])
        sw = _words_before(r.text, [s for s, _ in sents])
        para_cuts = [(w, s, e) for w, (s, e) in zip(pw, paras)]
        sent_cuts = [(w, s, e) for w, (s, e) in zip(sw, sents)]
        chosen = []
        last = 0
        for m in range(1, -(-total // max_words)):
            target = m * max_words
            window = (last + min_tokens, total - min_tokens)
            # a paragraph break counts when it lies within half a part of the target
            near = [c for c in para_cuts if window[0] <= c[0] <= window[1] and abs(c[0] - target) <= max_words // 2]
            pool = near or [c for c in sent_cuts if window[0] <= c[0] <= window[1]]
            if not pool:
                continue
            best = min(pool, key=lambda c: (abs(c[0] - target), c[0]))
            if best[0] <= last:
                continue
            chosen.append(best)
            last = best[0]
        if not chosen:
            out.append(r)
            continue
        pieces = []
        prev = 0
        for _, s, e in chosen:
            pieces.append(r.text[prev:s])
            prev = e
        pieces.append(r.text[prev:])
        for i, piece in enumerate(pieces, 1):
            out.append(CorpusRecord(f"{r.id}#{i}", piece, r.label, r.source))
    return out
