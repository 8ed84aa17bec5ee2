"""Seeded synthetic labeled corpora with controlled feature densities.

Documents are built from lowercase filler words. Entity and temporal units are
placed at scheduled positions, never at the start of a sentence and never next
to each other, so each one is recognized as exactly one span. Span counts are
rounded with error diffusion across a label's documents so label means track
the targets closely.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping

import numpy as np

from ..affect import default_lexicon, default_seeds
from ..corpus import CorpusRecord
from ..errors import InvalidSpec
from ..ner import NEVER_ENTITIES, _data_lines, default_cues, default_gazetteer
from ..text_core import count_syllables

__all__ = ["LabelSpec", "SynthSpec", "generate_synthetic_corpus", "three_genre_spec"]

ENTITY_KEYS = ("PER", "LOC", "ORG", "MISC")
TIMEX_KEYS = ("DATE", "DURATION", "TIME")

_ONE_SYLLABLE = """
the and of to was he she they it that his her on with as for but had at by from not we
there when then so out up what who which would could went came saw said told took made
back down just like home house car door bed wall room shop bag box phone note sign
word name way side top end hand head face eyes voice walk talk looked asked heard found
left kept brought sent put got gave knew thought felt seemed tried turned moved stood
sat ran drove called ate drank slept woke paid read wrote set sold bought built
than if or their them him its our your this these those such each both most
own same few more much still where while though through""".split()

_TWO_SYLLABLE = """
over after into other people water story woman children window paper little something
nothing began became around about along away again open never even table letter garden
kitchen office market message pocket corner dinner center neighbor student teacher
driver travel sister brother husband mother father daughter figure matter number
answer question village country money picture minute moment simply really nearly
almost always often something someone anyone rather later better under behind between
before during within without upon toward parents building parking basement bathroom
coffee dollar engine jacket ticket carpet bottle button cousin doctor""".split()

_COMPLEX = """
family another everyone anything everything different apartment restaurant understand
remember together however already computer telephone energy information government
community education camera animal property article elevator interview document library
medicine passenger musical popular political national actually especially immediately
discovery customer visitor neighborhood situation example character condition certainly
probably generally incident investigate evidence authority officially emergency
surveillance employee manager television photograph telephoned department""".split()

_SURNAMES = """
Mayfield Hollis Benson Whitaker Dalton Pruitt Garner Holloway Fenwick Brandt Calloway
Mercer Ashby Thornton Kessler Langley Pembrook Ridley Sutton Harlow Beckett Corwin
Draper Ellery Gaskell Hobart Kendrick Lowell Marsden Norwood""".split()

_MISC_NAMES = """
Zorvane Quillith Brexmor Talvenox Ormidra Vexholt Kelvaro Drusk Ombrel Sarnith Yelvane
Prodmir Glastor Feyvren Nuxhall Trevanic Halmora Izvek Corbane Ulmeris""".split()

_MONTHS = """January February March April June July August September October November December""".split()
_WEEKDAYS = """Monday Tuesday Wednesday Thursday Friday Saturday Sunday""".split()
_COUNT_WORDS = """two three four five six seven ten twelve several many""".split()
_UNITS = """seconds minutes hours days nights weeks months years decades""".split()

# words the generator must never use as filler because a recognizer reacts to them
_TIMEX_WORDS = set("""
a an one two three four five six seven eight nine ten eleven twelve several many few some
hundred hundreds thousand thousands second seconds minute minutes hour hours day days night
nights week weeks weekend weekends fortnight month months year years decade decades century
centuries ago earlier later overnight half all whole entire morning afternoon evening
noon midnight tonight yesterday today tomorrow last next past coming previous following
o'clock am pm couple may""".split())


def _blocked() -> set[str]:
    cues = default_cues()
    gaz = default_gazetteer()
    seeds = default_seeds()
    blocked = set(_TIMEX_WORDS) | set(NEVER_ENTITIES)
    blocked |= cues.given_names | cues.org_keywords | cues.titles | cues.loc_suffixes
    blocked |= {t for tag in ("PER", "LOC", "ORG", "MISC") for t in gaz.tokens_for(tag)}
    blocked |= set(default_lexicon().priors)
    blocked |= {w for words in seeds.values() for w in words}
    return blocked


@lru_cache(maxsize=1)
def _pools() -> dict:
    blocked = _blocked()
    cues = default_cues()
    gaz = default_gazetteer()
    seeds = default_seeds()
    priors = default_lexicon().priors
    seed_words = {w for words in seeds.values() for w in words}

    def clean(words, syll):
        return sorted({w for w in words if w not in blocked and syll(count_syllables(w))})

    gaz_tokens = {t for tag in ("PER", "LOC", "ORG", "MISC") for t in gaz.tokens_for(tag)}

    surfaces = [line.split("\t") for line in _data_lines("gazetteer.tsv")]

    def entries(tag):
        # single-token entries only carry their tag when no longer entry wins
        return sorted(surf for surf, t in surfaces
                      if t == tag and all(w[:1].isupper() and w.isalpha() for w in surf.split()))

    pools = {
        "one": clean(_ONE_SYLLABLE, lambda s: s == 1),
        "two": clean(_TWO_SYLLABLE, lambda s: s == 2),
        "complex": clean(_COMPLEX, lambda s: s >= 3),
        "given": sorted(n.capitalize() for n in cues.given_names
                        if n.isalpha() and n not in gaz_tokens and n not in NEVER_ENTITIES and n not in _TIMEX_WORDS),
        "surname": [s for s in _SURNAMES if s.lower() not in blocked],
        "misc": [s for s in _MISC_NAMES if s.lower() not in blocked],
        "LOC": entries("LOC"),
        "ORG": entries("ORG"),
        "pos": sorted(w for w, (p, n) in priors.items() if p > n and w not in seed_words and w.isalpha()),
        "neg": sorted(w for w, (p, n) in priors.items() if n > p and w not in seed_words and w.isalpha()),
        "emo_pos": sorted({w for e in ("joy", "surprise") for w in seeds.get(e, ()) if w.isalpha()}),
        "emo_neg": sorted({w for e in ("anger", "disgust", "fear", "sadness") for w in seeds.get(e, ()) if w.isalpha()}),
    }
    pools["prior"] = {w: priors[w] for w in pools["pos"] + pools["neg"]}
    pools["complex_syll"] = float(np.mean([count_syllables(w) for w in pools["complex"]]))
    for key in ("one", "two", "complex", "given", "surname", "misc", "LOC", "ORG", "pos", "neg"):
        if not pools[key]:
            raise InvalidSpec("resources", f"generator word pool {key!r} is empty")
    return pools


@dataclass(frozen=True)
class LabelSpec:
    """Per-label generation targets.

    Entity and temporal densities are spans per word. ``pos_sent`` and
    ``neg_sent`` are targets on the sentiment scale (summed prior polarity per
    100 words). ``dispersion`` scales the per-document jitter of every target.
    """

    label: str
    count: int
    words: tuple[int, int] = (250, 400)
    entities: Mapping[str, float] = field(default_factory=dict)
    timex: Mapping[str, float] = field(default_factory=dict)
    pos_sent: float = 0.0
    neg_sent: float = 0.0
    emotion_density: float = 0.0
    positive_emotion_share: float = 0.5
    words_per_sentence: float = 18.0
    complex_ratio: float = 0.1
    syllables_per_word: float = 1.45
    dispersion: float = 0.2

    def validate(self) -> None:
        where = f"labels.{self.label}"
        if not self.label:
            raise InvalidSpec("labels", "label name must be non-empty")
        if self.count <= 0:
            raise InvalidSpec(f"{where}.count", "count must be positive")
        lo, hi = self.words
        if not 30 <= lo <= hi:
            raise InvalidSpec(f"{where}.words", "word range must satisfy 30 <= lo <= hi")
        for group, keys in (("entities", ENTITY_KEYS), ("timex", TIMEX_KEYS)):
            dens = getattr(self, group)
            for k, v in dens.items():
                if k not in keys:
                    raise InvalidSpec(f"{where}.{group}", f"unknown tag {k!r}")
                if not 0.0 <= v <= 1.0:
                    raise InvalidSpec(f"{where}.{group}.{k}", "density must lie in [0, 1]")
        for name in ("emotion_density", "positive_emotion_share", "complex_ratio"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise InvalidSpec(f"{where}.{name}", "must lie in [0, 1]")
        if self.pos_sent < 0 or self.neg_sent < 0:
            raise InvalidSpec(f"{where}.sentiment", "sentiment targets must be non-negative")
        if self.words_per_sentence < 5:
            raise InvalidSpec(f"{where}.words_per_sentence", "must be at least 5")
        if not 1.0 <= self.syllables_per_word <= 4.0:
            raise InvalidSpec(f"{where}.syllables_per_word", "must lie in [1, 4]")
        if self.dispersion < 0:
            raise InvalidSpec(f"{where}.dispersion", "must be non-negative")
        span_share = sum(self.entities.values()) * 2 + sum(self.timex.values()) * 3
        if span_share > 0.5:
            raise InvalidSpec(where, "entity and temporal densities leave too little room for filler")


@dataclass(frozen=True)
class SynthSpec:
    labels: tuple[LabelSpec, ...]

    def validate(self) -> None:
        if not self.labels:
            raise InvalidSpec("labels", "at least one label is required")
        names = [s.label for s in self.labels]
        if len(set(names)) != len(names):
            raise InvalidSpec("labels", "label names must be unique")
        for s in self.labels:
            s.validate()


def three_genre_spec(count: int = 120, words: tuple[int, int] = (250, 400), dispersion: float = 0.35) -> SynthSpec:
    """Three genres (FT, UL, GN) whose targets follow the published per-genre means.

    Dispersion is much smaller than in real text so that a desk-sized corpus separates.
    """
    def spec(label, ent, tmx, pos, neg, emo, wps, cpx, syl):
        return LabelSpec(label, count, words, dict(zip(ENTITY_KEYS, ent)), dict(zip(TIMEX_KEYS, tmx)),
                         pos, neg, emo, 0.55, wps, cpx, syl, dispersion)

    return SynthSpec((
        spec("FT", (0.0086, 0.0031, 0.0027, 0.0015), (0.0042, 0.0008, 0.0001), 2.40, 2.62, 0.030, 26.01, 0.0577, 1.34),
        spec("UL", (0.0129, 0.0112, 0.0117, 0.0057), (0.0070, 0.0020, 0.0002), 2.13, 2.20, 0.020, 18.74, 0.1167, 1.51),
        spec("GN", (0.0165, 0.0202, 0.0163, 0.0093), (0.0120, 0.0020, 0.0006), 2.27, 2.29, 0.010, 22.12, 0.1726, 1.67),
    ))


def _timex_unit(tag: str, rng: np.random.Generator) -> str:
    pick = lambda seq: seq[int(rng.integers(len(seq)))]  # noqa: E731
    year = int(rng.integers(1950, 2020))
    day = int(rng.integers(1, 29))
    if tag == "DATE":
        forms = [
            f"{day} {pick(_MONTHS)} {year}",
            f"{pick(_MONTHS)} {year}",
            f"{pick(_MONTHS)} {day}, {year}",
            pick(_WEEKDAYS),
            f"last {pick(_WEEKDAYS)}",
            str(year),
            f"the {year // 10 * 10}s",
            pick(["yesterday", "today", "tomorrow"]),
            f"{int(rng.integers(1, 13))}/{day}/{year}",
        ]
    elif tag == "DURATION":
        forms = [
            f"{pick(_COUNT_WORDS)} {pick(_UNITS)}",
            f"a few {pick(_UNITS)}",
            f"{int(rng.integers(2, 30))} {pick(_UNITS)}",
            "overnight",
        ]
    else:
        forms = [
            f"{int(rng.integers(1, 13))}:{int(rng.integers(0, 60)):02d} pm",
            f"{int(rng.integers(1, 13))} o'clock",
            pick(["noon", "midnight"]),
            f"this {pick(['morning', 'afternoon', 'evening'])}",
        ]
    return pick(forms)


def _entity_unit(tag: str, rng: np.random.Generator, pools: dict) -> str:
    pick = lambda seq: seq[int(rng.integers(len(seq)))]  # noqa: E731
    if tag == "PER":
        return f"{pick(pools['given'])} {pick(pools['surname'])}"
    if tag == "MISC":
        return pick(pools["misc"])
    return pick(pools[tag])


def _jitter(rng: np.random.Generator, sd: float) -> float:
    return float(math.exp(sd * rng.standard_normal() - sd * sd / 2))


def _sentiment_rates(s: LabelSpec, pools: dict) -> tuple[float, float]:
    """Per-word probabilities of a positive and a negative lexicon word."""
    prior = pools["prior"]
    pp = np.mean([prior[w][0] for w in pools["pos"]]), np.mean([prior[w][1] for w in pools["pos"]])
    nn = np.mean([prior[w][0] for w in pools["neg"]]), np.mean([prior[w][1] for w in pools["neg"]])
    a = np.array([[pp[0], nn[0]], [pp[1], nn[1]]])
    rates = np.linalg.solve(a, np.array([s.pos_sent, s.neg_sent]) / 100.0)
    return float(max(rates[0], 0.0)), float(max(rates[1], 0.0))


class _LabelGenerator:
    def __init__(self, spec: LabelSpec, rng: np.random.Generator, pools: dict):
        self.s = spec
        self.rng = rng
        self.pools = pools
        self.carry = dict.fromkeys(ENTITY_KEYS + TIMEX_KEYS, 0.0)
        self.p_pos, self.p_neg = _sentiment_rates(spec, pools)
        c = spec.complex_ratio
        two = (spec.syllables_per_word - c * pools["complex_syll"]) / max(1e-9, 1.0 - c) - 1.0
        self.p_two = min(1.0, max(0.0, two))

    def _count(self, key: str, density: float, words: int) -> int:
        expected = density * words * _jitter(self.rng, self.s.dispersion) + self.carry[key]
        n = max(0, int(math.floor(expected + 0.5)))
        self.carry[key] = expected - n
        return n

    def _free_word(self, jit: dict) -> str:
        rng, pools, s = self.rng, self.pools, self.s
        pick = lambda seq: seq[int(rng.integers(len(seq)))]  # noqa: E731
        u = rng.random()
        for p, key in (
            (self.p_pos * jit["sent"], "pos"),
            (self.p_neg * jit["sent"], "neg"),
            (s.emotion_density * s.positive_emotion_share * jit["emo"], "emo_pos"),
            (s.emotion_density * (1 - s.positive_emotion_share) * jit["emo"], "emo_neg"),
            (s.complex_ratio * jit["cpx"], "complex"),
        ):
            if u < p and pools.get(key):
                return pick(pools[key])
            u -= p
        return pick(pools["two"]) if rng.random() < self.p_two else pick(pools["one"])

    def document(self) -> str:
        s, rng = self.s, self.rng
        lo, hi = s.words
        total = int(rng.integers(lo, hi + 1))
        units: list[str] = []
        for tag in ENTITY_KEYS:
            units += [_entity_unit(tag, rng, self.pools) for _ in range(self._count(tag, s.entities.get(tag, 0.0), total))]
        for tag in TIMEX_KEYS:
            units += [_timex_unit(tag, rng) for _ in range(self._count(tag, s.timex.get(tag, 0.0), total))]
        units = [units[i] for i in rng.permutation(len(units))]
        jit = {k: _jitter(rng, s.dispersion) for k in ("sent", "emo", "cpx")}
        wps = s.words_per_sentence * _jitter(rng, s.dispersion)

        lengths = []
        while sum(lengths) < total:
            lengths.append(max(5, int(round(rng.normal(wps, 0.25 * wps)))))
        overshoot = sum(lengths) - total
        lengths[-1] -= overshoot
        if lengths[-1] < 5 and len(lengths) > 1:
            tail = lengths.pop()
            lengths[-1] += tail
        bounds = np.cumsum([0] + lengths)

        unit_words = [len(u.split()) for u in units]
        slots: list[list[int]] = [[] for _ in lengths]
        for i in range(len(units)):
            pos = (i + 0.5) * total / len(units)
            slots[int(np.searchsorted(bounds, pos, side="right") - 1)].append(i)

        sentences = []
        for length, mine in zip(lengths, slots):
            free = max(length - sum(unit_words[i] for i in mine), len(mine) + 2)
            words = [self._free_word(jit) for _ in range(free)]
            # unit k goes after free word gaps[k]; gaps are distinct, never the last word
            gaps = sorted(rng.choice(np.arange(free - 1), size=len(mine), replace=False).tolist())
            out = []
            queue = list(zip(gaps, mine))
            for j, w in enumerate(words):
                out.append(w)
                while queue and queue[0][0] == j:
                    out.append(units[queue.pop(0)[1]])
            text = " ".join(out)
            sentences.append(text[0].upper() + text[1:] + ".")
        paragraphs, start = [], 0
        while start < len(sentences):
            step = int(rng.integers(4, 8))
            paragraphs.append(" ".join(sentences[start:start + step]))
            start += step
        return "\n\n".join(paragraphs)


def generate_synthetic_corpus(spec: SynthSpec, seed: int) -> list[CorpusRecord]:
    """Build ``count`` documents per label, ids ``<label>-<nnnn>``, labels in spec order."""
    spec.validate()
    pools = _pools()
    records = []
    for k, ls in enumerate(spec.labels):
        rng = np.random.default_rng([seed, k])
        gen = _LabelGenerator(ls, rng, pools)
        for i in range(ls.count):
            records.append(CorpusRecord(f"{ls.label}-{i:04d}", gen.document(), ls.label, "synthetic"))
    return records

