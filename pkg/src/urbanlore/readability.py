"""Gunning Fog, Flesch reading ease and Flesch-Kincaid grade level."""
from __future__ import annotations

from dataclasses import dataclass

from .errors import DegenerateProfile
from .text_core import TextProfile

__all__ = ["ReadabilityScores", "compute_readability"]


@dataclass(frozen=True)
class ReadabilityScores:
    fog: float
    flesch: float
    kincaid: float
    cpx_ratio: float
    syll_ratio: float
    words_per_sentence: float


def compute_readability(profile: TextProfile) -> ReadabilityScores:
    """Evaluate the three indices at full precision.

    Flesch is not clamped to [0, 100]; the raw value is the feature.

    >>> s = compute_readability(TextProfile(words=100, sentences=5, syllables=150, complex_words=10))
    >>> round(s.fog, 9), round(s.flesch, 9), round(s.kincaid, 9)
    (12.0, 59.635, 9.91)
    """
    if profile.words <= 0 or profile.sentences <= 0:
        raise DegenerateProfile(
            f"need words > 0 and sentences > 0, got {profile.words} and {profile.sentences}"
        )
    wps = profile.words / profile.sentences
    cpx = profile.complex_words / profile.words
    spw = profile.syllables / profile.words
    return ReadabilityScores(
        fog=0.4 * (wps + 100.0 * cpx),
        flesch=206.835 - 1.015 * wps - 84.6 * spw,
        kincaid=0.39 * wps + 11.8 * spw - 15.59,
        cpx_ratio=cpx,
        syll_ratio=spw,
        words_per_sentence=wps,
    )
