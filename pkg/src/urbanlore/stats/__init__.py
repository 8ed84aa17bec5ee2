"""Descriptive statistics, significance tests and the synthetic corpus generator."""
from .descriptive import GroupSummary, describe, render_table
from .significance import FTestResult, TTestResult, approx_randomization, f_test, macro_f1_metric, t_test
from .special import betainc
from .synth import LabelSpec, SynthSpec, generate_synthetic_corpus, three_genre_spec

__all__ = [
    "FTestResult",
    "GroupSummary",
    "LabelSpec",
    "SynthSpec",
    "TTestResult",
    "approx_randomization",
    "betainc",
    "describe",
    "f_test",
    "generate_synthetic_corpus",
    "macro_f1_metric",
    "three_genre_spec",
    "render_table",
    "t_test",
]
