"""Genre-level text features (entities, temporal expressions, affect, readability)
with SVM classification and significance testing."""
from .errors import ConfigError, DataError, InvariantError, UrbanloreError
from .features import GROUPS, SCHEMA_VERSION, FeatureSchema, Resources, extract_features
from .readability import compute_readability
from .text_core import Document, count_syllables, split_sentences, text_profile, tokenize

__version__ = "0.1.0"

__all__ = [
    "GROUPS",
    "SCHEMA_VERSION",
    "ConfigError",
    "DataError",
    "Document",
    "FeatureSchema",
    "InvariantError",
    "Resources",
    "UrbanloreError",
    "compute_readability",
    "count_syllables",
    "extract_features",
    "split_sentences",
    "text_profile",
    "tokenize",
]
