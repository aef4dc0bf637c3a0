"""Black-box adversarial text attacks on classifiers.

Substitution candidates come from synonym, sememe, and named-entity
resources, with two-word phrases handled before single words; the search
walks candidate combinations generation by generation, either stopping at
the first label flip or picking the flip that best preserves sentence
semantics. Victims are reached in-process or over a small HTTP protocol,
and every classifier query is counted.
"""

from buspo.core import (
    AttackConfig,
    Document,
    LabelDistribution,
    Token,
    argmax_label,
    detokenize,
    tokenize,
)

__version__ = "0.1.0"

__all__ = [
    "AttackConfig",
    "Document",
    "LabelDistribution",
    "Token",
    "argmax_label",
    "detokenize",
    "tokenize",
    "__version__",
]
