"""Text analysis: tokenization, stopping, and stemming.

The analyzer chain is fixed and deterministic: lowercase, split into
contiguous alphanumeric runs, drop stopwords, Porter-stem. Positions used
anywhere in the package refer to indices in the post-analysis token
stream, i.e. stopwords are removed before positions are assigned.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .stem import porter_stem

# The classic 33-word Lucene English stopword list. Small enough to stay
# out of the way, large enough to drop the usual function words.
ENGLISH_STOPWORDS = frozenset(
    """a an and are as at be but by for if in into is it no not of on or
    such that the their then there these they this to was will with""".split()
)

_DEFAULT_TOKEN_PATTERN = r"[0-9A-Za-z]+"


@dataclass(frozen=True)
class AnalyzerConfig:
    """Configuration of the analysis chain. Equal configs tokenize equally."""

    lowercase: bool = True
    stem: bool = True
    stopwords: frozenset = ENGLISH_STOPWORDS
    token_pattern: str = _DEFAULT_TOKEN_PATTERN

    def to_dict(self) -> dict:
        return {
            "lowercase": self.lowercase,
            "stem": self.stem,
            "stopwords": sorted(self.stopwords),
            "token_pattern": self.token_pattern,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AnalyzerConfig":
        return cls(
            lowercase=bool(data["lowercase"]),
            stem=bool(data["stem"]),
            stopwords=frozenset(data["stopwords"]),
            token_pattern=data["token_pattern"],
        )


DEFAULT_CONFIG = AnalyzerConfig()


def tokenize(text: str, config: AnalyzerConfig = DEFAULT_CONFIG) -> list[str]:
    """Analyze raw text into a list of normalized terms.

    Steps, in order: lowercase, split on non-alphanumeric characters,
    stopword removal, Porter stemming. Empty input yields an empty list.
    """
    if config.lowercase:
        text = text.lower()
    tokens = re.findall(config.token_pattern, text)
    if config.stopwords:
        tokens = [t for t in tokens if t not in config.stopwords]
    if config.stem:
        tokens = [porter_stem(t) for t in tokens]
    return tokens


@dataclass(frozen=True)
class TokenizedDocument:
    """A document after analysis; position i is the i-th surviving token."""

    docid: str
    tokens: tuple[str, ...] = field(default_factory=tuple)

    def __len__(self) -> int:
        return len(self.tokens)

    def distinct_terms(self) -> list[str]:
        return sorted(set(self.tokens))


def analyze(docid: str, text: str, config: AnalyzerConfig = DEFAULT_CONFIG) -> TokenizedDocument:
    return TokenizedDocument(docid=docid, tokens=tuple(tokenize(text, config)))
