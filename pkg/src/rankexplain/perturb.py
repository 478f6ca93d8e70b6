"""Document perturbation samplers for the pointwise explainers.

Each sampler removes tokens from an analyzed document and reports, per
sample, the kept-position mask, the surviving tokens, a binary
presence vector over the document's distinct terms (the interpretable
representation a surrogate model is fit on), and the removal-fraction
distance. All randomness flows through the package's portable PRNG, so a
(document, config, seed) triple fully determines the output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .analysis import TokenizedDocument
from .index import PositionalIndex
from .rng import XorShift64Star

SAMPLER_KINDS = ("random", "masking", "tfidf")


@dataclass(frozen=True)
class SamplerConfig:
    kind: str = "random"
    rate: float = 0.3          # expected removal fraction
    chunk: int = 3             # window size, masking only
    n_samples: int = 200
    seed: int = 0

    def __post_init__(self):
        if self.kind not in SAMPLER_KINDS:
            raise ValueError(f"unknown sampler kind {self.kind!r}; valid: {', '.join(SAMPLER_KINDS)}")
        if not 0.0 <= self.rate <= 1.0:
            raise ValueError(f"rate must be in [0, 1], got {self.rate}")
        if self.chunk < 1:
            raise ValueError(f"chunk must be >= 1, got {self.chunk}")
        if self.n_samples < 1:
            raise ValueError(f"n_samples must be >= 1, got {self.n_samples}")

    def to_dict(self) -> dict:
        return {"kind": self.kind, "rate": self.rate, "chunk": self.chunk,
                "n_samples": self.n_samples, "seed": self.seed}


@dataclass
class PerturbedSample:
    kept_mask: tuple[int, ...]
    surviving_tokens: tuple[str, ...]
    feature_vector: tuple[int, ...]    # over sorted distinct terms of the doc
    distance: float                    # fraction of tokens removed
    uniform_fallback: bool = False


def feature_terms(doc: TokenizedDocument) -> list[str]:
    """Feature space of a document: its distinct terms, sorted."""
    return doc.distinct_terms()


def _make_sample(doc: TokenizedDocument, kept_mask: list[int], terms: list[str],
                 uniform_fallback: bool = False) -> PerturbedSample:
    surviving = tuple(tok for tok, keep in zip(doc.tokens, kept_mask) if keep)
    present = set(surviving)
    features = tuple(1 if t in present else 0 for t in terms)
    distance = 1.0 - sum(kept_mask) / len(doc.tokens)
    return PerturbedSample(
        kept_mask=tuple(kept_mask),
        surviving_tokens=surviving,
        feature_vector=features,
        distance=distance,
        uniform_fallback=uniform_fallback,
    )


def _check_doc(doc: TokenizedDocument) -> None:
    if len(doc.tokens) == 0:
        raise ValueError(f"document {doc.docid!r} has no tokens: nothing to perturb")


def random_sampler(doc: TokenizedDocument, config: SamplerConfig,
                   rng: XorShift64Star) -> list[PerturbedSample]:
    """Remove each token independently with probability config.rate."""
    _check_doc(doc)
    terms = feature_terms(doc)
    n = len(doc.tokens)
    samples = []
    for _ in range(config.n_samples):
        mask = [0 if rng.random() < config.rate else 1 for _ in range(n)]
        samples.append(_make_sample(doc, mask, terms))
    return samples


def _masking_window_count(n: int, chunk: int, rate: float) -> int:
    """Windows needed so the expected removed fraction is about rate.

    Starts are uniform over the n - chunk + 1 admissible offsets and
    windows may overlap; removal is their union. Solving
    1 - (1 - chunk/starts)**k = rate for k gives the count below.
    """
    if rate <= 0.0:
        return 0
    starts = n - chunk + 1
    per_window = chunk / starts
    if per_window >= 1.0:
        return 1
    if rate >= 1.0:
        # No finite k reaches full coverage in expectation; flood instead.
        return max(1, math.ceil(math.log(1.0 / n) / math.log(1.0 - per_window)))
    return max(1, round(math.log(1.0 - rate) / math.log(1.0 - per_window)))


def masking_sampler(doc: TokenizedDocument, config: SamplerConfig,
                    rng: XorShift64Star) -> list[PerturbedSample]:
    """Remove whole contiguous windows of config.chunk tokens."""
    _check_doc(doc)
    n = len(doc.tokens)
    if config.chunk > n:
        raise ValueError(f"chunk {config.chunk} exceeds document length {n}")
    terms = feature_terms(doc)
    k = _masking_window_count(n, config.chunk, config.rate)
    starts = n - config.chunk + 1
    samples = []
    for _ in range(config.n_samples):
        mask = [1] * n
        for _ in range(k):
            start = rng.randbelow(starts)
            for pos in range(start, start + config.chunk):
                mask[pos] = 0
        samples.append(_make_sample(doc, mask, terms))
    return samples


def tfidf_sampler(doc: TokenizedDocument, index: PositionalIndex, config: SamplerConfig,
                  rng: XorShift64Star) -> list[PerturbedSample]:
    """Remove positions with probability proportional to their tf-idf.

    Position p holding term t is removed with probability
    min(1, rate * n * w(p) / sum(w)) where w(p) = tf(t, doc) * idf(t), so
    uniform weights reduce to the random sampler's marginals and heavy
    terms are removed more often. If every weight is zero (terms unknown
    to the index) the sampler falls back to uniform removal and flags the
    samples.
    """
    _check_doc(doc)
    n = len(doc.tokens)
    terms = feature_terms(doc)
    counts: dict[str, int] = {}
    for t in doc.tokens:
        counts[t] = counts.get(t, 0) + 1
    weights = [counts[t] * index.idf(t) for t in doc.tokens]
    total = sum(weights)
    fallback = total <= 0.0
    if fallback:
        probs = [config.rate] * n
    else:
        probs = [min(1.0, config.rate * n * w / total) for w in weights]
    samples = []
    for _ in range(config.n_samples):
        mask = [0 if rng.random() < probs[pos] else 1 for pos in range(n)]
        samples.append(_make_sample(doc, mask, terms, uniform_fallback=fallback))
    return samples


def draw_samples(doc: TokenizedDocument, config: SamplerConfig,
                 index: PositionalIndex | None = None) -> list[PerturbedSample]:
    """Dispatch on config.kind with a PRNG seeded from config.seed."""
    rng = XorShift64Star(config.seed)
    if config.kind == "random":
        return random_sampler(doc, config, rng)
    if config.kind == "masking":
        return masking_sampler(doc, config, rng)
    if index is None:
        raise ValueError("tfidf sampler needs the index")
    return tfidf_sampler(doc, index, config, rng)
