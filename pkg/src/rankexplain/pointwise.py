"""Pointwise explainers: local surrogate models over document perturbations.

Both explainers perturb the document, score each perturbed variant with
the ranker under scrutiny, and fit a weighted ridge surrogate on binary
term-presence features. They differ only in the regression target: the
LIRME-style explainer regresses the raw scores; the EXS-style explainer
first converts scores into one of three rank-aware targets. The signed
surrogate coefficients are the explanation.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .index import PositionalIndex
from .perturb import PerturbedSample, SamplerConfig, draw_samples, feature_terms
from .rankers import Query, RankedList, Ranker

EXS_VARIANTS = ("topk_binary", "score_ratio", "rank_based")


@dataclass
class ExplanationVector:
    """Ordered (term, weight) pairs, largest |weight| first, ties lexicographic."""

    entries: list[tuple[str, float]]
    qid: str = ""
    docid: str = ""
    method: str = ""
    params: dict = field(default_factory=dict)

    @classmethod
    def from_weights(cls, weights: dict, n_terms: Optional[int] = None, **meta) -> "ExplanationVector":
        ordered = sorted(weights.items(), key=lambda kv: (-abs(kv[1]), kv[0]))
        if n_terms is not None:
            ordered = ordered[:n_terms]
        return cls(entries=ordered, **meta)

    @property
    def terms(self) -> list[str]:
        return [t for t, _ in self.entries]

    def weight(self, term: str) -> float:
        for t, w in self.entries:
            if t == term:
                return w
        return 0.0

    def top_terms(self, m: int) -> list[str]:
        return [t for t, _ in self.entries[:m]]

    def as_dict(self) -> dict:
        return {
            "qid": self.qid,
            "docid": self.docid,
            "method": self.method,
            "params": self.params,
            "terms": [{"term": t, "weight": w} for t, w in self.entries],
        }


@dataclass(frozen=True)
class PointwiseParams:
    sampler: SamplerConfig = SamplerConfig()
    kernel_width: float = 0.25
    ridge: float = 1.0
    n_terms: int = 10
    exs_variant: str = "topk_binary"
    exs_k: int = 10

    def __post_init__(self):
        if self.kernel_width <= 0:
            raise ValueError(f"kernel_width must be positive, got {self.kernel_width}")
        if self.ridge < 0:
            raise ValueError(f"ridge must be >= 0, got {self.ridge}")
        if self.n_terms < 1:
            raise ValueError(f"n_terms must be >= 1, got {self.n_terms}")
        if self.exs_variant not in EXS_VARIANTS:
            raise ValueError(f"unknown exs_variant {self.exs_variant!r}; valid: {', '.join(EXS_VARIANTS)}")
        if self.exs_k < 1:
            raise ValueError(f"exs_k must be >= 1, got {self.exs_k}")

    def to_dict(self) -> dict:
        return {
            "sampler": self.sampler.to_dict(),
            "kernel_width": self.kernel_width,
            "ridge": self.ridge,
            "n_terms": self.n_terms,
            "exs_variant": self.exs_variant,
            "exs_k": self.exs_k,
        }


@dataclass
class SurrogateFit:
    weights: dict
    intercept: float
    sample_count: int
    weighted_residual_norm: float
    solver: str = "normal_equations"


def fit_weighted_ridge(X, y, sample_weights, ridge: float,
                       feature_names: Optional[Sequence[str]] = None) -> SurrogateFit:
    """Minimize sum_i w_i (y_i - beta.x_i - b0)^2 + ridge * ||beta||^2.

    The intercept is unpenalized. Solved by normal equations; with
    ridge == 0 and a rank-deficient design, falls back to the
    minimum-norm least-squares solution and flags it in ``solver``.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    w = np.asarray(sample_weights, dtype=float)
    if X.ndim != 2:
        raise ValueError("X must be a 2-d matrix")
    n, d = X.shape
    if len(y) != n or len(w) != n or n < 1:
        raise ValueError("X rows, y and sample_weights must have equal positive length")
    if np.any(w < 0):
        raise ValueError("sample weights must be >= 0")
    if not np.any(w > 0):
        raise ValueError("all sample weights are zero")
    if feature_names is None:
        feature_names = [str(i) for i in range(d)]
    if len(feature_names) != d:
        raise ValueError("feature_names length must match X columns")

    A = np.hstack([X, np.ones((n, 1))])
    penalty = np.diag([ridge] * d + [0.0])
    G = A.T @ (w[:, None] * A) + penalty
    rhs = A.T @ (w * y)
    solver = "normal_equations"
    if ridge == 0.0:
        sw = np.sqrt(w)
        design = sw[:, None] * A
        rank = np.linalg.matrix_rank(design)
        if rank < d + 1:
            beta, *_ = np.linalg.lstsq(design, sw * y, rcond=None)
            solver = "minimum_norm"
        else:
            beta = np.linalg.solve(G, rhs)
    else:
        beta = np.linalg.solve(G, rhs)
    predictions = A @ beta
    residual = math.sqrt(float(np.sum(w * (y - predictions) ** 2)))
    weights = {feature_names[i]: float(beta[i]) for i in range(d)}
    return SurrogateFit(
        weights=weights,
        intercept=float(beta[d]),
        sample_count=n,
        weighted_residual_norm=residual,
        solver=solver,
    )


def _perturbation_design(index: PositionalIndex, docid: str, params: PointwiseParams):
    """Draw samples and assemble the surrogate design for one document."""
    doc = index.tokenized_doc(docid)
    terms = feature_terms(doc)
    if len(terms) < 2:
        raise ValueError(f"explanation undefined: document {docid!r} has fewer than 2 distinct terms")
    samples = draw_samples(doc, params.sampler, index=index)
    X = np.array([s.feature_vector for s in samples], dtype=float)
    distances = np.array([s.distance for s in samples])
    kernel = np.exp(-(distances ** 2) / (params.kernel_width ** 2))
    return samples, terms, X, kernel


def _scores(ranker: Ranker, query: Query, samples: list[PerturbedSample]) -> np.ndarray:
    return np.array([ranker.score_tokens(query, s.surviving_tokens) for s in samples])


def lirme_explain(index: PositionalIndex, ranker: Ranker, query: Query, docid: str,
                  params: PointwiseParams = PointwiseParams()) -> ExplanationVector:
    """Explain one (query, document) score with a local linear surrogate.

    Perturbed variants are scored directly through the ranker with
    collection statistics frozen at the index; sample weights follow the
    exponential kernel exp(-distance^2 / kernel_width^2).
    """
    samples, terms, X, kernel = _perturbation_design(index, docid, params)
    y = _scores(ranker, query, samples)
    fit = fit_weighted_ridge(X, y, kernel, params.ridge, feature_names=terms)
    return ExplanationVector.from_weights(
        fit.weights, n_terms=params.n_terms,
        qid=query.qid, docid=docid, method="lirme", params=params.to_dict(),
    )


def exs_targets(scores: np.ndarray, base_list: RankedList, variant: str, exs_k: int) -> np.ndarray:
    """Convert raw perturbed-document scores into EXS surrogate targets.

    topk_binary: 1 when the score beats the rank-k score, else 0.
    score_ratio: 1 - (s_top - s) / s_top, clamped to [0, 1].
    rank_based: 1 - (insertion rank of s) / exs_k, clamped to [0, 1], where
    the insertion rank counts base-list scores strictly above s.
    """
    if len(base_list) < exs_k:
        raise ValueError(f"base list has {len(base_list)} entries, needs at least exs_k={exs_k}")
    base_scores = [e.score for e in base_list.entries]
    if variant == "topk_binary":
        threshold = base_list.score_at(exs_k)
        return (scores > threshold).astype(float)
    if variant == "score_ratio":
        s_top = base_list.score_at(1)
        if s_top == 0:
            raise ValueError("score_ratio target undefined: top score is zero")
        return np.clip(1.0 - (s_top - scores) / s_top, 0.0, 1.0)
    if variant == "rank_based":
        targets = np.empty(len(scores))
        for i, s in enumerate(scores):
            insertion_rank = sum(1 for b in base_scores if b > s)
            targets[i] = 1.0 - insertion_rank / exs_k
        return np.clip(targets, 0.0, 1.0)
    raise ValueError(f"unknown exs_variant {variant!r}; valid: {', '.join(EXS_VARIANTS)}")


def exs_explain(index: PositionalIndex, ranker: Ranker, query: Query, docid: str,
                params: PointwiseParams, base_list: RankedList) -> ExplanationVector:
    """EXS-style explanation: rank-aware targets, then the same surrogate."""
    samples, terms, X, kernel = _perturbation_design(index, docid, params)
    raw = _scores(ranker, query, samples)
    y = exs_targets(raw, base_list, params.exs_variant, params.exs_k)
    fit = fit_weighted_ridge(X, y, kernel, params.ridge, feature_names=terms)
    return ExplanationVector.from_weights(
        fit.weights, n_terms=params.n_terms,
        qid=query.qid, docid=docid, method=f"exs:{params.exs_variant}", params=params.to_dict(),
    )


BAR_COLUMNS = 40


def visualize_terms(expl: ExplanationVector, fmt: str = "text") -> str:
    """Render an explanation as text bars or as its JSON form.

    Text rows show the term, the signed weight, and a '#' bar scaled so
    the largest |weight| spans 40 columns.
    """
    if fmt == "json":
        return json.dumps(expl.as_dict(), separators=(",", ":"))
    if fmt != "text":
        raise ValueError(f"unknown format {fmt!r}; valid: text, json")
    if not expl.entries:
        return ""
    peak = max(abs(w) for _, w in expl.entries)
    width = max(len(t) for t, _ in expl.entries)
    lines = []
    for term, weight in expl.entries:
        bar = "#" * (round(BAR_COLUMNS * abs(weight) / peak) if peak > 0 else 0)
        sign = "-" if weight < 0 else "+"
        lines.append(f"{term:<{width}}  {sign}{abs(weight):.4f}  {bar}")
    return "\n".join(lines)


def explanation_from_json(text: str) -> ExplanationVector:
    data = json.loads(text)
    return ExplanationVector(
        entries=[(row["term"], row["weight"]) for row in data["terms"]],
        qid=data.get("qid", ""),
        docid=data.get("docid", ""),
        method=data.get("method", ""),
        params=data.get("params", {}),
    )
