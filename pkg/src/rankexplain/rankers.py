"""Scoring models and ranked-list plumbing.

Three sparse models (BM25, Jelinek-Mercer and Dirichlet language models)
score against a :class:`PositionalIndex`. Any object implementing the
:class:`Ranker` interface can stand in for an opaque second-stage model;
:class:`HiddenIntentRanker` is the built-in synthetic one. Run files use
the six-column TREC format.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Optional, Sequence

from .index import PositionalIndex


@dataclass(frozen=True)
class Query:
    qid: str
    text: str
    terms: tuple[str, ...]

    @classmethod
    def from_text(cls, index: PositionalIndex, qid: str, text: str) -> "Query":
        """Analyze text with the index's own config."""
        from .analysis import tokenize

        return cls(qid=qid, text=text, terms=tuple(tokenize(text, index.config)))

    @classmethod
    def from_terms(cls, qid: str, terms: Sequence[str]) -> "Query":
        """Wrap already-analyzed terms (used for expanded queries)."""
        return cls(qid=qid, text=" ".join(terms), terms=tuple(terms))


class RunEntry(NamedTuple):
    docid: str
    rank: int
    score: float


@dataclass
class RankedList:
    """Ordered (docid, rank, score) entries for one query.

    Ranks are 1..n with no gaps, scores are non-increasing with rank and
    docids are unique; the constructor path through :meth:`from_entries`
    enforces all three.
    """

    qid: str
    entries: list[RunEntry] = field(default_factory=list)
    tag: str = "rankexplain"

    @classmethod
    def from_entries(cls, qid: str, entries: Iterable[RunEntry], tag: str = "rankexplain") -> "RankedList":
        entries = sorted(entries, key=lambda e: e.rank)
        seen: set[str] = set()
        prev_score: Optional[float] = None
        for i, entry in enumerate(entries, start=1):
            if entry.rank != i:
                raise ValueError(f"qid {qid!r}: ranks must be 1..n with no gaps (got {entry.rank} at position {i})")
            if entry.docid in seen:
                raise ValueError(f"qid {qid!r}: duplicate docid {entry.docid!r}")
            seen.add(entry.docid)
            if prev_score is not None and entry.score > prev_score:
                raise ValueError(f"qid {qid!r}: scores must be non-increasing with rank (rank {entry.rank})")
            prev_score = entry.score
        return cls(qid=qid, entries=list(entries), tag=tag)

    @classmethod
    def from_scores(cls, qid: str, scored: Iterable[tuple[str, float]], depth: Optional[int] = None,
                    tag: str = "rankexplain") -> "RankedList":
        """Sort by score descending, ties by ascending docid, truncate."""
        ordered = sorted(scored, key=lambda pair: (-pair[1], pair[0]))
        if depth is not None:
            ordered = ordered[:depth]
        entries = [RunEntry(docid, i, score) for i, (docid, score) in enumerate(ordered, start=1)]
        return cls(qid=qid, entries=entries, tag=tag)

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def docids(self) -> list[str]:
        return [e.docid for e in self.entries]

    def score_at(self, rank: int) -> float:
        if not 1 <= rank <= len(self.entries):
            raise ValueError(f"rank {rank} outside 1..{len(self.entries)}")
        return self.entries[rank - 1].score


@dataclass(frozen=True)
class RankerParams:
    """Default parameters of the built-in sparse models."""

    k1: float = 0.9
    b: float = 0.4
    jm_lambda: float = 0.1
    dirichlet_mu: float = 1000.0


class Ranker(ABC):
    """Scoring interface: a pure function of (index, query, doc, params).

    ``score_tokens`` evaluates the same scoring function on a transient
    document given as a token list, with collection statistics frozen at
    the backing index. That is how perturbed documents are scored without
    re-indexing.
    """

    name: str = "ranker"

    @abstractmethod
    def score(self, query: Query, docid: str) -> float:
        ...

    @abstractmethod
    def score_tokens(self, query: Query, tokens: Sequence[str]) -> float:
        ...


def _counts(tokens: Sequence[str]) -> dict:
    counts: dict[str, int] = {}
    for t in tokens:
        counts[t] = counts.get(t, 0) + 1
    return counts


class _SparseRanker(Ranker):
    """Shared machinery: per-term scoring over tf and document length."""

    def __init__(self, index: PositionalIndex):
        self.index = index

    def _term_score(self, term: str, tf: int, dl: int) -> float:
        raise NotImplementedError

    def _weighted_terms(self, query: Query) -> list[tuple[str, float]]:
        return [(t, 1.0) for t in query.terms]

    def score(self, query: Query, docid: str) -> float:
        self.index._require_doc(docid)
        dl = self.index.doc_length(docid)
        return sum(
            w * self._term_score(t, self.index.tf(t, docid), dl)
            for t, w in self._weighted_terms(query)
        )

    def score_tokens(self, query: Query, tokens: Sequence[str]) -> float:
        counts = _counts(tokens)
        dl = len(tokens)
        return sum(
            w * self._term_score(t, counts.get(t, 0), dl)
            for t, w in self._weighted_terms(query)
        )


class BM25Ranker(_SparseRanker):
    name = "bm25"

    def __init__(self, index: PositionalIndex, k1: float = 0.9, b: float = 0.4):
        super().__init__(index)
        self.k1 = k1
        self.b = b

    def _term_score(self, term: str, tf: int, dl: int) -> float:
        if tf == 0:
            return 0.0
        avgdl = self.index.avgdl
        norm = 1.0 - self.b + self.b * (dl / avgdl) if avgdl > 0 else 1.0
        return self.index.idf(term) * tf * (self.k1 + 1.0) / (tf + self.k1 * norm)


class LMJMRanker(_SparseRanker):
    """Query log-likelihood with Jelinek-Mercer smoothing.

    Terms never seen in the collection are skipped.
    """

    name = "lmjm"

    def __init__(self, index: PositionalIndex, lam: float = 0.1):
        super().__init__(index)
        if not 0.0 < lam < 1.0:
            raise ValueError(f"lambda must be in (0, 1), got {lam}")
        self.lam = lam

    def _term_score(self, term: str, tf: int, dl: int) -> float:
        cf = self.index.cf(term)
        if cf == 0:
            return 0.0
        p_doc = tf / dl if dl > 0 else 0.0
        p_coll = cf / self.index.total_tokens
        return math.log((1.0 - self.lam) * p_doc + self.lam * p_coll)

    def term_probability(self, term: str, tf: int, dl: int) -> float:
        """The smoothed P(term | doc) mixture itself (not its log)."""
        cf = self.index.cf(term)
        p_doc = tf / dl if dl > 0 else 0.0
        p_coll = cf / self.index.total_tokens if self.index.total_tokens else 0.0
        return (1.0 - self.lam) * p_doc + self.lam * p_coll


class LMDirRanker(_SparseRanker):
    """Query log-likelihood with Dirichlet smoothing."""

    name = "lmdir"

    def __init__(self, index: PositionalIndex, mu: float = 1000.0):
        super().__init__(index)
        if mu <= 0:
            raise ValueError(f"mu must be positive, got {mu}")
        self.mu = mu

    def _term_score(self, term: str, tf: int, dl: int) -> float:
        cf = self.index.cf(term)
        if cf == 0:
            return 0.0
        p_coll = cf / self.index.total_tokens
        return math.log((tf + self.mu * p_coll) / (dl + self.mu))


SIMPLE_RANKERS = ("bm25", "lmjm", "lmdir")


def make_ranker(index: PositionalIndex, name: str, params: RankerParams = RankerParams()) -> Ranker:
    if name == "bm25":
        return BM25Ranker(index, k1=params.k1, b=params.b)
    if name == "lmjm":
        return LMJMRanker(index, lam=params.jm_lambda)
    if name == "lmdir":
        return LMDirRanker(index, mu=params.dirichlet_mu)
    raise ValueError(f"unknown ranker {name!r}; valid: {', '.join(SIMPLE_RANKERS)}")


class LinearScorer(Ranker):
    """Query-independent scorer: sum of coefficient * tf over fixed terms.

    Useful as a transparent stand-in for an opaque model whose true term
    contributions are known, e.g. in fidelity experiments.
    """

    name = "linear"

    def __init__(self, index: PositionalIndex, coefficients: dict):
        self.index = index
        self.coefficients = dict(coefficients)

    def score(self, query: Query, docid: str) -> float:
        return sum(c * self.index.tf(t, docid) for t, c in self.coefficients.items())

    def score_tokens(self, query: Query, tokens: Sequence[str]) -> float:
        counts = _counts(tokens)
        return sum(c * counts.get(t, 0) for t, c in self.coefficients.items())


class HiddenIntentRanker(Ranker):
    """Black box built from a base ranker plus hidden weighted terms.

    Scores as if the query were expanded with the hidden terms: base score
    plus each hidden term's weighted single-term score. The hidden terms
    are not observable through the Ranker interface.
    """

    name = "hidden_intent"

    def __init__(self, base: Ranker, hidden_terms: Sequence[tuple[str, float]]):
        for term, weight in hidden_terms:
            if weight <= 0:
                raise ValueError(f"hidden term {term!r} has non-positive weight {weight}")
        self._base = base
        self._hidden = tuple(hidden_terms)

    def score(self, query: Query, docid: str) -> float:
        total = self._base.score(query, docid)
        for term, weight in self._hidden:
            total += weight * self._base.score(Query.from_terms("", [term]), docid)
        return total

    def score_tokens(self, query: Query, tokens: Sequence[str]) -> float:
        total = self._base.score_tokens(query, tokens)
        for term, weight in self._hidden:
            total += weight * self._base.score_tokens(Query.from_terms("", [term]), tokens)
        return total


def rank(index: PositionalIndex, ranker: Ranker, query: Query,
         pool: Optional[Iterable[str]] = None, depth: int = 1000) -> RankedList:
    """Score candidates and return the ranked list.

    With a pool, exactly the pool is scored; otherwise candidates are the
    union of postings of the query terms. Ties break by ascending docid.
    An empty candidate set produces an empty list.
    """
    if depth < 1:
        raise ValueError(f"depth must be >= 1, got {depth}")
    if pool is not None:
        candidates = sorted(set(pool))
    else:
        union: set[str] = set()
        for term in query.terms:
            union.update(index.postings(term))
        candidates = sorted(union)
    scored = [(docid, ranker.score(query, docid)) for docid in candidates]
    return RankedList.from_scores(query.qid, scored, depth=depth, tag=ranker.name)


# -- run-file and topics I/O ----------------------------------------------


def load_from_res(path: str) -> dict:
    """Parse a TREC run file into {qid: RankedList}.

    Lines are ``qid Q0 docid rank score tag`` separated by whitespace.
    Malformed lines, duplicate (qid, docid) pairs and rank gaps are
    rejected with the offending line number where available.
    """
    raw: dict[str, list[RunEntry]] = {}
    tags: dict[str, str] = {}
    seen: set[tuple[str, str]] = set()
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            fields = line.split()
            if len(fields) != 6:
                raise ValueError(f"{path}:{lineno}: expected 6 whitespace-separated columns, got {len(fields)}")
            qid, _q0, docid, rank_s, score_s, tag = fields
            try:
                rank_v = int(rank_s)
                score_v = float(score_s)
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: bad rank or score field") from exc
            if (qid, docid) in seen:
                raise ValueError(f"{path}:{lineno}: duplicate (qid, docid) pair ({qid}, {docid})")
            seen.add((qid, docid))
            raw.setdefault(qid, []).append(RunEntry(docid, rank_v, score_v))
            tags.setdefault(qid, tag)
    runs: dict[str, RankedList] = {}
    for qid, entries in raw.items():
        runs[qid] = RankedList.from_entries(qid, entries, tag=tags[qid])
    return runs


def save_to_res(runs: dict, path: str) -> None:
    """Write runs in canonical TREC form: qids sorted, entries by rank."""
    with open(path, "w", encoding="utf-8") as f:
        for qid in sorted(runs):
            ranked = runs[qid]
            for entry in ranked.entries:
                f.write(f"{qid} Q0 {entry.docid} {entry.rank} {entry.score!r} {ranked.tag}\n")


def load_topics(path: str) -> dict:
    """Read a tab-separated topics file: qid<TAB>query text."""
    topics: dict[str, str] = {}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            if "\t" not in line:
                raise ValueError(f"{path}:{lineno}: expected qid<TAB>query text")
            qid, text = line.split("\t", 1)
            if qid in topics:
                raise ValueError(f"{path}:{lineno}: duplicate qid {qid!r}")
            topics[qid] = text
    return topics
