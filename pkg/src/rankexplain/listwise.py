"""Listwise explainers: expanded query plus simple ranker.

An explanation of a ranked list L is a pair (expansion terms, simple
model): re-ranking L's documents with the query expanded by those terms
should approximate L itself. Two families are implemented. The
preference-pair family (multiplex over several simple rankers, or a
single-ranker intent variant) greedily maximizes the number of sampled
document pairs whose order the selected terms preserve. The direct
family (greedy and best-first search) climbs rank-biased overlap between
the re-ranked list and L. All tie-breaking is by higher candidate
salience and then lexicographic term order, so outputs are deterministic
given the seed.
"""

from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .evaluation import rbo
from .index import PositionalIndex
from .rankers import (
    Query,
    RankedList,
    Ranker,
    RankerParams,
    SIMPLE_RANKERS,
    make_ranker,
    rank,
)
from .rng import XorShift64Star

PAIR_STRATEGIES = ("uniform", "rank_gap_weighted", "top_vs_rest")
LISTWISE_METHODS = ("multiplex", "intent_exs", "greedy", "bfs")


@dataclass(frozen=True)
class CandidateTerm:
    term: str
    salience: float


@dataclass(frozen=True)
class PreferencePair:
    upper: str
    lower: str
    rank_gap: int


@dataclass
class ListwiseExplanation:
    qid: str
    method: str
    terms: list[str]
    fidelity: dict
    evaluations_used: int
    diagnostics: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "qid": self.qid,
            "method": self.method,
            "terms": list(self.terms),
            "fidelity": dict(self.fidelity),
            "evaluations": self.evaluations_used,
        }


def generate_candidates(index: PositionalIndex, ranked: RankedList,
                        top_k: int = 10, n_candidates: int = 100) -> list[CandidateTerm]:
    """Candidate expansion terms from the top of a ranked list.

    The pool is the union of distinct terms of the top_k documents
    (query terms are not excluded); salience(t) sums tf(t, D) * idf(t)
    over those documents. Sorted by salience descending, ties
    lexicographic, truncated to n_candidates.
    """
    if len(ranked) == 0:
        raise ValueError("cannot generate candidates from an empty ranked list")
    if top_k < 1 or top_k > len(ranked):
        raise ValueError(f"top_k must be in 1..{len(ranked)}, got {top_k}")
    salience: dict[str, float] = {}
    for entry in ranked.entries[:top_k]:
        for term, tf in index.doc_term_counts(entry.docid).items():
            salience[term] = salience.get(term, 0.0) + tf * index.idf(term)
    ordered = sorted(salience.items(), key=lambda kv: (-kv[1], kv[0]))
    return [CandidateTerm(term, value) for term, value in ordered[:n_candidates]]


def _all_pairs(ranked: RankedList) -> list[PreferencePair]:
    docs = ranked.docids
    return [
        PreferencePair(docs[i], docs[j], rank_gap=j - i)
        for i in range(len(docs))
        for j in range(i + 1, len(docs))
    ]


def sample_pairs(ranked: RankedList, strategy: str, count: int,
                 rng: XorShift64Star) -> list[PreferencePair]:
    """Sample preference pairs (upper ranked above lower) from a list.

    uniform: without replacement from all ordered pairs.
    rank_gap_weighted: without replacement, probability proportional to
    the rank gap.
    top_vs_rest: uniform without replacement with the upper document
    restricted to the first ceil(n/10) ranks.
    """
    if len(ranked) < 2:
        raise ValueError("no pairs: ranked list has fewer than 2 entries")
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    if strategy not in PAIR_STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; valid: {', '.join(PAIR_STRATEGIES)}")
    pool = _all_pairs(ranked)
    if strategy == "top_vs_rest":
        cutoff = math.ceil(len(ranked) / 10)
        upper_ok = set(ranked.docids[:cutoff])
        pool = [p for p in pool if p.upper in upper_ok]
    take = min(count, len(pool))
    if strategy == "rank_gap_weighted":
        chosen = []
        remaining = list(pool)
        weights = [float(p.rank_gap) for p in remaining]
        for _ in range(take):
            idx = rng.weighted_index(weights)
            chosen.append(remaining.pop(idx))
            weights.pop(idx)
        return chosen
    # uniform families: partial Fisher-Yates
    remaining = list(pool)
    chosen = []
    for _ in range(take):
        idx = rng.randbelow(len(remaining))
        chosen.append(remaining.pop(idx))
    return chosen


@dataclass
class PreferenceMatrix:
    """Term x pair agreement entries per simple ranker.

    entries[r][t][p] = sign(score_r(term t as query, upper) -
    score_r(term t as query, lower)) for pair p. The consensus layer is
    the sign of the per-ranker sum.
    """

    rankers: list[str]
    candidates: list[CandidateTerm]
    pairs: list[PreferencePair]
    entries: np.ndarray          # int8, shape (n_rankers, n_terms, n_pairs)

    @property
    def terms(self) -> list[str]:
        return [c.term for c in self.candidates]

    @property
    def consensus(self) -> np.ndarray:
        return np.sign(self.entries.sum(axis=0)).astype(np.int8)

    def entry(self, term: str, pair: PreferencePair, ranker: str) -> int:
        r = self.rankers.index(ranker)
        t = self.terms.index(term)
        p = self.pairs.index(pair)
        return int(self.entries[r, t, p])


def build_preference_matrix(index: PositionalIndex, simple_rankers: Sequence[Ranker],
                            candidates: Sequence[CandidateTerm],
                            pairs: Sequence[PreferencePair]) -> PreferenceMatrix:
    """Score every candidate as a one-term query against both pair sides."""
    if not simple_rankers:
        raise ValueError("need at least one simple ranker")
    if not candidates:
        raise ValueError("need at least one candidate term")
    if not pairs:
        raise ValueError("need at least one preference pair")
    docids = sorted({p.upper for p in pairs} | {p.lower for p in pairs})
    entries = np.zeros((len(simple_rankers), len(candidates), len(pairs)), dtype=np.int8)
    for r, ranker in enumerate(simple_rankers):
        for t, cand in enumerate(candidates):
            query = Query.from_terms("", [cand.term])
            scores = {d: ranker.score(query, d) for d in docids}
            for p, pair in enumerate(pairs):
                diff = scores[pair.upper] - scores[pair.lower]
                entries[r, t, p] = (diff > 0) - (diff < 0)
    return PreferenceMatrix(
        rankers=[r.name for r in simple_rankers],
        candidates=list(candidates),
        pairs=list(pairs),
        entries=entries,
    )


def _greedy_cover(layer: np.ndarray, candidates: Sequence[CandidateTerm],
                  m_min: int, m_max: int):
    """Greedy maximum coverage over one entry layer (terms x pairs).

    A pair is covered by a term set S when the sum of S's entries for it
    is positive. Terms are added by maximal marginal coverage (ties by
    salience, then term); selection stops at m_max, or once the best gain
    is no longer positive after m_min terms were reached.
    """
    n_terms, n_pairs = layer.shape
    selected: list[int] = []
    running = np.zeros(n_pairs, dtype=np.int64)
    evaluations = 0

    def covered(vec) -> int:
        return int(np.count_nonzero(vec > 0))

    while len(selected) < min(m_max, n_terms):
        best_idx = None
        best_key = None
        base_cov = covered(running)
        for t in range(n_terms):
            if t in selected:
                continue
            gain = covered(running + layer[t]) - base_cov
            evaluations += 1
            key = (-gain, -candidates[t].salience, candidates[t].term)
            if best_key is None or key < best_key:
                best_key = key
                best_idx = t
        if best_idx is None:
            break
        best_gain = -best_key[0]
        if best_gain <= 0 and len(selected) >= m_min:
            break
        selected.append(best_idx)
        running += layer[best_idx]
    coverage = covered(running) / n_pairs
    terms = [candidates[t].term for t in selected]
    return terms, coverage, evaluations


def _coverage_explanation(method: str, layer: np.ndarray, matrix: PreferenceMatrix,
                          m_min: int, m_max: int, qid: str = "") -> ListwiseExplanation:
    if m_min < 0 or m_max < m_min:
        raise ValueError(f"need 0 <= m_min <= m_max, got {m_min}, {m_max}")
    terms, coverage, evaluations = _greedy_cover(layer, matrix.candidates, m_min, m_max)
    diagnostics = {}
    if coverage == 0.0:
        diagnostics["zero_coverage"] = True
    return ListwiseExplanation(
        qid=qid,
        method=method,
        terms=terms,
        fidelity={"coverage": coverage},
        evaluations_used=evaluations,
        diagnostics=diagnostics,
    )


def intent_exs_explain(matrix: PreferenceMatrix, m_min: int = 3, m_max: int = 10,
                       qid: str = "") -> ListwiseExplanation:
    """Single-ranker coverage explainer."""
    if len(matrix.rankers) != 1:
        raise ValueError(f"intent_exs needs a single-ranker matrix, got {len(matrix.rankers)}")
    return _coverage_explanation("intent_exs", matrix.entries[0], matrix, m_min, m_max, qid=qid)


def multiplex_explain(matrix: PreferenceMatrix, m_min: int = 3, m_max: int = 10,
                      qid: str = "") -> ListwiseExplanation:
    """Coverage explainer over the consensus of all rankers in the matrix."""
    return _coverage_explanation("multiplex", matrix.consensus, matrix, m_min, m_max, qid=qid)


# -- direct rank-approximation search ---------------------------------------


class FidelityEvaluator:
    """RBO between the explained list and the simple ranker's re-ranking.

    Re-ranking is confined to the documents of the explained list (the
    pool invariant is asserted on every call), so fidelity is well
    defined even when only a run file is available.
    """

    def __init__(self, index: PositionalIndex, sm: Ranker, query: Query,
                 ranked: RankedList, p: float = 0.9):
        self.index = index
        self.sm = sm
        self.query = query
        self.ranked = ranked
        self.p = p
        self.pool = set(ranked.docids)
        self.calls = 0

    def __call__(self, terms: Sequence[str]) -> float:
        expanded = list(self.query.terms)
        for t in terms:
            if t not in expanded:
                expanded.append(t)
        q_exp = Query.from_terms(self.query.qid, expanded)
        approx = rank(self.index, self.sm, q_exp, pool=self.pool, depth=len(self.ranked))
        assert set(approx.docids) == self.pool, "re-ranking escaped the pool"
        self.calls += 1
        return rbo(approx.docids, self.ranked.docids, self.p)


def _candidate_order(candidates: Sequence[CandidateTerm]) -> list[CandidateTerm]:
    return sorted(candidates, key=lambda c: (-c.salience, c.term))


def _better(fidelity: float, size: int, terms: tuple, best: tuple) -> bool:
    """Canonical preference: fidelity, then fewer terms, then lexicographic."""
    return (-fidelity, size, terms) < (-best[0], best[1], best[2])


def greedy_explain(index: PositionalIndex, sm: Ranker, query: Query, ranked: RankedList,
                   candidates: Sequence[CandidateTerm], m_max: int = 10,
                   p: float = 0.9) -> ListwiseExplanation:
    """Hill-climb expansion terms by fidelity gain.

    Starts from the bare query; each round adds the candidate with the
    largest fidelity improvement and stops when no candidate improves
    fidelity or m_max terms were taken.
    """
    if not candidates:
        raise ValueError("no candidate terms to search over")
    if len(ranked) < 2:
        raise ValueError("ranked list must have at least 2 entries")
    evaluate = FidelityEvaluator(index, sm, query, ranked, p)
    ordered = _candidate_order(candidates)
    selected: list[str] = []
    current = evaluate(selected)
    while len(selected) < m_max:
        best_term = None
        best_fid = current
        for cand in ordered:
            if cand.term in selected:
                continue
            fid = evaluate(selected + [cand.term])
            if fid > best_fid:
                best_fid = fid
                best_term = cand.term
        if best_term is None:
            break
        selected.append(best_term)
        current = best_fid
    return ListwiseExplanation(
        qid=query.qid,
        method="greedy",
        terms=selected,
        fidelity={f"rbo@{p:g}": current},
        evaluations_used=evaluate.calls,
    )


def bfs_explain(index: PositionalIndex, sm: Ranker, query: Query, ranked: RankedList,
                candidates: Sequence[CandidateTerm], m_max: int = 10, p: float = 0.9,
                eval_budget: int = 1000) -> ListwiseExplanation:
    """Best-first search over expansion-term sets keyed by fidelity.

    The frontier is a max-priority queue of term sets; popping the best
    set expands it by every unused candidate. Sets are deduplicated via
    their sorted form and each candidate-set fidelity computation costs
    one unit of budget (the empty-set baseline is free). Returns the best
    set seen, preferring, on fidelity ties, fewer terms and then
    lexicographic order.
    """
    if not candidates:
        raise ValueError("no candidate terms to search over")
    if len(ranked) < 2:
        raise ValueError("ranked list must have at least 2 entries")
    if eval_budget < 1:
        raise ValueError(f"eval_budget must be >= 1, got {eval_budget}")
    evaluate = FidelityEvaluator(index, sm, query, ranked, p)
    order = [c.term for c in _candidate_order(candidates)]
    baseline = evaluate(())
    evaluate.calls = 0
    best = (baseline, 0, ())
    frontier: list[tuple[float, int, tuple]] = []
    heapq.heappush(frontier, (-baseline, 0, ()))
    seen = {()}
    exhausted = False
    while frontier and not exhausted:
        _, size, terms = heapq.heappop(frontier)
        if size >= m_max:
            continue
        for term in order:
            if term in terms:
                continue
            child = tuple(sorted(terms + (term,)))
            if child in seen:
                continue
            seen.add(child)
            if evaluate.calls >= eval_budget:
                exhausted = True
                break
            fid = evaluate(child)
            if _better(fid, len(child), child, best):
                best = (fid, len(child), child)
            heapq.heappush(frontier, (-fid, len(child), child))
    return ListwiseExplanation(
        qid=query.qid,
        method="bfs",
        terms=list(best[2]),
        fidelity={f"rbo@{p:g}": best[0]},
        evaluations_used=evaluate.calls,
        diagnostics={"baseline": baseline},
    )


# -- matrix rendering --------------------------------------------------------

_GLYPHS = {-1: "-", 0: "0", 1: "+"}


def _pair_label(pair: PreferencePair) -> str:
    return f"{pair.upper}>{pair.lower}"


def show_matrix(matrix: PreferenceMatrix, pair_filter: Optional[PreferencePair] = None) -> str:
    """Plain-text terms x pairs grid of {-, 0, +} entries.

    Multi-ranker matrices show the consensus layer. A pair filter
    restricts the grid to that single column.
    """
    layer = matrix.entries[0] if len(matrix.rankers) == 1 else matrix.consensus
    pairs = matrix.pairs
    if pair_filter is not None:
        if pair_filter not in matrix.pairs:
            raise ValueError(f"pair {_pair_label(pair_filter)} not in matrix")
        keep = matrix.pairs.index(pair_filter)
        layer = layer[:, [keep]]
        pairs = [pair_filter]
    term_w = max(len(t) for t in matrix.terms)
    headers = [_pair_label(p) for p in pairs]
    widths = [max(len(h), 1) for h in headers]
    lines = [" " * term_w + "  " + "  ".join(h.rjust(w) for h, w in zip(headers, widths))]
    for t, term in enumerate(matrix.terms):
        cells = [_GLYPHS[int(layer[t, p])].rjust(widths[p]) for p in range(len(pairs))]
        lines.append(f"{term:<{term_w}}  " + "  ".join(cells))
    return "\n".join(lines)


def matrix_to_json(matrix: PreferenceMatrix) -> str:
    return json.dumps(
        {
            "rankers": list(matrix.rankers),
            "pairs": [
                {"upper": p.upper, "lower": p.lower, "rank_gap": p.rank_gap}
                for p in matrix.pairs
            ],
            "terms": matrix.terms,
            "salience": [c.salience for c in matrix.candidates],
            "entries": matrix.entries.tolist(),
        },
        separators=(",", ":"),
    )


def matrix_from_json(text: str) -> PreferenceMatrix:
    data = json.loads(text)
    return PreferenceMatrix(
        rankers=list(data["rankers"]),
        candidates=[
            CandidateTerm(t, s) for t, s in zip(data["terms"], data["salience"])
        ],
        pairs=[
            PreferencePair(p["upper"], p["lower"], p["rank_gap"]) for p in data["pairs"]
        ],
        entries=np.array(data["entries"], dtype=np.int8),
    )


# -- batch driver ------------------------------------------------------------


@dataclass(frozen=True)
class ListwiseParams:
    method: str = "multiplex"
    simple_rankers: tuple = ("bm25", "lmjm", "lmdir")
    top_k: int = 10
    n_candidates: int = 100
    n_pairs: int = 50
    pair_strategy: str = "uniform"
    m_min: int = 3
    m_max: int = 10
    p: float = 0.9
    eval_budget: int = 1000
    seed: int = 0
    ranker_params: RankerParams = RankerParams()

    def __post_init__(self):
        if self.method not in LISTWISE_METHODS:
            raise ValueError(f"unknown method {self.method!r}; valid: {', '.join(LISTWISE_METHODS)}")
        for name in self.simple_rankers:
            if name not in SIMPLE_RANKERS:
                raise ValueError(f"unknown simple ranker {name!r}; valid: {', '.join(SIMPLE_RANKERS)}")
        if not 0.0 < self.p < 1.0:
            raise ValueError(f"p must be in (0, 1), got {self.p}")

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "simple_rankers": list(self.simple_rankers),
            "top_k": self.top_k,
            "n_candidates": self.n_candidates,
            "n_pairs": self.n_pairs,
            "pair_strategy": self.pair_strategy,
            "m_min": self.m_min,
            "m_max": self.m_max,
            "p": self.p,
            "eval_budget": self.eval_budget,
            "seed": self.seed,
        }


def explain_listwise(index: PositionalIndex, query: Query, ranked: RankedList,
                     params: ListwiseParams = ListwiseParams()) -> ListwiseExplanation:
    """Run one configured listwise explainer on one ranked list.

    The coverage-family explainers additionally report the rank-biased
    overlap of re-ranking with their selected terms (same fidelity the
    direct family optimizes), computed with the first simple ranker.
    """
    top_k = min(params.top_k, len(ranked))
    candidates = generate_candidates(index, ranked, top_k=top_k,
                                     n_candidates=params.n_candidates)
    rankers = [make_ranker(index, name, params.ranker_params)
               for name in params.simple_rankers]
    sm = rankers[0]
    if params.method in ("greedy", "bfs"):
        if params.method == "greedy":
            return greedy_explain(index, sm, query, ranked, candidates,
                                  m_max=params.m_max, p=params.p)
        return bfs_explain(index, sm, query, ranked, candidates,
                           m_max=params.m_max, p=params.p,
                           eval_budget=params.eval_budget)
    rng = XorShift64Star(params.seed)
    pairs = sample_pairs(ranked, params.pair_strategy, params.n_pairs, rng)
    if params.method == "intent_exs":
        matrix = build_preference_matrix(index, [sm], candidates, pairs)
        expl = intent_exs_explain(matrix, params.m_min, params.m_max, qid=query.qid)
    else:
        matrix = build_preference_matrix(index, rankers, candidates, pairs)
        expl = multiplex_explain(matrix, params.m_min, params.m_max, qid=query.qid)
    evaluate = FidelityEvaluator(index, sm, query, ranked, params.p)
    expl.fidelity[f"rbo@{params.p:g}"] = evaluate(expl.terms)
    return expl


@dataclass
class BatchResult:
    explanations: dict
    errors: dict

    def __len__(self) -> int:
        return len(self.explanations)


def explain_all(index: PositionalIndex, topics: dict, runs: dict,
                params: ListwiseParams = ListwiseParams()) -> BatchResult:
    """Explain every topic's ranked list; per-query failures do not abort.

    Every topic qid must have a run; per-query explainer errors are
    captured into the error records instead of propagating.
    """
    missing = sorted(set(topics) - set(runs))
    if missing:
        raise ValueError(f"topics without runs: {', '.join(missing)}")
    explanations: dict[str, ListwiseExplanation] = {}
    errors: dict[str, str] = {}
    for qid in sorted(topics):
        query = Query.from_text(index, qid, topics[qid])
        try:
            explanations[qid] = explain_listwise(index, query, runs[qid], params)
        except Exception as exc:  # noqa: BLE001 - error records by contract
            errors[qid] = f"{type(exc).__name__}: {exc}"
    return BatchResult(explanations=explanations, errors=errors)
