"""
Listwise explanations: approximating an opaque ranking
======================================================

A hidden-intent ranker (BM25 plus three secret weighted terms) stands in
for an opaque second-stage model. The listwise explainers try to recover
an expanded query that makes plain BM25 reproduce its ranking, and we
can check how often they rediscover the hidden terms.
"""

from rankexplain import (
    BM25Ranker,
    HiddenIntentRanker,
    Query,
    bfs_explain,
    build_index,
    build_preference_matrix,
    demo_corpus_path,
    generate_candidates,
    greedy_explain,
    intent_exs_explain,
    multiplex_explain,
    rank,
    read_corpus_jsonl,
    sample_pairs,
    show_matrix,
)
from rankexplain.rankers import LMDirRanker, LMJMRanker
from rankexplain.rng import XorShift64Star

index = build_index(read_corpus_jsonl(demo_corpus_path()))
base = BM25Ranker(index)

# The opaque ranker has a hidden cross-topic intent: it strongly favors
# exon-related content and market scenes, whatever the query says.
hidden = [("exon", 3.0), ("market", 2.5), ("sanuk", 2.0)]
opaque = HiddenIntentRanker(base, hidden)
query = Query.from_text(index, "1", "what is the daily life of thai people")
ranked = rank(index, opaque, query, pool=index.doc_ids(), depth=10)
print("opaque ranking:", ranked.docids)

candidates = generate_candidates(index, ranked, top_k=10, n_candidates=25)
print("top candidates:", [c.term for c in candidates[:8]])

# Direct family: search for terms whose BM25 re-ranking matches the list.
greedy = greedy_explain(index, base, query, ranked, candidates, m_max=4, p=0.9)
print(f"\ngreedy -> {greedy.terms}  rbo@0.9={greedy.fidelity['rbo@0.9']:.3f} "
      f"({greedy.evaluations_used} evaluations)")
bfs = bfs_explain(index, base, query, ranked, candidates, m_max=4, p=0.9,
                  eval_budget=800)
print(f"bfs    -> {bfs.terms}  rbo@0.9={bfs.fidelity['rbo@0.9']:.3f} "
      f"({bfs.evaluations_used} evaluations)")
print("hidden terms recovered by bfs:", sorted(set(bfs.terms) & {t for t, _ in hidden}))

# Preference-pair family: cover as many sampled document pairs as possible.
pairs = sample_pairs(ranked, "uniform", 25, XorShift64Star(0))
matrix = build_preference_matrix(
    index, [base, LMJMRanker(index), LMDirRanker(index)], candidates, pairs)
multiplex = multiplex_explain(matrix, m_min=2, m_max=5)
print(f"\nmultiplex -> {multiplex.terms}  coverage={multiplex.fidelity['coverage']:.2f}")

single = build_preference_matrix(index, [base], candidates, pairs)
intent = intent_exs_explain(single, m_min=2, m_max=5)
print(f"intent_exs -> {intent.terms}  coverage={intent.fidelity['coverage']:.2f}")

# A single pair's column answers "why is this document above that one".
print("\nmatrix column for the first sampled pair:")
print(show_matrix(single, pair_filter=pairs[0]))
