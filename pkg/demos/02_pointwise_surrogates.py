"""
Pointwise explanations with local surrogates
============================================

Why does BM25 give document T1 its score for the Thai daily-life query?
The pointwise explainers perturb the document, re-score the perturbed
variants, and fit a weighted ridge surrogate over term-presence bits.
The signed coefficients are the explanation.
"""

from rankexplain import (
    BM25Ranker,
    PointwiseParams,
    Query,
    SamplerConfig,
    build_index,
    demo_corpus_path,
    exs_explain,
    lirme_explain,
    rank,
    read_corpus_jsonl,
    visualize_terms,
)

index = build_index(read_corpus_jsonl(demo_corpus_path()))
ranker = BM25Ranker(index)
query = Query.from_text(index, "1", "what is the daily life of thai people")

# LIRME-style: regress the raw scores. Three samplers are available;
# the tf-idf sampler knocks out informative terms more often.
for kind in ("random", "masking", "tfidf"):
    params = PointwiseParams(
        sampler=SamplerConfig(kind=kind, rate=0.3, chunk=2, n_samples=200, seed=7),
        n_terms=5,
    )
    expl = lirme_explain(index, ranker, query, "T1", params)
    print(f"\nLIRME with the {kind} sampler:")
    print(visualize_terms(expl, fmt="text"))

# EXS-style: the surrogate target is rank-aware. Here: did the perturbed
# document still beat the score at rank 5?
base_list = rank(index, ranker, query, depth=5)
params = PointwiseParams(sampler=SamplerConfig(seed=7), exs_variant="topk_binary",
                         exs_k=5, n_terms=5)
expl = exs_explain(index, ranker, query, "T1", params, base_list)
print("\nEXS (topk_binary targets):")
print(visualize_terms(expl, fmt="text"))

# The JSON form round-trips and is what the CLI emits.
print("\nJSON form:")
print(visualize_terms(expl, fmt="json"))
