"""
Indexing and ranking the bundled demo corpus
============================================

Builds the positional index over the 20-document demo corpus, inspects a
few collection statistics, and ranks every bundled topic with the three
sparse models.
"""

from rankexplain import (
    BM25Ranker,
    LMDirRanker,
    LMJMRanker,
    Query,
    build_index,
    demo_corpus_path,
    demo_topics_path,
    load_topics,
    rank,
    read_corpus_jsonl,
)

corpus = read_corpus_jsonl(demo_corpus_path())
index = build_index(corpus)
print(f"{index.n_docs} documents, {len(index.vocabulary)} distinct terms, "
      f"avg length {index.avgdl:.1f} tokens")

# Positions refer to the analyzed token stream: stopwords are removed
# before positions are assigned, which matters for the proximity axioms.
print("positions of 'sanuk' in T1:", index.positions("sanuk", "T1"))
print("df/cf of 'thai':", index.df("thai"), index.cf("thai"))

topics = load_topics(demo_topics_path())
for qid, text in topics.items():
    query = Query.from_text(index, qid, text)
    print(f"\nquery {qid}: {text!r} -> analyzed {list(query.terms)}")
    for ranker in (BM25Ranker(index), LMJMRanker(index), LMDirRanker(index)):
        ranked = rank(index, ranker, query, depth=5)
        row = ", ".join(f"{e.docid}:{e.score:.2f}" for e in ranked.entries[:3])
        print(f"  {ranker.name:5s} top-3: {row}")
