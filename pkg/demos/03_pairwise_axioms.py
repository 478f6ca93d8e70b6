"""
Pairwise explanations from retrieval axioms
===========================================

Which of two documents should rank higher for "exons definition biology",
and why? Each axiom answers with a ternary preference; the proximity
axioms additionally expose the per-term-pair distance table behind their
verdict.
"""

from rankexplain import (
    AXIOM_NAMES,
    AggregatedAxiom,
    Query,
    aggregate_preference,
    axiom_preference,
    build_index,
    demo_corpus_path,
    explain_details,
    read_corpus_jsonl,
    render_details,
)

index = build_index(read_corpus_jsonl(demo_corpus_path()))
query = Query.from_text(index, "2", "exons definition biology")
d1, d2 = "B1", "B2"

print(f"preferences for ({d1}, {d2}):")
for name in AXIOM_NAMES:
    value = axiom_preference(name, index, query, d1, d2)
    print(f"  {name:8s} {value:+d}")

# The detailed view: term frequencies, average distance per query-term
# pair, and the per-document mean of those averages.
print()
print(render_details(explain_details("PROX1", index, query, d1, d2)))

# Axioms can be combined; the sign of a weighted sum, or a majority vote.
agg = AggregatedAxiom(children=(("TFC1", 1.0), ("PROX1", 1.0), ("AND", 0.5)))
print("\nweighted aggregate:", aggregate_preference(agg, index, query, d1, d2))
majority = AggregatedAxiom(children=(("TFC1", 1.0), ("PROX1", 1.0), ("LNC1", 1.0)),
                           mode="majority")
print("majority aggregate:", aggregate_preference(majority, index, query, d1, d2))
