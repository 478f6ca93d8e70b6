"""Access to the bundled 20-document demo corpus and its topics."""

from __future__ import annotations

from importlib import resources


def demo_corpus_path() -> str:
    return str(resources.files("rankexplain").joinpath("data/demo_corpus.jsonl"))


def demo_topics_path() -> str:
    return str(resources.files("rankexplain").joinpath("data/demo_topics.tsv"))
