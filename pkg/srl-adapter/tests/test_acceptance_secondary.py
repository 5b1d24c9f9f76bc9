"""Adapter acceptance checks that need live pretrained models.

These exercise the published checkpoints end to end; in offline
environments they skip with the hub-unreachable reason (the decode logic
and file contracts they rely on are covered model-free elsewhere).
"""
import itertools

import numpy as np
import pytest

from conftest import needs_model_hub

SRL_MODEL = "Riccorl/bert-base-srl-en"  # any token-classification SRL checkpoint
EMBED_MODEL = "sentence-transformers/all-mpnet-base-v2"


@needs_model_hub
def test_coffee_shop_sentence_yields_example_triplet():
    from srl_adapter.srl import TransformersSrlEngine, extract_from_documents

    engine = TransformersSrlEngine(SRL_MODEL)
    docs = [{"id": "d0", "timestamp": 0.0, "text": "I love this coffee shop."}]
    records, _ = extract_from_documents(docs, engine)
    assert any(r["a0"].lower() == "i" and "coffee shop" in r["a1"].lower()
               and r["verb_sense"].startswith("love") for r in records), records


@needs_model_hub
def test_paraphrase_pairs_beat_cross_event_pairs():
    from srl_adapter.embed import SentenceEmbedder

    events = {
        "emergency": [
            "the who declares a global health emergency",
            "a global health emergency is proclaimed by the who",
            "the who announces a worldwide health crisis",
        ],
        "olympics": [
            "the olympic committee postpones the tokyo summer games",
            "the tokyo olympics are delayed by the organizers",
            "organizers push the summer games to next year",
        ],
        "relief": [
            "the senate passes a two trillion dollar relief package",
            "lawmakers approve a huge economic rescue bill",
            "a giant stimulus package is cleared by the senate",
        ],
    }
    embedder = SentenceEmbedder(EMBED_MODEL)
    texts = [t for variants in events.values() for t in variants]
    labels = [name for name, variants in events.items() for _ in variants]
    vectors = embedder.embed(texts)
    assert np.allclose(np.linalg.norm(vectors, axis=1), 1.0, atol=1e-6)

    wins = total = 0
    pairs = list(itertools.combinations(range(len(texts)), 2))
    same = [(i, j) for i, j in pairs if labels[i] == labels[j]]
    cross = [(i, j) for i, j in pairs if labels[i] != labels[j]]
    for (i, j), (k, l) in itertools.product(same, cross):
        total += 1
        wins += float(vectors[i] @ vectors[j]) > float(vectors[k] @ vectors[l])
    assert wins / total >= 0.9
