"""Semantic role labeling: BIO span decoding plus the transformers engine.

An engine turns a sentence into (tokens, tags) sequences with Propbank-style
BIO role tags (B-A0/I-A0, B-V/I-V, B-A1/I-A1, optionally sense-suffixed like
``B-V-love.01``). Decoding collapses those spans into (A0, verb, A1)
triplets; sentences without all three roles yield nothing.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

_SENT_SPLIT_RE = re.compile(r"(?<=[.!?])\s+")


def split_sentences(text: str) -> list[str]:
    parts = _SENT_SPLIT_RE.split(text.replace("\n", " "))
    return [p.strip() for p in parts if p.strip()]


@dataclass(frozen=True)
class Triplet:
    a0: str
    verb_sense: str
    a1: str
    bare_sense: bool


def _spans(tokens, tags, role):
    """Contiguous B-/I- spans for one role as (start, end, sense) tuples."""
    spans = []
    start = None
    sense = None
    for i, tag in enumerate(tags + ["O"]):
        parts = tag.split("-", 2)
        is_role = len(parts) >= 2 and parts[1] == role
        if is_role and parts[0] == "B":
            if start is not None:
                spans.append((start, i, sense))
            start = i
            sense = parts[2] if len(parts) > 2 else None
        elif not (is_role and parts[0] == "I"):
            if start is not None:
                spans.append((start, i, sense))
                start, sense = None, None
    return spans


def decode_triplets(tokens: list[str], tags: list[str]) -> list[Triplet]:
    """(A0, V, A1) tuples from one tagged sequence.

    Each verb span anchors one candidate triplet; its agent is the nearest
    A0 span before the verb (any A0 as fallback) and its patient the
    nearest A1 after (any A1 as fallback). Missing roles drop the verb.
    """
    if len(tokens) != len(tags):
        raise ValueError("tokens and tags must align")
    a0_spans = _spans(tokens, tags, "A0")
    a1_spans = _spans(tokens, tags, "A1")
    out = []
    for v_start, v_end, sense in _spans(tokens, tags, "V"):
        before = [s for s in a0_spans if s[1] <= v_start]
        agent = before[-1] if before else (a0_spans[0] if a0_spans else None)
        after = [s for s in a1_spans if s[0] >= v_end]
        patient = after[0] if after else (a1_spans[-1] if a1_spans else None)
        if agent is None or patient is None:
            continue
        verb_text = " ".join(tokens[v_start:v_end])
        out.append(Triplet(
            a0=" ".join(tokens[agent[0]:agent[1]]),
            verb_sense=sense if sense else verb_text,
            a1=" ".join(tokens[patient[0]:patient[1]]),
            bare_sense=sense is None,
        ))
    return out


class TransformersSrlEngine:
    """Token-classification SRL model loaded from the HuggingFace hub or a
    local path. Raises at construction when the model cannot be loaded."""

    def __init__(self, model_id: str, batch_size: int = 16, device: str = "cpu"):
        import torch
        from transformers import AutoModelForTokenClassification, AutoTokenizer

        self._torch = torch
        self.model_id = model_id
        self.batch_size = batch_size
        self.device = device
        self.tokenizer = AutoTokenizer.from_pretrained(model_id)
        self.model = AutoModelForTokenClassification.from_pretrained(model_id)
        self.model.to(device).eval()
        self.labels = self.model.config.id2label

    def tag(self, sentences: list[str]) -> list[tuple[list[str], list[str]]]:
        """Word-level (tokens, BIO tags) for each sentence."""
        out = []
        for i in range(0, len(sentences), self.batch_size):
            batch = [s.split() for s in sentences[i:i + self.batch_size]]
            enc = self.tokenizer(batch, is_split_into_words=True, truncation=True,
                                 padding=True, return_tensors="pt").to(self.device)
            with self._torch.no_grad():
                logits = self.model(**enc).logits
            pred = logits.argmax(dim=-1).cpu().tolist()
            for row, words in enumerate(batch):
                word_ids = enc.word_ids(batch_index=row)
                tags = ["O"] * len(words)
                seen = set()
                for position, word_id in enumerate(word_ids):
                    if word_id is None or word_id in seen:
                        continue  # first subword decides the word's tag
                    seen.add(word_id)
                    tags[word_id] = self.labels[pred[row][position]]
                out.append((words, tags))
        return out


def extract_from_documents(docs: list[dict], engine) -> tuple[list[dict], bool]:
    """Run SRL over sentence-split documents; returns (records, bare_senses)."""
    records = []
    any_bare = False
    for doc in docs:
        for sentence in split_sentences(doc["text"]):
            for tokens, tags in engine.tag([sentence]):
                for triplet in decode_triplets(tokens, tags):
                    any_bare |= triplet.bare_sense
                    records.append({
                        "doc_id": doc["id"],
                        "a0": triplet.a0,
                        "verb_sense": triplet.verb_sense,
                        "a1": triplet.a1,
                    })
    return records, any_bare
