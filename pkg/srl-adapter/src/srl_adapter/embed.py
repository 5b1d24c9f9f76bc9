"""Sentence-embedding wrapper producing unit-norm vectors."""
from __future__ import annotations

import numpy as np


class SentenceEmbedder:
    """Pretrained sentence encoder (sentence-transformers model id or path)."""

    def __init__(self, model_id: str, batch_size: int = 32, device: str = "cpu"):
        from sentence_transformers import SentenceTransformer

        self.model_id = model_id
        self.batch_size = batch_size
        self.model = SentenceTransformer(model_id, device=device)

    @property
    def dim(self) -> int:
        return int(self.model.get_sentence_embedding_dimension())

    def embed(self, texts: list[str]) -> np.ndarray:
        vectors = self.model.encode(texts, batch_size=self.batch_size,
                                    convert_to_numpy=True,
                                    normalize_embeddings=True,
                                    show_progress_bar=False)
        return np.asarray(vectors, dtype=float)
