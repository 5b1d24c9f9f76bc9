"""Adapters from pretrained SRL / sentence-embedding models to the
narrative pipeline's #nfv1 input files."""

__version__ = "0.1.0"

from .embed import SentenceEmbedder
from .srl import (TransformersSrlEngine, Triplet, decode_triplets,
                  extract_from_documents, split_sentences)
