"""Readers/writers for the #nfv1 line-record formats.

These mirror the narrative-pipeline file contracts exactly (documents,
triplets, vectors); the adapter talks to the pipeline only through these
files, never through its internals.
"""
from __future__ import annotations

import json

import numpy as np

FORMAT_HEADER = "#nfv1"


class FormatError(ValueError):
    pass


def read_documents(path) -> list[dict]:
    docs = []
    with open(path, encoding="utf-8") as fh:
        first = fh.readline()
        if not first.startswith(FORMAT_HEADER):
            raise FormatError(f"{path}: missing {FORMAT_HEADER} header")
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            rec = json.loads(line)
            missing = {"id", "timestamp", "text"} - rec.keys()
            if missing:
                raise FormatError(f"{path}:{lineno}: missing fields {sorted(missing)}")
            docs.append(rec)
    return docs


def write_triplets(path, triplets: list[dict], senses: str = "tagged") -> None:
    """``senses`` records whether verb senses are model-tagged or bare lemmas."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{FORMAT_HEADER} triplets senses={senses}\n")
        for rec in triplets:
            fh.write(json.dumps(rec, ensure_ascii=False, sort_keys=True) + "\n")


def read_texts(path) -> list[str]:
    """Plain UTF-8 input for the embedder, one text per line."""
    with open(path, encoding="utf-8") as fh:
        return [line.rstrip("\n") for line in fh if line.strip()]


def write_vectors(path, texts: list[str], matrix: np.ndarray) -> None:
    path = str(path)
    matrix = np.asarray(matrix, dtype=float)
    if path.endswith(".npz"):
        np.savez(path, texts=np.array(texts, dtype=np.str_), vectors=matrix)
        return
    with open(path, "w", encoding="utf-8") as fh:
        spec = {"dim": int(matrix.shape[1]), "count": len(texts)}
        fh.write(f"{FORMAT_HEADER} vectors {json.dumps(spec, sort_keys=True)}\n")
        for text, row in zip(texts, matrix):
            rec = {"text": text, "vec": [float(x) for x in row]}
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")
