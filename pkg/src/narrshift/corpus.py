"""Document/triplet data model, tokenization, TF-IDF features, and file I/O.

The corpus layer is deliberately dumb: it never runs any model. Triplets
arrive pre-extracted (from the synthetic generator or an external SRL
adapter) through the versioned ``#nfv1`` line-record formats defined here.
"""
from __future__ import annotations

import json
import math
import re
from collections import Counter
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone

import numpy as np
from scipy import sparse

FORMAT_HEADER = "#nfv1"

DAY_SECONDS = 86400.0


class CorpusFormatError(ValueError):
    """Raised when an #nfv1 file is structurally invalid."""


# ---------------------------------------------------------------------------
# data model
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Document:
    """One timestamped post. ``timestamp`` is UTC epoch seconds."""

    id: str
    timestamp: float
    text: str
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.id:
            raise ValueError("document id must be non-empty")
        if not math.isfinite(self.timestamp):
            raise ValueError(f"document {self.id!r}: timestamp must be finite")
        if not self.text.strip():
            raise ValueError(f"document {self.id!r}: text empty after trim")

    @property
    def day(self) -> int:
        return int(math.floor(self.timestamp / DAY_SECONDS))


@dataclass(frozen=True)
class NarrativeTriplet:
    """(agent, verb sense, patient) fragment tied to a source document.

    ``frame`` stays empty until a frame map is applied; afterwards it is the
    coarse verb class used for aggregation.
    """

    a0: str
    verb_sense: str
    a1: str
    doc_id: str
    timestamp: float
    frame: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (self.a0 and self.verb_sense and self.a1):
            raise ValueError("triplet a0/verb_sense/a1 must be non-empty")

    def with_frame(self, frame: str) -> "NarrativeTriplet":
        return replace(self, frame=frame)

    def key(self) -> tuple[str, str, str]:
        """Aggregation key: (a0, frame-or-sense, a1)."""
        return (self.a0, self.frame or self.verb_sense, self.a1)

    def render(self) -> str:
        """The triplet as a sentence, e.g. ``"you support macron"``."""
        return " ".join(self.key())


# ---------------------------------------------------------------------------
# tokenization
# ---------------------------------------------------------------------------

_RT_PREFIX_RE = re.compile(r"^\s*rt\s+@\w+\s*:?\s*", re.IGNORECASE)
_URL_RE = re.compile(r"(?:https?://|www\.)\S+")
_MENTION_RE = re.compile(r"@\w+")
# word runs (with inner apostrophes) or single non-space/non-word symbols
_TOKEN_RE = re.compile(r"[\w]+(?:'[\w]+)*|[^\w\s]", re.UNICODE)
_ASCII_PUNCT = set("!\"#$%&'()*+,-./:;<=>?@[\\]^_`{|}~")


def tokenize(text: str) -> list[str]:
    """Lowercased word tokens with URLs, @-mentions and punctuation stripped.

    Retweet prefixes (``RT @user:``) are dropped, hashtag bodies are kept
    (``#covid`` -> ``covid``), emoji and other non-punctuation symbols
    survive as single-character tokens. Empty input gives an empty list.
    """
    text = _RT_PREFIX_RE.sub("", text)
    text = _URL_RE.sub(" ", text)
    text = _MENTION_RE.sub(" ", text)
    tokens = []
    for tok in _TOKEN_RE.findall(text.lower()):
        if len(tok) == 1 and tok in _ASCII_PUNCT:
            continue
        tokens.append(tok)
    return tokens


# ---------------------------------------------------------------------------
# vocabulary and TF-IDF
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Vocabulary:
    """Top-N tokens by total term frequency, with document frequencies.

    Indices are dense ``0..len-1`` in (-tf, token) order, so a vocabulary
    truncated to its first ``k`` entries equals the vocabulary built with
    ``size=k`` directly.
    """

    index: dict
    df: dict
    n_docs: int

    def __len__(self) -> int:
        return len(self.index)

    def truncate(self, size: int) -> "Vocabulary":
        if size >= len(self.index):
            return self
        kept = [t for t, i in sorted(self.index.items(), key=lambda kv: kv[1])[:size]]
        return Vocabulary(
            index={t: i for i, t in enumerate(kept)},
            df={t: self.df[t] for t in kept},
            n_docs=self.n_docs,
        )


def build_vocabulary(docs: list[Document], size: int = 5000) -> Vocabulary:
    """Keep the ``size`` most frequent tokens (total term frequency).

    Frequency ties break lexicographically ascending. A corpus with fewer
    distinct tokens than ``size`` keeps everything.
    """
    if not docs:
        raise ValueError("cannot build a vocabulary from an empty corpus")
    if size < 1:
        raise ValueError("vocabulary size must be >= 1")
    tf: Counter = Counter()
    df: Counter = Counter()
    for doc in docs:
        toks = tokenize(doc.text)
        tf.update(toks)
        df.update(set(toks))
    ranked = sorted(tf, key=lambda t: (-tf[t], t))[:size]
    return Vocabulary(
        index={t: i for i, t in enumerate(ranked)},
        df={t: df[t] for t in ranked},
        n_docs=len(docs),
    )


@dataclass(frozen=True)
class FeatureVector:
    """Sparse L2-normalized TF-IDF vector (strictly increasing indices)."""

    indices: np.ndarray
    weights: np.ndarray
    dim: int

    def norm(self) -> float:
        return float(np.sqrt(np.sum(self.weights ** 2)))

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.dim)
        out[self.indices] = self.weights
        return out


def tfidf_transform(doc: Document, vocab: Vocabulary) -> FeatureVector:
    """Smoothed TF-IDF: ``tf * (ln((1+N)/(1+df)) + 1)``, then L2-normalized.

    Out-of-vocabulary tokens are ignored; a document with no in-vocabulary
    tokens maps to the zero vector.
    """
    counts = Counter(t for t in tokenize(doc.text) if t in vocab.index)
    if not counts:
        return FeatureVector(np.empty(0, dtype=np.int32), np.empty(0), len(vocab))
    n = vocab.n_docs
    idx = np.array(sorted(vocab.index[t] for t in counts), dtype=np.int32)
    by_index = {vocab.index[t]: (c, vocab.df[t]) for t, c in counts.items()}
    w = np.array(
        [by_index[i][0] * (math.log((1 + n) / (1 + by_index[i][1])) + 1.0) for i in idx]
    )
    w /= np.sqrt(np.sum(w ** 2))
    return FeatureVector(idx, w, len(vocab))


def featurize(docs: list[Document], vocab: Vocabulary) -> sparse.csr_matrix:
    """TF-IDF matrix (n_docs x |vocab|) in document order."""
    indptr = [0]
    indices: list[int] = []
    data: list[float] = []
    for doc in docs:
        fv = tfidf_transform(doc, vocab)
        indices.extend(int(i) for i in fv.indices)
        data.extend(float(x) for x in fv.weights)
        indptr.append(len(indices))
    return sparse.csr_matrix(
        (np.asarray(data), np.asarray(indices, dtype=np.int32), np.asarray(indptr)),
        shape=(len(docs), len(vocab)),
    )


def timestamps(docs: list[Document]) -> np.ndarray:
    return np.array([d.timestamp for d in docs])


# ---------------------------------------------------------------------------
# #nfv1 file formats (JSON lines with a version header)
# ---------------------------------------------------------------------------

_DOC_FIELDS = {"id", "timestamp", "text", "meta"}
_TRIPLET_FIELDS = {"doc_id", "a0", "verb_sense", "a1", "frame", "meta"}


def _parse_timestamp(value) -> float:
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        dt = datetime.fromisoformat(value.replace("Z", "+00:00"))
        if dt.tzinfo is None:
            dt = dt.replace(tzinfo=timezone.utc)
        return dt.timestamp()
    raise CorpusFormatError(f"unparseable timestamp: {value!r}")


def _read_records(path) -> list[tuple[int, dict]]:
    with open(path, encoding="utf-8") as fh:
        first = fh.readline().rstrip("\n")
        if not first.startswith(FORMAT_HEADER):
            raise CorpusFormatError(f"{path}: missing {FORMAT_HEADER} header line")
        records = []
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"{path}:{lineno}: bad JSON record: {exc}") from exc
            if not isinstance(rec, dict):
                raise CorpusFormatError(f"{path}:{lineno}: record is not an object")
            records.append((lineno, rec))
    return records


def read_documents(path) -> list[Document]:
    """Load a documents file; raises CorpusFormatError on structural problems."""
    docs = []
    seen = set()
    for lineno, rec in _read_records(path):
        missing = {"id", "timestamp", "text"} - rec.keys()
        if missing:
            raise CorpusFormatError(f"{path}:{lineno}: missing fields {sorted(missing)}")
        if rec["id"] in seen:
            raise CorpusFormatError(f"{path}:{lineno}: duplicate document id {rec['id']!r}")
        seen.add(rec["id"])
        docs.append(
            Document(
                id=str(rec["id"]),
                timestamp=_parse_timestamp(rec["timestamp"]),
                text=str(rec["text"]),
                meta=dict(rec.get("meta") or {}),
            )
        )
    return docs


def write_documents(path, docs: list[Document]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(FORMAT_HEADER + " documents\n")
        for d in docs:
            rec = {"id": d.id, "timestamp": d.timestamp, "text": d.text}
            if d.meta:
                rec["meta"] = d.meta
            fh.write(json.dumps(rec, ensure_ascii=False, sort_keys=True) + "\n")


def read_triplets(path, docs: list[Document] | None = None) -> list[NarrativeTriplet]:
    """Load a triplets file; when ``docs`` is given, doc_ids must resolve."""
    by_id = {d.id: d for d in docs} if docs is not None else None
    out = []
    for lineno, rec in _read_records(path):
        missing = {"doc_id", "a0", "verb_sense", "a1"} - rec.keys()
        if missing:
            raise CorpusFormatError(f"{path}:{lineno}: missing fields {sorted(missing)}")
        ts = rec.get("timestamp")
        meta = dict(rec.get("meta") or {})
        if by_id is not None:
            doc = by_id.get(rec["doc_id"])
            if doc is None:
                raise CorpusFormatError(
                    f"{path}:{lineno}: doc_id {rec['doc_id']!r} not in corpus"
                )
            ts = doc.timestamp
            meta = {**doc.meta, **meta}
        out.append(
            NarrativeTriplet(
                a0=str(rec["a0"]),
                verb_sense=str(rec["verb_sense"]),
                a1=str(rec["a1"]),
                doc_id=str(rec["doc_id"]),
                timestamp=float(ts) if ts is not None else math.nan,
                frame=str(rec.get("frame") or ""),
                meta=meta,
            )
        )
    return out


def write_triplets(path, triplets: list[NarrativeTriplet]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(FORMAT_HEADER + " triplets\n")
        for t in triplets:
            rec = {"doc_id": t.doc_id, "a0": t.a0, "verb_sense": t.verb_sense, "a1": t.a1}
            if t.frame:
                rec["frame"] = t.frame
            if t.meta:
                rec["meta"] = t.meta
            fh.write(json.dumps(rec, ensure_ascii=False, sort_keys=True) + "\n")


def lint_file(path, kind: str) -> list[str]:
    """Schema warnings (not errors) for a documents or triplets file.

    Flags unknown record fields and, for documents, non-numeric timestamps
    that needed ISO-8601 parsing. Returns an empty list for a clean file.
    """
    known = _DOC_FIELDS if kind == "documents" else _TRIPLET_FIELDS
    warnings = []
    for lineno, rec in _read_records(path):
        extra = set(rec.keys()) - known
        if extra:
            warnings.append(f"{path}:{lineno}: unknown fields {sorted(extra)}")
        if kind == "documents" and isinstance(rec.get("timestamp"), str):
            try:
                _parse_timestamp(rec["timestamp"])
            except (CorpusFormatError, ValueError):
                warnings.append(f"{path}:{lineno}: unparseable timestamp")
    return warnings
