"""srl-adapter: produce pipeline input files from raw text.

Stateless and file-driven: ``extract`` reads a documents file and writes a
triplets file; ``embed`` reads texts (one per line) and writes a vectors
file. A model that fails to load exits nonzero without writing anything.
"""
from __future__ import annotations

import argparse
import sys

from .embed import SentenceEmbedder
from .formats import read_documents, read_texts, write_triplets, write_vectors
from .srl import TransformersSrlEngine, extract_from_documents

DEFAULT_EMBED_MODEL = "sentence-transformers/all-mpnet-base-v2"


def cmd_extract(args) -> int:
    docs = read_documents(args.infile)
    engine = TransformersSrlEngine(args.model, batch_size=args.batch_size)
    records, any_bare = extract_from_documents(docs, engine)
    write_triplets(args.outfile, records, senses="bare" if any_bare else "tagged")
    print(f"[extract] {len(records)} triplets from {len(docs)} documents "
          f"-> {args.outfile}")
    return 0


def cmd_embed(args) -> int:
    texts = read_texts(args.infile)
    embedder = SentenceEmbedder(args.model or DEFAULT_EMBED_MODEL,
                                batch_size=args.batch_size)
    matrix = embedder.embed(texts)
    write_vectors(args.outfile, texts, matrix)
    print(f"[embed] {len(texts)} texts at dimension {matrix.shape[1]} "
          f"-> {args.outfile}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="srl-adapter",
                                     description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="documents file -> triplets file")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", dest="outfile", required=True)
    p.add_argument("--model", required=True, help="token-classification SRL model id/path")
    p.add_argument("--batch-size", type=int, default=16)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("embed", help="texts file -> vectors file")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", dest="outfile", required=True)
    p.add_argument("--model", help=f"sentence encoder id/path (default {DEFAULT_EMBED_MODEL})")
    p.add_argument("--batch-size", type=int, default=32)
    p.set_defaults(func=cmd_embed)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # noqa: BLE001 - CLI boundary, no partial files
        print(f"[{args.command}] error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
