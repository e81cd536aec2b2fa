"""Command-line entry point: ``pvbyte {gen,build,query,verify,density,jumps}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time

import numpy as np

from . import analysis, synth
from .errors import PVByteError
from .index import STRATEGIES, Collection, build_index, read_index, write_index
from .partition import DEFAULT_EPS1, DEFAULT_EPS2, DEFAULT_F
from .query import parse_queries, run_benchmark

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_IO = 2

log = logging.getLogger("pvbyte")


def _collection(path: str) -> Collection:
    base = path[: -len(".docs")] if path.endswith(".docs") else path
    return Collection.from_basename(base)


def cmd_gen(args) -> int:
    cfg = synth.SynthConfig(
        num_docs=args.num_docs,
        num_terms=args.num_terms,
        dense_fraction=args.dense_fraction,
        seed=args.seed,
        zipf_exponent=args.zipf,
        run_length=args.run_length,
    )
    synth.write_synthetic(args.output, cfg)
    if args.num_queries:
        queries = synth.random_queries(cfg.num_terms, args.num_queries, seed=args.seed)
        synth.write_queries(f"{args.output}.queries", queries)
    print(json.dumps(cfg.as_dict()))
    return EXIT_OK


def cmd_build(args) -> int:
    collection = _collection(args.collection)
    start = time.perf_counter()
    index = build_index(collection, args.strategy, args.F, args.block, args.eps1, args.eps2)
    elapsed = time.perf_counter() - start
    write_index(index, args.output)
    space = index.space()
    print(
        f"strategy={index.strategy} F={index.header_bits} terms={index.num_terms} "
        f"postings={space['postings']} docs_bpi={space['docs_bpi']:.3f} "
        f"freqs_bpi={space['freqs_bpi']:.3f} total_bpi={space['total_bpi']:.3f} "
        f"build_s={elapsed:.2f}"
    )
    return EXIT_OK


def cmd_query(args) -> int:
    index = read_index(args.index)
    queries = parse_queries(args.queries)
    report = run_benchmark(index, queries, args.repetitions)
    print(report.table())
    if args.records:
        with open(args.records, "w") as fh:
            fh.write(report.records() + "\n")
    return EXIT_OK


def cmd_verify(args) -> int:
    index = read_index(args.index)
    collection = _collection(args.collection)
    checked = 0
    for term in collection:
        if term.term_id >= index.num_terms:
            print(f"FAIL: index has {index.num_terms} lists, collection has more")
            return EXIT_INVALID
        cursor, freqs = index.get_list(term.term_id)
        if not np.array_equal(cursor.seq.decode(), term.docs):
            print(f"FAIL: docs of term {term.term_id} differ")
            return EXIT_INVALID
        if term.freqs is not None and not np.array_equal(freqs.all(), term.freqs):
            print(f"FAIL: freqs of term {term.term_id} differ")
            return EXIT_INVALID
        checked += 1
    if checked != index.num_terms:
        print(f"FAIL: index has {index.num_terms} lists, collection {checked}")
        return EXIT_INVALID
    print(f"OK, {checked} lists")
    return EXIT_OK


def cmd_density(args) -> int:
    report = analysis.density(_collection(args.collection), args.block, tuple(args.thresholds))
    print(report.table())
    return EXIT_OK


def cmd_jumps(args) -> int:
    index = read_index(args.index)
    hist = analysis.jump_histogram(index, parse_queries(args.queries))
    print(hist.table())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pvbyte", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a seeded synthetic collection")
    p.add_argument("--output", required=True, help="basename for .docs/.freqs(/.queries)")
    p.add_argument("--num-docs", type=int, default=1_000_000)
    p.add_argument("--num-terms", type=int, default=5_000)
    p.add_argument("--dense-fraction", type=float, default=0.7)
    p.add_argument("--zipf", type=float, default=1.0)
    p.add_argument("--run-length", type=int, default=4096)
    p.add_argument("--num-queries", type=int, default=0)
    p.add_argument("--seed", type=int, default=42)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("build", help="build an index from a collection")
    p.add_argument("collection", help="collection basename (or the .docs file)")
    p.add_argument("--output", required=True)
    p.add_argument("--strategy", choices=STRATEGIES, default="optimal")
    p.add_argument("--F", type=int, default=DEFAULT_F, help="per-partition header bits")
    p.add_argument("--block", type=int, default=128, help="block size for --strategy uniform")
    p.add_argument("--eps1", type=float, default=DEFAULT_EPS1)
    p.add_argument("--eps2", type=float, default=DEFAULT_EPS2)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("query", help="time AND queries against an index")
    p.add_argument("index")
    p.add_argument("--queries", required=True)
    p.add_argument("--repetitions", type=int, default=3)
    p.add_argument("--records", help="write per-query JSON lines here")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("verify", help="decode every list and compare with the collection")
    p.add_argument("index")
    p.add_argument("collection")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("density", help="dense/sparse block census by list size")
    p.add_argument("collection")
    p.add_argument("--block", type=int, default=128)
    p.add_argument("--thresholds", type=int, nargs=2, default=(10_000, 7_000_000),
                   metavar=("SHORT", "LONG"))
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("jumps", help="histogram of NextGEQ jump sizes during AND queries")
    p.add_argument("index")
    p.add_argument("--queries", required=True)
    p.set_defaults(func=cmd_jumps)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (PVByteError, ValueError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
