"""Command-line interface.

Subcommands: ``gen`` (synthetic graph/stream/queries to files), ``run``
(engine over an initial graph + stream + queries), ``oracle`` (brute-force
answers), ``verify`` (engine vs. recompute over a whole stream, first
divergence reported), ``bench`` (engine vs. naive recompute, CSV), and
``sweep`` (one parameter varied, CSV).

Every flag with a DSMATCH_* environment variable counterpart (the flag
name upper-cased, dashes to underscores, e.g. ``DSMATCH_SEED``) takes its
default from the environment when set.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .bench import RUN_COLUMNS, SWEEP_COLUMNS, SWEEP_PARAMS, rows_to_csv, run_engine, run_naive, sweep
from .errors import DsmatchError
from .generate import BenchConfig, LABEL_DISTRIBUTIONS
from .graph import dump_graph, dump_stream, load_graph, load_stream
from .matcher import QueryGraph, format_answers, format_delta
from .oracle import enumerate_matches, recompute_stream_check


def _env(name: str, default):
    return os.environ.get("DSMATCH_" + name.upper().replace("-", "_"), default)


def _add_config_args(p: argparse.ArgumentParser, n_default: int = 50_000) -> None:
    g = p.add_argument_group("scenario parameters")
    g.add_argument("--n", type=int, default=int(_env("n", n_default)), help="graph size |V|")
    g.add_argument("--avg-deg", type=float, default=float(_env("avg-deg", 5.0)))
    g.add_argument("--alphabet", type=int, default=int(_env("alphabet", 15)),
                   help="number of distinct labels")
    g.add_argument("--label-dist", choices=LABEL_DISTRIBUTIONS,
                   default=_env("label-dist", "uniform"))
    g.add_argument("--d", type=int, default=int(_env("d", 2)), help="label-vector arity")
    g.add_argument("--ratio", type=float, default=float(_env("ratio", 1000.0)),
                   help="beta/alpha ratio of the embedding relocation")
    g.add_argument("--mode", choices=("plain", "base", "zipf"),
                   default=_env("mode", "zipf"), help="embedding mode")
    g.add_argument("--m", type=int, default=int(_env("m", 3)), help="degree groups")
    g.add_argument("--k", type=int, default=int(_env("k", 5)), help="grid cells per dimension")
    g.add_argument("--query-count", type=int, default=int(_env("query-count", 100)))
    g.add_argument("--query-size", type=int, default=int(_env("query-size", 8)))
    g.add_argument("--query-avg-deg", type=float, default=float(_env("query-avg-deg", 3.0)))
    g.add_argument("--insertion-rate", type=float, default=float(_env("insertion-rate", 0.1)))
    g.add_argument("--deletion-rate", type=float, default=float(_env("deletion-rate", 0.0)))
    g.add_argument("--seed", type=int, default=int(_env("seed", 1)), help="master seed")
    g.add_argument("--salt", type=int, default=int(_env("salt", 0)), help="embedding seed salt")


def _config_from(args) -> BenchConfig:
    return BenchConfig(
        n_vertices=args.n,
        avg_deg=args.avg_deg,
        alphabet=args.alphabet,
        label_dist=args.label_dist,
        d=args.d,
        beta_alpha_ratio=args.ratio,
        mode=args.mode,
        m_groups=args.m,
        k_cells=args.k,
        query_count=args.query_count,
        query_size=args.query_size,
        query_avg_deg=args.query_avg_deg,
        insertion_rate=args.insertion_rate,
        deletion_rate=args.deletion_rate,
        master_seed=args.seed,
        seed_salt=args.salt,
    )


def _load_queries(paths: list[str]) -> list[QueryGraph]:
    files: list[Path] = []
    for p in map(Path, paths):
        if p.is_dir():
            files.extend(sorted(p.glob("*.txt")))
        else:
            files.append(p)
    return [QueryGraph.from_text(f.read_text()) for f in files]


def _inputs_from(args) -> tuple:
    """(g0, stream, queries) either from files or generated from flags."""
    if args.graph:
        g0 = load_graph(Path(args.graph).read_text())
        stream = load_stream(Path(args.stream).read_text()) if args.stream else []
        queries = _load_queries(args.queries or [])
        return g0, stream, queries, None
    cfg = _config_from(args)
    full = cfg.make_graph()
    g0, stream = cfg.make_split(full)
    queries = cfg.make_queries(full)
    return g0, stream, queries, cfg


def _add_input_args(p: argparse.ArgumentParser, n_default: int = 50_000) -> None:
    g = p.add_argument_group("inputs (files, or omit --graph to generate)")
    g.add_argument("--graph", help="initial graph file")
    g.add_argument("--stream", help="update stream file")
    g.add_argument("--queries", nargs="*", help="query files or directories")
    _add_config_args(p, n_default=n_default)


def cmd_gen(args) -> int:
    cfg = _config_from(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    full = cfg.make_graph()
    g0, stream = cfg.make_split(full)
    queries = cfg.make_queries(full)
    (out / "graph.txt").write_text(dump_graph(full))
    (out / "g0.txt").write_text(dump_graph(g0))
    (out / "stream.txt").write_text(dump_stream(stream))
    qdir = out / "queries"
    qdir.mkdir(exist_ok=True)
    for i, q in enumerate(queries):
        (qdir / f"q{i:03d}.txt").write_text(q.to_text())
    print(
        f"wrote {out}: |V|={full.num_vertices} |E|={full.num_edges} "
        f"stream={len(stream)} queries={len(queries)}"
    )
    return 0


def cmd_run(args) -> int:
    g0, stream, queries, cfg = _inputs_from(args)
    ecfg = cfg.embedding_config() if cfg else _config_from(args).embedding_config()
    metrics, engine = run_engine(
        g0, stream, queries, ecfg, m_groups=args.m, k_cells=args.k,
        deletion_mode=args.deletion_mode, collect_deltas=args.emit_deltas,
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for i, q in enumerate(queries):
        rq = engine.queries[f"q{i}"]
        text = format_answers(q, rq.answers.mappings())
        (out / f"answers_q{i:03d}.txt").write_text(text + ("\n" if text else ""))
    (out / "metrics.csv").write_text(rows_to_csv(RUN_COLUMNS, metrics.rows()))
    if args.emit_deltas:
        for i, q in enumerate(queries):
            name = f"q{i}"
            blocks = []
            for ts, deltas in metrics.delta_log:
                body = format_delta(q, deltas[name])
                if body:
                    blocks.append(f"# t={ts}\n{body}")
            (out / f"deltas_q{i:03d}.txt").write_text(
                "\n".join(blocks) + ("\n" if blocks else "")
            )
    if args.dump_synopses:
        Path(args.dump_synopses).write_text(engine.index.dump())
    print(
        f"{len(stream)} updates, {sum(len(engine.queries[f'q{i}'].answers) for i in range(len(queries)))} "
        f"final answers, total {metrics.total_seconds:.3f}s -> {out}"
    )
    return 0


def cmd_oracle(args) -> int:
    g = load_graph(Path(args.graph).read_text())
    queries = _load_queries(args.queries)
    for i, q in enumerate(queries):
        answers = enumerate_matches(g, q)
        print(f"# query {i}: {len(answers)} matches")
        text = format_answers(q, answers)
        if text:
            print(text)
    return 0


def cmd_verify(args) -> int:
    g0, stream, queries, _ = _inputs_from(args)
    ecfg = _config_from(args).embedding_config()
    report = recompute_stream_check(
        g0, stream, queries, ecfg, m_groups=args.m, k_cells=args.k
    )
    print(report.describe())
    return 0 if report.ok else 1


def cmd_bench(args) -> int:
    g0, stream, queries, cfg = _inputs_from(args)
    ecfg = cfg.embedding_config() if cfg else _config_from(args).embedding_config()
    engine_metrics, _ = run_engine(
        g0, stream, queries, ecfg, m_groups=args.m, k_cells=args.k
    )
    rows = engine_metrics.rows()
    if not args.skip_naive:
        naive_metrics = run_naive(g0, stream, queries)
        if naive_metrics.final_answers != engine_metrics.final_answers:
            print("warning: engine and naive final answers disagree", file=sys.stderr)
        rows += naive_metrics.rows()
        ratio = naive_metrics.total_seconds / max(engine_metrics.total_seconds, 1e-12)
        print(
            f"engine {engine_metrics.total_seconds:.3f}s vs naive "
            f"{naive_metrics.total_seconds:.3f}s ({ratio:.1f}x)"
        )
    csv_text = rows_to_csv(RUN_COLUMNS, rows)
    if args.out:
        Path(args.out).write_text(csv_text)
    else:
        print(csv_text, end="")
    return 0


def cmd_sweep(args) -> int:
    base = _config_from(args)
    rows = sweep(base, args.param, args.values)
    csv_text = rows_to_csv(SWEEP_COLUMNS, rows)
    if args.out:
        Path(args.out).write_text(csv_text)
    else:
        print(csv_text, end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="dsmatch",
        description="Exact continuous subgraph matching over dynamic labeled graphs.",
        epilog="Flag defaults can be set via DSMATCH_* environment variables.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a synthetic graph, stream, and queries")
    _add_config_args(g)
    g.add_argument("--out", required=True, help="output directory")
    g.set_defaults(func=cmd_gen)

    r = sub.add_parser("run", help="run the engine over a stream")
    _add_input_args(r)
    r.add_argument("--out", required=True, help="output directory")
    r.add_argument("--deletion-mode", choices=("index", "scan"), default="index")
    r.add_argument("--emit-deltas", action="store_true",
                   help="write per-update answer deltas alongside final answers")
    r.add_argument("--dump-synopses", help="write a synopsis cell dump to this file")
    r.set_defaults(func=cmd_run)

    o = sub.add_parser("oracle", help="brute-force answers on a snapshot")
    o.add_argument("--graph", required=True)
    o.add_argument("--queries", nargs="+", required=True)
    o.set_defaults(func=cmd_oracle)

    v = sub.add_parser("verify", help="engine vs full recompute over a stream")
    _add_input_args(v, n_default=200)
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("bench", help="engine vs naive per-update recompute")
    _add_input_args(b, n_default=1000)
    b.add_argument("--out", help="CSV output path (stdout when omitted)")
    b.add_argument("--skip-naive", action="store_true")
    b.set_defaults(func=cmd_bench)

    s = sub.add_parser("sweep", help="vary one parameter, one engine run per value")
    _add_config_args(s, n_default=1000)
    s.add_argument("--param", required=True, choices=sorted(SWEEP_PARAMS))
    s.add_argument("--values", nargs="+", required=True)
    s.add_argument("--out", help="CSV output path (stdout when omitted)")
    s.set_defaults(func=cmd_sweep)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DsmatchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
