"""``ingrass`` command-line interface.

Exit codes: 0 success, 2 usage error, 3 data error, 4 eigen-solver
non-convergence.
"""

import argparse
import json
import os
import sys

EXIT_USAGE, EXIT_DATA, EXIT_NOCONV = 2, 3, 4


class UsageError(Exception):
    pass


def _load_toml(path):
    if sys.version_info >= (3, 11):
        import tomllib
    else:
        import tomli as tomllib
    with open(path, "rb") as fh:
        return tomllib.load(fh)


def _emit(args, payload, rows=None, fieldnames=None):
    from .bench import csv_text

    text = json.dumps(payload, indent=2, sort_keys=True, default=float)
    if args.json:
        with open(args.json, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    if args.csv and rows is not None:
        with open(args.csv, "w") as fh:
            fh.write(csv_text(rows, fieldnames))


def cmd_setup(args):
    from .graph import load_matrix_market
    from .lrd import build_pair_index, lrd_decompose
    from .resistance import build_embedder
    from .setupfile import save_setup

    h0 = load_matrix_market(args.sparsifier)
    emb = build_embedder(h0, m=args.m, seed=args.seed)
    hier = lrd_decompose(h0, emb, levels=args.levels, growth=args.growth)
    idx = build_pair_index(h0, hier)
    save_setup(args.setup_out, h0, hier, idx, emb, meta={"source": os.path.basename(args.sparsifier)})
    _emit(args, {"n_nodes": h0.n_nodes, "n_edges": h0.n_edges, "levels": hier.levels,
                 "max_cluster_sizes": hier.max_cluster_sizes().tolist()})


def cmd_update(args):
    from .graph import write_matrix_market
    from .setupfile import load_setup
    from .stream import read_stream
    from .update import SparsifierState, ingrass_update

    h0, hier, idx, _, _ = load_setup(args.setup_in)
    state = SparsifierState.create(h0, hier, args.target_cond, idx, args.redistribute,
                                   args.filter_level)
    batches = read_stream(args.stream)
    summary = []
    log = open(args.events, "w") if args.events else None
    try:
        for i, batch in enumerate(batches):
            events = ingrass_update(state, batch)
            counts = {}
            for ev in events:
                counts[ev.decision.value] = counts.get(ev.decision.value, 0) + 1
                if log:
                    log.write(json.dumps({"iteration": i, **ev.to_dict()}) + "\n")
            summary.append({"iteration": i, "batch_size": len(batch), **counts,
                            "n_edges": state.n_edges})
    finally:
        if log:
            log.close()
    write_matrix_market(state.to_graph(), args.out_sparsifier)
    _emit(args, {"filter_level": state.filter_level, "iterations": summary},
          summary, ["iteration", "batch_size", "inserted", "merged", "redistributed", "n_edges"])


def cmd_eval(args):
    from .eval import condition_number_exact, condition_number_iterative
    from .graph import load_matrix_market

    g = load_matrix_market(args.graph)
    h = load_matrix_market(args.sparsifier)
    if args.method == "exact":
        rep = condition_number_exact(g, h)
    else:
        rep = condition_number_iterative(g, h, tol=args.tol, max_iter=args.max_iter,
                                         solver=args.solver, eig=args.eig, seed=args.seed,
                                         strict=True)
    _emit(args, rep.to_dict(), [rep.to_dict()], list(rep.to_dict()))


def cmd_sparsify(args):
    from .baseline import SparsifierConfig, baseline_sparsify
    from .graph import load_matrix_market, write_matrix_market

    g = load_matrix_market(args.graph)
    n = g.n_nodes
    if args.offtree is not None:
        cfg = SparsifierConfig.from_offtree(args.offtree, n, seed=args.seed, rounds=args.rounds)
    elif args.percent is not None:
        cfg = SparsifierConfig(args.percent / 100.0 * g.n_edges / n, args.seed, rounds=args.rounds)
    elif args.density is not None:
        cfg = SparsifierConfig(args.density, args.seed, rounds=args.rounds)
    else:
        raise UsageError("one of --density, --offtree, --percent is required")
    h = baseline_sparsify(g, cfg)
    write_matrix_market(h, args.out)
    _emit(args, {"n_nodes": n, "n_edges": h.n_edges, "density": h.n_edges / n})


def cmd_synth(args):
    from .graph import load_matrix_market
    from .stream import synth_stream, write_stream

    g = load_matrix_market(args.graph)
    h = load_matrix_market(args.sparsifier)
    batches = synth_stream(g, h, args.iterations, args.edges_per_iter, seed=args.seed,
                           mode=args.mode)
    write_stream(args.out, batches)
    _emit(args, {"iterations": len(batches), "edges": sum(len(b) for b in batches)})


def cmd_bench(args):
    from .bench import BenchRun, PipelineConfig, run_pipeline

    conf = dict(args.pipeline)
    for key in ("graph", "family", "n", "iterations", "stream_mode", "target_condition",
                "case_name", "events_path"):
        val = getattr(args, key, None)
        if val is not None:
            conf[key] = val
    conf["seed"] = args.seed
    cfg = PipelineConfig.from_dict(conf)
    run = run_pipeline(cfg, json_path=args.json)
    if not args.json:
        print(run.to_json())
    if args.csv:
        from .bench import csv_text
        with open(args.csv, "w") as fh:
            fh.write(csv_text([run.csv_row()], BenchRun.CSV_FIELDS))


def cmd_scaling(args):
    from .bench import SCALING_FIELDS, PipelineConfig, scaling_bench

    conf = dict(args.pipeline)
    conf["seed"] = args.seed
    rows = scaling_bench(args.sizes, PipelineConfig.from_dict(conf), repeats=args.repeats)
    _emit(args, {"rows": rows}, rows, SCALING_FIELDS)


GLOBAL = ("seed", "threads", "json", "csv", "config")


def _global_flags(parser, defaults):
    kw = (lambda d: {"default": d}) if defaults else (lambda d: {"default": argparse.SUPPRESS})
    parser.add_argument("--seed", type=int, **kw(0))
    parser.add_argument("--threads", type=int, help="thread cap for the numerical libraries",
                        **kw(None))
    parser.add_argument("--json", metavar="PATH", help="write the JSON result here", **kw(None))
    parser.add_argument("--csv", metavar="PATH", help="write a CSV summary here", **kw(None))
    parser.add_argument("--config", metavar="TOML", help="defaults for any flag; flags win",
                        **kw(None))


def build_parser():
    # global flags may appear before or after the subcommand; the copies on
    # the subcommands only set a value when given
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, defaults=False)
    p = argparse.ArgumentParser(prog="ingrass",
                                description="Incremental spectral graph sparsification.")
    _global_flags(p, defaults=True)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("setup", parents=[common], help="build the embedding and pair index")
    s.add_argument("--sparsifier", "--graph", dest="sparsifier", required=True)
    s.add_argument("--setup-out", required=True)
    s.add_argument("--m", type=int, default=8)
    s.add_argument("--levels", type=int, default=None)
    s.add_argument("--growth", type=float, default=2.0)
    s.set_defaults(func=cmd_setup)

    s = sub.add_parser("update", parents=[common], help="stream new edges through the filter")
    s.add_argument("--setup-in", required=True)
    s.add_argument("--stream", required=True)
    s.add_argument("--target-cond", type=float, required=True)
    s.add_argument("--out-sparsifier", required=True)
    s.add_argument("--events", default=None)
    s.add_argument("--redistribute", choices=("path", "uniform"), default="path")
    s.add_argument("--filter-level", type=int, default=None)
    s.set_defaults(func=cmd_update)

    s = sub.add_parser("eval", parents=[common], help="relative condition number")
    s.add_argument("--graph", required=True)
    s.add_argument("--sparsifier", required=True)
    s.add_argument("--method", choices=("exact", "iterative"), default="iterative")
    s.add_argument("--tol", type=float, default=1e-3)
    s.add_argument("--max-iter", type=int, default=2000)
    s.add_argument("--solver", choices=("cg", "direct"), default="cg")
    s.add_argument("--eig", choices=("power", "lanczos"), default="lanczos")
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("sparsify-baseline", parents=[common], help="initial sparsifier")
    s.add_argument("--graph", required=True)
    s.add_argument("--density", type=float, default=None, help="edges per node")
    s.add_argument("--offtree", type=float, default=None,
                   help="extra edges beyond a spanning tree, as a fraction of nodes")
    s.add_argument("--percent", type=float, default=None, help="percent of the graph's edges")
    s.add_argument("--rounds", type=int, default=0)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_sparsify)

    s = sub.add_parser("synth-stream", parents=[common], help="synthetic edge stream")
    s.add_argument("--graph", required=True)
    s.add_argument("--sparsifier", required=True)
    s.add_argument("--iterations", type=int, default=10)
    s.add_argument("--edges-per-iter", type=int, required=True)
    s.add_argument("--mode", choices=("complement", "nonedge", "local"), default="complement")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_synth)

    s = sub.add_parser("bench", parents=[common], help="end-to-end pipeline run")
    s.add_argument("--graph", default=None)
    s.add_argument("--family", default=None)
    s.add_argument("--n", type=int, default=None)
    s.add_argument("--iterations", type=int, default=None)
    s.add_argument("--stream-mode", default=None)
    s.add_argument("--target-condition", type=float, default=None)
    s.add_argument("--case-name", default=None)
    s.add_argument("--events-path", default=None)
    s.set_defaults(func=cmd_bench)

    s = sub.add_parser("scaling", parents=[common], help="runtime scaling table")
    s.add_argument("--sizes", type=int, nargs="*", default=[1 << 14, 1 << 16, 1 << 18])
    s.add_argument("--repeats", type=int, default=3)
    s.set_defaults(func=cmd_scaling)
    return p


def _apply_config(parser, argv):
    """Reparse ``argv`` with TOML values as defaults.

    Top-level keys set flags of every subcommand; a ``[pipeline]`` table
    feeds the bench/scaling pipeline config; a table named after the
    subcommand sets that subcommand's flags.
    """
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    file_conf = _load_toml(known.config) if known.config else {}
    pipeline = file_conf.pop("pipeline", {})
    flat = {k.replace("-", "_"): v for k, v in file_conf.items() if not isinstance(v, dict)}
    parser.set_defaults(**{k: v for k, v in flat.items() if k in GLOBAL})
    flat = {k: v for k, v in flat.items() if k not in GLOBAL}
    sub_tables = {k: v for k, v in file_conf.items() if isinstance(v, dict)}
    subparsers = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    for name, sp_ in subparsers.choices.items():
        dests = {a.dest for a in sp_._actions} - set(GLOBAL)
        conf = {k: v for k, v in flat.items() if k in dests}
        conf.update({k.replace("-", "_"): v for k, v in sub_tables.get(name, {}).items()})
        bad = set(conf) - dests
        if bad:
            raise UsageError(f"unknown config keys for {name}: {sorted(bad)}")
        for a in sp_._actions:
            if a.dest in conf:
                a.required = False
        sp_.set_defaults(**conf, pipeline=pipeline)
    return parser.parse_args(argv)


def main(argv=None):
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = _apply_config(parser, argv)
    except (UsageError, OSError, ValueError) as exc:
        print(f"ingrass: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.threads:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ[var] = str(args.threads)

    from .errors import IngrassError, NoConvergence

    try:
        args.func(args)
    except UsageError as exc:
        print(f"ingrass: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NoConvergence as exc:
        if exc.report is not None:
            print(json.dumps(exc.report.to_dict(), default=float))
        print(f"ingrass: no convergence: {exc}", file=sys.stderr)
        return EXIT_NOCONV
    except (IngrassError, OSError, ValueError) as exc:
        print(f"ingrass: data error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DATA
    return 0


if __name__ == "__main__":
    sys.exit(main())
