"""Command-line entry point: ``expandertopo <command> ...``.

Exit codes: 0 success, 2 bad input or configuration, 3 numerical failure,
4 resource limit (sampling attempts or iteration budget exhausted).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .constructors import (
    RandomRegularParams,
    SamplingExhausted,
    circulant_regular,
    lps_graph,
    named_graph,
    random_regular,
)
from .experiments import (
    EXIT_CONFIG,
    EXIT_NUMERICAL,
    EXIT_OK,
    EXIT_RESOURCE,
    ConfigError,
    parse_config,
    read_costs,
    report_json,
    reproduce_tables,
    run_experiment,
    run_sweep,
    sweep_csv,
)
from .graph import GraphError, graph_to_dict, is_connected, read_graph, write_graph
from .mixing import MixingError
from .optimizers import Diverged, SimulationError
from .sparsifier import SparsifierError, SparsifierParams, bss_sparsify, loewner_sandwich_check
from .spectral import SpectralError, spectral_report


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_gen(args) -> int:
    kind = args.kind
    if kind == "lps":
        if args.p is None or args.q is None:
            raise ConfigError("lps needs --p and --q")
        g = lps_graph(args.p, args.q)
    elif kind == "random":
        if args.n is None or args.d is None:
            raise ConfigError("random needs --n and --d")
        g = random_regular(RandomRegularParams(args.n, args.d, args.seed or 0))
    elif kind == "circulant":
        if args.n is None or args.d is None:
            raise ConfigError("circulant needs --n and --d")
        g = circulant_regular(args.n, args.d, args.reading)
    else:
        if args.name is None:
            raise ConfigError("named needs --name")
        g = named_graph(args.name, args.n)
    if args.output:
        write_graph(g, args.output)
        print(json.dumps({"n": g.n, "edges": g.m, "output": args.output}))
    else:
        print(json.dumps(graph_to_dict(g)))
    return EXIT_OK


def cmd_spectral(args) -> int:
    g = read_graph(args.graph)
    if not is_connected(g):
        raise ConfigError(f"{args.graph}: graph is disconnected")
    rep = spectral_report(g)
    if args.json:
        _emit(report_json(rep, None, {"graph": args.graph}), args.output)
        return EXIT_OK
    lines = [f"{k}={v}" for k, v in rep.as_dict().items()]
    _emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK


def cmd_sparsify(args) -> int:
    g = read_graph(args.graph)
    mu = read_costs(args.costs) if args.costs else None
    params = SparsifierParams(args.d, mu)
    res = bss_sparsify(g, params)
    cert = loewner_sandwich_check(g, res.graph, params.ratio_bound)
    if args.output:
        write_graph(res.graph, args.output)
    summary = {
        "edges": res.graph.m,
        "edge_budget": params.d * (g.n - 1),
        "achieved_ratio": res.achieved_ratio,
        "ratio_bound": params.ratio_bound,
        "certificate": cert,
    }
    if args.json:
        print(json.dumps(summary, sort_keys=True))
    else:
        print(
            f"edges {summary['edges']} (budget {summary['edge_budget']}), "
            f"ratio {res.achieved_ratio:.6f} <= {params.ratio_bound:.6f}, certificate {'ok' if cert else 'FAILED'}"
        )
    return EXIT_OK if cert else EXIT_NUMERICAL


def cmd_simulate(args) -> int:
    flags = {
        "topology": args.graph,
        "problem": args.problem,
        "alpha": args.alpha,
        "theta1": args.theta1,
        "tol": args.tol,
        "seed": args.seed,
        "l_seed": args.l_seed,
        "max_iters": args.max_iters,
        "mu": args.costs,
        "trace_out": args.output,
        "report_out": args.report,
    }
    cfg = parse_config(args.config, **flags)
    res = run_experiment(cfg)
    tr = res.trace
    msg = {"algorithm": tr.algorithm, "status": tr.status, "k0": tr.stop_index, "per_round": tr.per_round}
    if tr.stopped:
        msg["total"] = tr.stop_index * tr.per_round
    print(json.dumps(msg, sort_keys=True) if args.json else " ".join(f"{k}={v}" for k, v in msg.items()))
    return res.exit_code


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def cmd_sweep(args) -> int:
    sources = args.sources.split(",") if args.sources else None
    rows = run_sweep(
        args.n, args.degrees, args.problem, args.alpha, args.theta1, args.tol,
        args.max_iters, seed=args.seed or 0, l_seed=args.l_seed, sources=sources,
    )
    config = {
        "n": args.n, "degrees": args.degrees, "problem": args.problem, "alpha": args.alpha,
        "theta1": args.theta1, "tol": args.tol, "max_iters": args.max_iters,
        "seed": args.seed or 0, "l_seed": args.l_seed, "sources": sources,
    }
    _emit(sweep_csv(rows, config), args.output)
    return EXIT_OK if any(r.argmin for r in rows) else EXIT_RESOURCE


def cmd_reproduce(args) -> int:
    rep = reproduce_tables(args.alpha, args.theta1, args.l_seed, args.tol, args.max_iters)
    _emit(rep.to_csv(), args.output)
    checks = {
        "kappa_matches": rep.kappa_matches(),
        "ordering_example1": rep.ordering_matches("example1"),
        "ordering_example2": rep.ordering_matches("example2"),
        "errors": rep.errors,
    }
    if args.output or args.json:
        print(json.dumps(checks, sort_keys=True) if args.json else checks)
    return EXIT_OK


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="machine-readable output")
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="RNG seed")
    return p


def _sim_opts(p: argparse.ArgumentParser) -> None:
    p.add_argument("--problem", choices=["ex1", "ex2", "quad", "example1", "example2", "quadratic_consensus"])
    p.add_argument("--alpha", type=float)
    p.add_argument("--theta1", type=float)
    p.add_argument("--tol", type=float)
    p.add_argument("--max-iters", type=int)
    p.add_argument("--l-seed", type=int)


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="expandertopo", parents=[common], description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", parents=[common], help="generate a graph")
    p.add_argument("--kind", required=True, choices=["lps", "random", "circulant", "named"])
    p.add_argument("--p", type=int)
    p.add_argument("--q", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--reading", default="shifted", choices=["shifted", "literal"])
    p.add_argument("--name", choices=["complete", "cycle", "path", "petersen"])
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("spectral", parents=[common], help="spectral report of a graph file")
    p.add_argument("graph")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_spectral)

    p = sub.add_parser("sparsify", parents=[common], help="cost-aware spectral sparsification")
    p.add_argument("graph")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--costs", help='JSON map {"u-v": cost}')
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_sparsify)

    p = sub.add_parser("simulate", parents=[common], help="run EXTRA / PG-EXTRA on a topology")
    p.add_argument("--graph", help="graph JSON file (overrides the config topology)")
    p.add_argument("--config", help="experiment config JSON")
    p.add_argument("--costs", help='JSON map {"u-v": cost}')
    _sim_opts(p)
    p.add_argument("-o", "--output", help="trace CSV")
    p.add_argument("--report", help="run report JSON")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", parents=[common], help="degree sweep ranked by total communication")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--degrees", type=_int_list, required=True)
    p.add_argument("--sources", help="comma list of lps,random,circulant (default: lps if possible, else random)")
    _sim_opts(p)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_sweep, problem="quad", alpha=0.5, theta1=0.5, tol=1e-6, max_iters=100_000)

    p = sub.add_parser("reproduce-tables", parents=[common], help="rerun the LPS vs circulant comparison")
    p.add_argument("--alpha", type=float, default=0.02)
    p.add_argument("--theta1", type=float, default=0.5)
    p.add_argument("--l-seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-3)
    p.add_argument("--max-iters", type=int, default=20_000)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    args.json = getattr(args, "json", False)
    args.seed = getattr(args, "seed", None)
    try:
        return args.func(args)
    except (SamplingExhausted,) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (ConfigError, GraphError, MixingError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (Diverged, SimulationError, SpectralError, SparsifierError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
