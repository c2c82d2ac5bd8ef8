"""Command line interface: ``hybridplace {gen,solve,exact,bench,report,validate}``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import bench
from .exact import MAX_NODES, exact_solve, exact_solve_bnb
from .graphio import read_graph, write_graph
from .instances import InstanceSpec, generate_instance, preset, table5_specs
from .metaheuristics import BpsoConfig, GaConfig, bpso_solve, ga_solve, greedy_solve
from .model import CostParams, density_percent, hq_from_fraction, total_hosting

DEFAULT_PARAMS = "40,20,10"


def _params(text: str) -> tuple[float, float, float]:
    try:
        alpha, beta1, beta2 = (float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected alpha,beta1,beta2, got {text!r}") from None
    return alpha, beta1, beta2


def _load_graph(source: str):
    """A graph file path, or a preset name such as ``G1``."""
    path = Path(source)
    if path.exists():
        return read_graph(path)
    if source.upper().startswith("G") and source[1:].isdigit():
        return generate_instance(preset(source))
    raise FileNotFoundError(f"no such graph file: {source}")


def _cost_params(args, graph) -> CostParams:
    alpha, beta1, beta2 = args.params
    if args.hq is not None:
        hq = args.hq
    elif args.hq_frac is not None:
        hq = hq_from_fraction(graph, args.hq_frac)
    else:
        hq = 0.0
    return CostParams(alpha, beta1, beta2, hq)


def _print_result(result, params):
    b = result.breakdown
    print(f"solver:      {result.solver_name}")
    print(f"placement:   {result.placement}")
    print(f"hq:          {params.hq:g}")
    print(f"feasible:    {str(result.feasible).lower()}")
    print(f"hosting:     {b.hosting:.6f}")
    print(f"public_comm: {b.public_comm:.6f}")
    print(f"hybrid_comm: {b.hybrid_comm:.6f}")
    print(f"total:       {b.total:.6f}")
    print(f"evaluations: {result.evaluations}")
    print(f"iterations:  {result.iterations}")
    print(f"wall_time:   {result.wall_time:.6f}")


def cmd_gen(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.nodes is not None:
        specs = [InstanceSpec(args.name, args.nodes, args.edges, args.hosting,
                              args.rate_min, args.rate_max, args.seed or 0)]
    else:
        names = args.preset or [s.name for s in table5_specs()]
        specs = [preset(name) for name in names]
        if args.seed is not None:
            specs = [s.with_seed(args.seed) for s in specs]
    suffix = ".json" if args.format == "json" else ".txt"
    for spec in specs:
        path = out / f"{spec.name}{suffix}"
        write_graph(generate_instance(spec), path, args.format)
        print(path)
    return 0


def cmd_solve(args) -> int:
    graph = _load_graph(args.graph)
    params = _cost_params(args, graph)
    seed = args.seed if args.seed is not None else 0
    if args.solver == "bpso":
        result = bpso_solve(graph, params, BpsoConfig(seed=seed, repair=args.constraint))
    elif args.solver == "ga":
        result = ga_solve(graph, params, GaConfig(seed=seed, repair=args.constraint))
    elif args.solver == "greedy":
        result = greedy_solve(graph, params)
    elif args.solver == "exact_bnb":
        result = exact_solve_bnb(graph, params, max_nodes=args.max_nodes)
    else:
        result = exact_solve(graph, params, max_nodes=args.max_nodes)
    _print_result(result, params)
    return 0


def cmd_exact(args) -> int:
    graph = _load_graph(args.graph)
    params = _cost_params(args, graph)
    solve = exact_solve_bnb if args.bnb else exact_solve
    result = solve(graph, params, max_nodes=args.max_nodes)
    _print_result(result, params)
    return 0 if result.feasible else 3


def cmd_bench(args) -> int:
    config = bench.SweepConfig.load(args.config)
    if args.repetitions is not None:
        config.repetitions = args.repetitions
    output = args.out or config.output or "results.csv"
    rows = bench.run_sweep(config, output)
    failed = sum(1 for r in rows if r.error)
    print(f"wrote {len(rows)} rows to {output} ({failed} failed)")
    if args.plot_dir and len(rows) > failed:
        bench.emit_plot_data(bench.summarize(rows), args.plot_dir)
    return 0


def cmd_report(args) -> int:
    rows = bench.read_csv(args.csv)
    summary = bench.summarize(rows)
    print(bench.format_summary(summary))
    if args.cells:
        print()
        print(summary.cells.to_string(index=False))
    if args.plot_dir:
        for path in bench.emit_plot_data(summary, args.plot_dir):
            print(path)
    return 0


def cmd_validate(args) -> int:
    graph = read_graph(args.graph)
    print(f"nodes:         {graph.n}")
    print(f"edges:         {len(graph.edges)}")
    print(f"total_hosting: {total_hosting(graph):g}")
    if graph.n >= 2:
        print(f"density:       {density_percent(graph):.2f}%")
    print("ok")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hybridplace", description="Hybrid-cloud service placement toolkit")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    solve_flags = argparse.ArgumentParser(add_help=False)
    solve_flags.add_argument("graph", help="graph file (JSON or edge list) or preset name G1..G10")
    solve_flags.add_argument("--seed", type=int)
    solve_flags.add_argument("--params", type=_params, default=_params(DEFAULT_PARAMS),
                             help="alpha,beta1,beta2 (default %(default)s)")
    hq = solve_flags.add_mutually_exclusive_group()
    hq.add_argument("--hq", type=float, help="absolute offload threshold in hosting units")
    hq.add_argument("--hq-frac", type=float, help="threshold as a fraction of total hosting")
    solve_flags.add_argument("--max-nodes", type=int, default=MAX_NODES,
                             help="enumeration guard for exact solvers (default %(default)s)")

    p = sub.add_parser("gen", help="write preset or custom instances")
    p.add_argument("--preset", action="append", help="preset name, repeatable (default: all ten)")
    p.add_argument("--out", default="graphs")
    p.add_argument("--format", choices=("json", "edgelist"), default="json")
    p.add_argument("--seed", type=int)
    p.add_argument("--name", default="custom")
    p.add_argument("--nodes", type=int)
    p.add_argument("--edges", type=int, default=0)
    p.add_argument("--hosting", type=int)
    p.add_argument("--rate-min", type=float, default=1.0)
    p.add_argument("--rate-max", type=float, default=50.0)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("solve", parents=[solve_flags], help="run one solver on one instance")
    p.add_argument("--solver", choices=("bpso", "ga", "greedy", "exact", "exact_bnb"), default="bpso")
    p.add_argument("--constraint", choices=("repair", "penalty"), default="repair")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("exact", parents=[solve_flags], help="optimal placement by exhaustive search")
    p.add_argument("--bnb", action="store_true", help="use branch and bound")
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("bench", help="run a benchmark sweep")
    p.add_argument("--config", default="default", help="YAML sweep file, or 'default'")
    p.add_argument("--out", help="CSV output path")
    p.add_argument("--repetitions", type=int)
    p.add_argument("--plot-dir")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("report", help="summarize a benchmark CSV")
    p.add_argument("csv")
    p.add_argument("--cells", action="store_true", help="also print per-cell statistics")
    p.add_argument("--plot-dir")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("validate", help="check a graph file")
    p.add_argument("graph")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if args.command == "gen" and args.nodes is not None and args.hosting is None:
        parser.error("--nodes requires --hosting")
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
