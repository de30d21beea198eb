"""Command-line entry point.

Subcommands: ``keyrate-curve``, ``generate``, ``optimize``,
``heuristic``, ``critical-cost``, ``compare``.  All randomness is
seeded, outputs are byte-deterministic given flags and seed, and
nothing is written outside ``--out``.  Exit codes: 0 success, 1 runtime
failure (with a machine-readable JSON line on stderr), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import experiments, heuristic, keyrate, milp, topology
from .config import ConfigError, RunConfig, load_config

__all__ = ["build_parser", "dispatch", "main"]


def _fmt(value: float | int | str) -> str:
    """CSV cell: floats get 12 significant digits."""
    if isinstance(value, bool):
        raise TypeError("no boolean cells in CSV outputs")
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def _write_csv(path: Path, header: str, rows: list[list]) -> None:
    lines = [header] + [",".join(_fmt(cell) for cell in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qkdcool",
        description="QKD network planning with shared detector cooling",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("keyrate-curve", help="secure key rate over length as CSV")
    p.add_argument("--regime", choices=("warm", "cold", "both"), required=True)
    p.add_argument("--max-km", type=float, required=True)
    p.add_argument("--step-km", type=float, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--config")

    p = sub.add_parser("generate", help="generate a random network graph")
    p.add_argument("--nodes", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--config")

    p = sub.add_parser("optimize", help="solve the placement program on a graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--cooling-cost", type=float, required=True)
    p.add_argument(
        "--fixed-cooling",
        help="comma-separated node ids to cool (pins the cooling variables)",
    )
    p.add_argument("--out", required=True)
    p.add_argument("--config")

    p = sub.add_parser("heuristic", help="degree sweep and its cost envelope")
    p.add_argument("--graph", required=True)
    p.add_argument("--k-max", type=int, default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--config")

    p = sub.add_parser("critical-cost", help="batch critical cooling costs")
    p.add_argument("--config")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=None, help="override base seed")
    p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("compare", help="batch optimal-vs-heuristic comparison")
    p.add_argument("--config")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=None, help="override base seed")
    p.add_argument("--jobs", type=int, default=1)

    return parser


def _cmd_keyrate_curve(args, config: RunConfig) -> int:
    if args.max_km < 0 or args.step_km <= 0:
        raise ValueError("--max-km must be >= 0 and --step-km > 0")
    warm = config.warm_link_params()
    cold = config.cold_link_params()
    rows = []
    i = 0
    while True:
        length = i * args.step_km
        if length > args.max_km + 1e-9:
            break
        row: list = [float(length)]
        if args.regime in ("warm", "both"):
            row.append(keyrate.secure_key_rate(length, warm).rate_per_second)
        else:
            row.append("")
        if args.regime in ("cold", "both"):
            row.append(keyrate.secure_key_rate(length, cold).rate_per_second)
        else:
            row.append("")
        rows.append(row)
        i += 1
    _write_csv(Path(args.out), "length_km,rate_warm_bps,rate_cold_bps", rows)
    return 0


def _cmd_generate(args, config: RunConfig) -> int:
    graph = topology.build_network(
        args.nodes,
        seed=args.seed,
        box_km=config.topology.box_km,
        target_degree=config.topology.target_mean_degree,
        min_rate_bps=config.topology.relay_min_rate_bps,
        warm_params=config.warm_link_params(),
        cold_params=config.cold_link_params(),
    )
    topology.save_graph(graph, args.out)
    return 0


def _solution_document(solution: milp.PlacementSolution) -> dict:
    equipped = []
    for (tail, head), count in zip(solution.equipped, solution.equip_multiplicity):
        equipped.extend([[tail, head]] * count)
    return {
        "objective": solution.objective,
        "equipped_links": equipped,
        "cooled_nodes": list(solution.cooled),
        "flows": [
            {
                "commodity": [f.source, f.dest],
                "edge": [f.tail, f.head],
                "bps": f.bps,
            }
            for f in solution.flows
        ],
        "status": solution.status,
    }


def _cmd_optimize(args, config: RunConfig) -> int:
    graph = topology.load_graph(args.graph)
    demands = milp.build_demands(graph, config.per_node_traffic_bps)
    model = milp.build_model(
        graph,
        demands,
        cooling_cost=args.cooling_cost,
        equip_mode=config.solver.equip_mode,
        integral_flows=config.solver.integral_flows,
    )
    if args.fixed_cooling is not None:
        cooled = tuple(
            int(item) for item in args.fixed_cooling.split(",") if item != ""
        )
        solution = milp.solve_with_fixed_cooling(
            model, cooled, node_budget=config.solver.node_budget
        )
    else:
        solution = milp.solve(model, node_budget=config.solver.node_budget)
    if solution.status == "optimal":
        report = milp.verify_solution(model, solution)
        if not report.ok:
            raise RuntimeError(f"solution failed verification: {report.violations}")
    Path(args.out).write_text(
        json.dumps(_solution_document(solution), indent=2) + "\n"
    )
    return 0


def _cmd_heuristic(args, config: RunConfig) -> int:
    graph = topology.load_graph(args.graph)
    demands = milp.build_demands(graph, config.per_node_traffic_bps)
    sweep_result = heuristic.sweep(
        graph, demands, k_max=args.k_max, node_budget=config.solver.node_budget
    )
    curve = heuristic.lower_envelope(sweep_result)
    lines = ["k,links"]
    for entry in sweep_result.entries:
        links = "" if entry.links is None else entry.links
        lines.append(f"{entry.k},{_fmt(links)}")
    lines.append("")
    lines.append("cc_from,cc_to,k_star,intercept,slope")
    for seg in curve.segments:
        lines.append(
            ",".join(
                _fmt(cell)
                for cell in [
                    seg.cc_from,
                    seg.cc_to,
                    seg.k_star,
                    seg.intercept,
                    seg.slope,
                ]
            )
        )
    Path(args.out).write_text("\n".join(lines) + "\n")
    return 0


def _experiment_config(args, config: RunConfig):
    exp = config.experiment_config()
    if args.seed is not None:
        from dataclasses import replace

        exp = replace(exp, base_seed=args.seed)
    return exp


def _cmd_critical_cost(args, config: RunConfig) -> int:
    exp = _experiment_config(args, config)
    result = experiments.run_batch(
        exp,
        jobs=args.jobs,
        warm_params=config.warm_link_params(),
        cold_params=config.cold_link_params(),
    )
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_csv(
        out_dir / "samples.csv",
        "graph_id,n,l0,l1,critical",
        [
            [s.graph_id, s.n_nodes, s.links_uncooled, s.links_one_cooled, s.critical_cost]
            for s in result.samples
        ],
    )
    _write_csv(
        out_dir / "stats.csv",
        "n,min,q1,median,q3,max",
        [
            [b.n_nodes, b.minimum, b.q1, b.median, b.q3, b.maximum]
            for b in result.stats
        ],
    )
    for failure in result.failures:
        print(f"warning: {failure}", file=sys.stderr)
    return 0


def _cmd_compare(args, config: RunConfig) -> int:
    exp = _experiment_config(args, config)
    comparisons, failures = experiments.compare_batch(
        exp,
        jobs=args.jobs,
        warm_params=config.warm_link_params(),
        cold_params=config.cold_link_params(),
    )
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    for comparison in comparisons:
        for point in comparison.points:
            rows.append(
                [
                    comparison.graph_id,
                    point.cooling_cost,
                    point.optimal_cost,
                    point.heuristic_cost,
                    point.ratio,
                ]
            )
    _write_csv(
        out_dir / "compare.csv",
        "graph_id,cc,optimal_cost,heuristic_cost,ratio",
        rows,
    )
    for failure in failures:
        print(f"warning: {failure}", file=sys.stderr)
    return 0


_COMMANDS = {
    "keyrate-curve": _cmd_keyrate_curve,
    "generate": _cmd_generate,
    "optimize": _cmd_optimize,
    "heuristic": _cmd_heuristic,
    "critical-cost": _cmd_critical_cost,
    "compare": _cmd_compare,
}


def dispatch(argv: list[str] | None = None) -> int:
    """Parse arguments and run one subcommand; returns the exit status."""
    args = build_parser().parse_args(argv)
    config = load_config(getattr(args, "config", None))
    return _COMMANDS[args.command](args, config)


def main(argv: list[str] | None = None) -> int:
    try:
        return dispatch(argv)
    except (ConfigError, ValueError, RuntimeError, OSError, KeyError) as exc:
        line = json.dumps(
            {"error": type(exc).__name__, "message": str(exc)}, sort_keys=True
        )
        print(line, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
