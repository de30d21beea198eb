"""Batch studies over random network instances.

Reproduces three studies end to end: filtering random graphs for
uncooled feasibility, comparing the degree heuristic against the exact
optimum across a grid of cooling prices, and collecting critical-cost
statistics (how many link installations cooling a single node saves).

Every sample is reproducible: instance seeds derive from
``(base_seed, node_count, instance_index, attempt)`` through
``numpy.random.SeedSequence``, so a batch re-run with the same base seed
regenerates identical graphs and identical results, in any process.
Instances are independent, which makes batches embarrassingly parallel;
aggregation is by task order, so the worker count never changes output.
"""

from __future__ import annotations

import math
import multiprocessing
from dataclasses import dataclass, replace

import numpy as np

from . import heuristic, keyrate, milp, topology

__all__ = [
    "ExperimentConfig",
    "CriticalCostSample",
    "BoxStats",
    "BatchResult",
    "ComparePoint",
    "InstanceComparison",
    "CurveSegment",
    "GenerationFailureError",
    "derive_seed",
    "feasible_instance",
    "critical_cooling_cost",
    "box_stats",
    "run_batch",
    "compare_optimal_heuristic",
    "compare_batch",
    "optimal_cost_curve",
]


class GenerationFailureError(RuntimeError):
    """No feasible graph found within the attempt budget."""


def _default_cc_grid() -> tuple[float, ...]:
    return tuple(i * 0.5 for i in range(21))


@dataclass(frozen=True)
class ExperimentConfig:
    """Knobs for the batch studies; defaults give the standard setup."""

    node_counts: tuple[int, ...] = (5, 6, 7, 8, 9, 10)
    instances_per_count: int = 100
    base_seed: int = 1
    per_node_traffic_bps: float = 8000.0
    relay_min_rate_bps: float = 4000.0
    target_mean_degree: float = 3.5
    box_km: float = 100.0
    cc_grid: tuple[float, ...] = _default_cc_grid()
    attempt_budget: int = 1000
    node_budget: int = 500_000

    def __post_init__(self) -> None:
        if self.instances_per_count < 1:
            raise ValueError("instances_per_count must be >= 1")
        if any(n < 2 for n in self.node_counts):
            raise ValueError("node counts must be >= 2")
        if self.attempt_budget < 1 or self.node_budget < 1:
            raise ValueError("budgets must be >= 1")
        if any(cc < 0 for cc in self.cc_grid):
            raise ValueError("cooling costs must be >= 0")


def derive_seed(
    base_seed: int, n_nodes: int, instance_index: int, attempt: int
) -> int:
    """Stable per-attempt seed; independent streams for every tuple."""
    ss = np.random.SeedSequence(
        entropy=(int(base_seed), int(n_nodes), int(instance_index), int(attempt))
    )
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> 1)


def feasible_instance(
    config: ExperimentConfig,
    n_nodes: int,
    instance_index: int,
    warm_params: keyrate.LinkModelParams | None = None,
    cold_params: keyrate.LinkModelParams | None = None,
) -> topology.NetworkGraph:
    """Generate graphs until one supports the demands without cooling.

    Candidate graphs must be connected and admit a feasible uncooled
    flow with every link equipped (binary equipment).  The accepted
    graph records how many attempts it took.

    Raises:
        GenerationFailureError: attempt budget exhausted.
    """
    warm_params = warm_params or keyrate.warm_link_params()
    cold_params = cold_params or keyrate.cold_link_params()
    for attempt in range(config.attempt_budget):
        seed = derive_seed(config.base_seed, n_nodes, instance_index, attempt)
        graph = topology.build_network(
            n_nodes,
            seed=seed,
            box_km=config.box_km,
            target_degree=config.target_mean_degree,
            min_rate_bps=config.relay_min_rate_bps,
            warm_params=warm_params,
            cold_params=cold_params,
        )
        if not graph.is_connected():
            continue
        demands = milp.build_demands(graph, config.per_node_traffic_bps)
        model = milp.build_model(graph, demands, cooling_cost=0.0)
        if milp.uncooled_feasible(model):
            return topology.with_attempts(graph, attempt + 1)
    raise GenerationFailureError(
        f"no feasible graph for n={n_nodes}, instance={instance_index} "
        f"within {config.attempt_budget} attempts"
    )


@dataclass(frozen=True)
class CriticalCostSample:
    """Links saved by cooling one node: the break-even cooling price."""

    graph_id: str
    n_nodes: int
    links_uncooled: int
    links_one_cooled: int
    critical_cost: int


def critical_cooling_cost(
    graph: topology.NetworkGraph,
    demands: milp.DemandMatrix,
    graph_id: str = "",
    node_budget: int = 500_000,
    exact_single: bool = False,
    model: milp.PlacementModel | None = None,
) -> CriticalCostSample:
    """L_0 minus L_1: the cooling price below which one cooled node wins.

    L_1 cools the highest-degree node; with ``exact_single`` every
    single-node choice is tried and the best kept.
    """
    if model is None:
        model = milp.build_model(graph, demands, cooling_cost=0.0)
    uncooled = milp.solve_with_fixed_cooling(model, (), node_budget=node_budget)
    if uncooled.status != "optimal":
        raise ValueError("graph does not support the demands without cooling")
    l0 = uncooled.link_count
    ranking = heuristic.rank_nodes_by_degree(graph)
    candidates = ranking if exact_single else ranking[:1]
    l1 = None
    for node_id in candidates:
        sol = milp.solve_with_fixed_cooling(
            model, (node_id,), node_budget=node_budget, hints=[uncooled.equipped]
        )
        if sol.status != "optimal":
            continue
        if l1 is None or sol.link_count < l1:
            l1 = sol.link_count
    if l1 is None:
        raise RuntimeError("single-node cooling solve failed unexpectedly")
    return CriticalCostSample(
        graph_id=graph_id,
        n_nodes=len(graph.trusted_ids),
        links_uncooled=l0,
        links_one_cooled=l1,
        critical_cost=l0 - l1,
    )


@dataclass(frozen=True)
class BoxStats:
    """Five-number summary; quartiles exclude the median element."""

    n_nodes: int
    minimum: float
    q1: float
    median: float
    q3: float
    maximum: float


def _median(sorted_values: list[float]) -> float:
    m = len(sorted_values)
    if m % 2:
        return float(sorted_values[m // 2])
    return 0.5 * (sorted_values[m // 2 - 1] + sorted_values[m // 2])


def box_stats(n_nodes: int, values: list[int] | list[float]) -> BoxStats:
    """Min, quartiles and max with median-exclusive halves."""
    if not values:
        raise ValueError("box_stats needs at least one value")
    ordered = sorted(float(v) for v in values)
    if len(ordered) == 1:
        only = ordered[0]
        return BoxStats(n_nodes, only, only, only, only, only)
    half = len(ordered) // 2
    return BoxStats(
        n_nodes=n_nodes,
        minimum=ordered[0],
        q1=_median(ordered[:half]),
        median=_median(ordered),
        q3=_median(ordered[-half:]),
        maximum=ordered[-1],
    )


@dataclass(frozen=True)
class BatchResult:
    samples: tuple[CriticalCostSample, ...]
    stats: tuple[BoxStats, ...]
    failures: tuple[str, ...]


def _critical_worker(task) -> tuple[str, object]:
    config, n_nodes, index, warm_params, cold_params, exact_single = task
    graph_id = f"n{n_nodes}-i{index}"
    try:
        graph = feasible_instance(config, n_nodes, index, warm_params, cold_params)
        demands = milp.build_demands(graph, config.per_node_traffic_bps)
        sample = critical_cooling_cost(
            graph,
            demands,
            graph_id=graph_id,
            node_budget=config.node_budget,
            exact_single=exact_single,
        )
        return ("ok", sample)
    except Exception as exc:  # keep the batch alive, report afterwards
        return ("err", f"{graph_id}: {exc}")


def run_batch(
    config: ExperimentConfig,
    jobs: int = 1,
    warm_params: keyrate.LinkModelParams | None = None,
    cold_params: keyrate.LinkModelParams | None = None,
    exact_single: bool = False,
) -> BatchResult:
    """Critical-cost samples and per-size box statistics for the config.

    Per-instance failures are collected, not raised; output is a pure
    function of the config regardless of ``jobs``.
    """
    tasks = [
        (config, n, idx, warm_params, cold_params, exact_single)
        for n in config.node_counts
        for idx in range(config.instances_per_count)
    ]
    if jobs > 1:
        with multiprocessing.Pool(jobs) as pool:
            outcomes = pool.map(_critical_worker, tasks)
    else:
        outcomes = [_critical_worker(task) for task in tasks]
    samples: list[CriticalCostSample] = []
    failures: list[str] = []
    for kind, payload in outcomes:
        if kind == "ok":
            samples.append(payload)
        else:
            failures.append(payload)
    stats = []
    for n in config.node_counts:
        values = [s.critical_cost for s in samples if s.n_nodes == n]
        if values:
            stats.append(box_stats(n, values))
    return BatchResult(
        samples=tuple(samples), stats=tuple(stats), failures=tuple(failures)
    )


@dataclass(frozen=True)
class ComparePoint:
    cooling_cost: float
    optimal_cost: float
    heuristic_cost: float
    ratio: float


@dataclass(frozen=True)
class InstanceComparison:
    graph_id: str
    points: tuple[ComparePoint, ...]


def compare_optimal_heuristic(
    graph: topology.NetworkGraph,
    demands: milp.DemandMatrix,
    cc_grid: tuple[float, ...],
    node_budget: int = 500_000,
) -> tuple[ComparePoint, ...]:
    """Optimal versus heuristic total cost across a cooling-price grid.

    The heuristic side evaluates the lower envelope of the degree sweep;
    the optimal side solves the free-cooling program at every grid
    point (the previous point's optimum seeds the next solve).
    """
    model = milp.build_model(graph, demands, cooling_cost=0.0)
    sweep_result = heuristic.sweep(graph, demands, node_budget=node_budget, model=model)
    points: list[ComparePoint] = []
    previous: milp.PlacementSolution | None = None
    for cc in cc_grid:
        model_cc = milp.with_cooling_cost(model, cc)
        hints = []
        if previous is not None and previous.status == "optimal":
            hints.append((previous.equipped, previous.cooled))
        optimal = milp.solve(model_cc, node_budget=node_budget, hints=hints)
        if optimal.status != "optimal":
            raise ValueError("instance must be feasible for comparison")
        h_cost, _ = heuristic.heuristic_cost(sweep_result, cc)
        points.append(
            ComparePoint(
                cooling_cost=cc,
                optimal_cost=optimal.objective,
                heuristic_cost=h_cost,
                ratio=h_cost / optimal.objective,
            )
        )
        previous = optimal
    return tuple(points)


def _compare_worker(task) -> tuple[str, object]:
    config, n_nodes, index, warm_params, cold_params = task
    graph_id = f"n{n_nodes}-i{index}"
    try:
        graph = feasible_instance(config, n_nodes, index, warm_params, cold_params)
        demands = milp.build_demands(graph, config.per_node_traffic_bps)
        points = compare_optimal_heuristic(
            graph, demands, config.cc_grid, node_budget=config.node_budget
        )
        return ("ok", InstanceComparison(graph_id=graph_id, points=points))
    except Exception as exc:
        return ("err", f"{graph_id}: {exc}")


def compare_batch(
    config: ExperimentConfig,
    jobs: int = 1,
    warm_params: keyrate.LinkModelParams | None = None,
    cold_params: keyrate.LinkModelParams | None = None,
) -> tuple[tuple[InstanceComparison, ...], tuple[str, ...]]:
    """Run the optimal-vs-heuristic comparison over the whole config."""
    tasks = [
        (config, n, idx, warm_params, cold_params)
        for n in config.node_counts
        for idx in range(config.instances_per_count)
    ]
    if jobs > 1:
        with multiprocessing.Pool(jobs) as pool:
            outcomes = pool.map(_compare_worker, tasks)
    else:
        outcomes = [_compare_worker(task) for task in tasks]
    comparisons: list[InstanceComparison] = []
    failures: list[str] = []
    for kind, payload in outcomes:
        if kind == "ok":
            comparisons.append(payload)
        else:
            failures.append(payload)
    return tuple(comparisons), tuple(failures)


@dataclass(frozen=True)
class CurveSegment:
    """One linear piece of the exact optimal cost curve.

    Cost on [cc_from, cc_to) is ``links + cooled * C_C``; the slope is
    the number of cooled nodes of the optimal topology there.
    """

    cc_from: float
    cc_to: float
    links: int
    cooled: int


def optimal_cost_curve(
    model: milp.PlacementModel,
    cc_max: float | None = None,
    node_budget: int = 500_000,
) -> tuple[CurveSegment, ...]:
    """Exact optimal cost as a function of the cooling price.

    The optimum over binary placements is the pointwise minimum of
    finitely many lines ``links + cooled * C_C``, hence concave and
    piecewise linear; recursive bisection on crossing points recovers
    every segment with a handful of solves.  ``cc_max`` defaults to one
    above the uncooled cost, beyond which the curve is provably flat.
    """

    def solve_at(cc: float) -> tuple[int, int]:
        sol = milp.solve(milp.with_cooling_cost(model, cc), node_budget=node_budget)
        if sol.status != "optimal":
            raise ValueError("instance must be feasible for curve construction")
        return sol.link_count, len(sol.cooled)

    def value(line: tuple[int, int], cc: float) -> float:
        return line[0] + line[1] * cc

    segments: list[CurveSegment] = []

    def refine(cc_lo, line_lo, cc_hi, line_hi) -> None:
        if line_lo == line_hi or cc_hi - cc_lo < 1e-9:
            segments.append(CurveSegment(cc_lo, cc_hi, line_lo[0], line_lo[1]))
            return
        # distinct optimal lines must differ in slope (same-slope lines
        # with different intercept cannot both be optimal)
        cc_cross = (line_hi[0] - line_lo[0]) / (line_lo[1] - line_hi[1])
        cc_cross = min(max(cc_cross, cc_lo), cc_hi)
        line_mid = solve_at(cc_cross)
        if value(line_mid, cc_cross) >= value(line_lo, cc_cross) - 1e-6:
            segments.append(CurveSegment(cc_lo, cc_cross, line_lo[0], line_lo[1]))
            segments.append(CurveSegment(cc_cross, cc_hi, line_hi[0], line_hi[1]))
            return
        refine(cc_lo, line_lo, cc_cross, line_mid)
        refine(cc_cross, line_mid, cc_hi, line_hi)

    line_zero = solve_at(0.0)
    if cc_max is None:
        uncooled = milp.solve_with_fixed_cooling(model, (), node_budget=node_budget)
        if uncooled.status != "optimal":
            raise ValueError("instance must be feasible for curve construction")
        cc_max = uncooled.link_count + 1.0
    line_end = solve_at(cc_max)
    refine(0.0, line_zero, cc_max, line_end)

    merged: list[CurveSegment] = []
    for seg in segments:
        if merged and (merged[-1].links, merged[-1].cooled) == (seg.links, seg.cooled):
            merged[-1] = replace(merged[-1], cc_to=seg.cc_to)
        elif seg.cc_to > seg.cc_from:
            merged.append(seg)
    return tuple(merged)
