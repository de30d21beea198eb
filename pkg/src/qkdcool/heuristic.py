"""Degree-based cooling placement and its cost envelope.

Cooling pays off most where many links terminate, so the heuristic cools
the k highest-degree nodes (relays included, since they host detectors
too), solves the equipment placement with that cooling pinned, and
post-processes the per-k link counts into the lower envelope of the
lines ``L_k + k * C_C``.  The envelope names, for every cooling price,
the best topology over any number of cooled nodes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import milp
from .topology import NetworkGraph

__all__ = [
    "CostSweep",
    "SweepEntry",
    "CostCurve",
    "EnvelopeSegment",
    "rank_nodes_by_degree",
    "sweep",
    "lower_envelope",
    "heuristic_cost",
]


def rank_nodes_by_degree(graph: NetworkGraph) -> tuple[int, ...]:
    """Node ids by descending undirected degree, ascending id on ties."""
    if not graph.nodes:
        raise ValueError("graph has no nodes")
    degrees = graph.degrees()
    return tuple(sorted(degrees, key=lambda n: (-degrees[n], n)))


@dataclass(frozen=True)
class SweepEntry:
    """Result of one fixed-cooling solve: cool the top-k ranked nodes."""

    k: int
    cooled: tuple[int, ...]
    links: int | None
    status: str  # "optimal" | "infeasible"


@dataclass(frozen=True)
class CostSweep:
    """Per-k link counts; cooled sets are nested prefixes of the ranking."""

    entries: tuple[SweepEntry, ...]

    def links(self, k: int) -> int:
        entry = self.entries[k]
        if entry.links is None:
            raise ValueError(f"sweep entry k={k} is not optimal")
        return entry.links

    def optimal_entries(self) -> tuple[SweepEntry, ...]:
        return tuple(e for e in self.entries if e.status == "optimal")


def sweep(
    graph: NetworkGraph,
    demands: milp.DemandMatrix,
    k_max: int | None = None,
    node_budget: int = 500_000,
    model: milp.PlacementModel | None = None,
) -> CostSweep:
    """Solve the placement for each k in 0..k_max cooled top-degree nodes.

    Each solve seeds the next with the previous equipped set (extra
    cooling keeps it feasible), which speeds the chain up without
    touching optimality.
    """
    ranking = rank_nodes_by_degree(graph)
    if k_max is None:
        k_max = len(ranking)
    if k_max > len(ranking):
        raise ValueError("k_max exceeds node count")
    if model is None:
        model = milp.build_model(graph, demands, cooling_cost=0.0)
    entries: list[SweepEntry] = []
    previous_equipped: tuple[tuple[int, int], ...] | None = None
    for k in range(k_max + 1):
        cooled = ranking[:k]
        hints = [previous_equipped] if previous_equipped is not None else []
        solution = milp.solve_with_fixed_cooling(
            model, cooled, node_budget=node_budget, hints=hints
        )
        if solution.status == "optimal":
            entries.append(
                SweepEntry(
                    k=k,
                    cooled=tuple(sorted(cooled)),
                    links=solution.link_count,
                    status="optimal",
                )
            )
            previous_equipped = solution.equipped
        else:
            entries.append(
                SweepEntry(
                    k=k, cooled=tuple(sorted(cooled)), links=None, status="infeasible"
                )
            )
    return CostSweep(entries=tuple(entries))


@dataclass(frozen=True)
class EnvelopeSegment:
    """On [cc_from, cc_to) the best choice cools k_star nodes.

    Total cost on the segment is ``intercept + slope * C_C`` with
    ``intercept = L_{k*}`` and ``slope = k*``.
    """

    cc_from: float
    cc_to: float  # math.inf on the last segment
    k_star: int
    intercept: int
    slope: int


@dataclass(frozen=True)
class CostCurve:
    segments: tuple[EnvelopeSegment, ...]

    def cost_at(self, cooling_cost: float) -> float:
        seg = self.segment_at(cooling_cost)
        return seg.intercept + seg.slope * cooling_cost

    def segment_at(self, cooling_cost: float) -> EnvelopeSegment:
        if cooling_cost < 0:
            raise ValueError("cooling cost must be >= 0")
        for seg in self.segments:
            if seg.cc_from <= cooling_cost < seg.cc_to:
                return seg
        return self.segments[-1]


def lower_envelope(sweep_result: CostSweep) -> CostCurve:
    """Breakpoints of ``min_k (L_k + k * C_C)`` over C_C >= 0.

    Ties resolve towards the smaller k (fewer cryostats at equal cost).
    Requires at least the k=0 entry to be optimal, which holds whenever
    the instance is feasible at all (cooling only relaxes constraints).
    """
    entries = sweep_result.optimal_entries()
    if not entries or entries[0].k != 0:
        raise ValueError("lower envelope needs an optimal k=0 entry")
    lines = [(e.k, e.links) for e in entries]  # slope, intercept

    def value(line: tuple[int, int], cc: float) -> float:
        return line[1] + line[0] * cc

    # active line at cc = 0: smallest k among the minimizers
    current = min(lines, key=lambda line: (value(line, 0.0), line[0]))
    segments: list[EnvelopeSegment] = []
    cc_start = 0.0
    while True:
        crossings = []
        for line in lines:
            if line[0] >= current[0]:
                continue  # only smaller slopes can take over later
            # L_k' + k'*cc = L_k + k*cc  =>  cc = (L_k' - L_k) / (k - k')
            cc_cross = (line[1] - current[1]) / (current[0] - line[0])
            crossings.append((cc_cross, line[0], line))
        if not crossings:
            segments.append(
                EnvelopeSegment(
                    cc_from=cc_start,
                    cc_to=math.inf,
                    k_star=current[0],
                    intercept=current[1],
                    slope=current[0],
                )
            )
            return CostCurve(segments=tuple(segments))
        cc_next, _, line = min(crossings, key=lambda item: (item[0], item[1]))
        if cc_next > cc_start:
            segments.append(
                EnvelopeSegment(
                    cc_from=cc_start,
                    cc_to=cc_next,
                    k_star=current[0],
                    intercept=current[1],
                    slope=current[0],
                )
            )
            cc_start = cc_next
        current = line


def heuristic_cost(sweep_result: CostSweep, cooling_cost: float) -> tuple[float, int]:
    """Best total cost at one cooling price, and the k achieving it.

    Scans ``L_k + k * C_C`` over the optimal sweep entries; the smallest
    k wins ties.  Equals the lower envelope evaluated at ``cooling_cost``.
    """
    if cooling_cost < 0:
        raise ValueError("cooling cost must be >= 0")
    best_cost = math.inf
    best_k = -1
    for entry in sweep_result.optimal_entries():
        cost = entry.links + entry.k * cooling_cost
        if cost < best_cost - 1e-12:
            best_cost = cost
            best_k = entry.k
    if best_k < 0:
        raise ValueError("sweep has no optimal entries")
    return best_cost, best_k
