"""Cooling-aware QKD equipment placement as a mixed-integer program.

Given a capacity-annotated :class:`~qkdcool.topology.NetworkGraph` and a
demand matrix, the model picks which directed links to equip (binary
``delta`` per directed edge) and which nodes to cool (binary ``xi`` per
node) so that a multicommodity key flow covers every pairwise demand at
minimum cost ``sum(delta) + C_C * sum(xi)``.

One commodity exists per unordered trusted pair {i, j}, realized as the
coupled ordered flow families x^(i,j) and x^(j,i); keys are symmetric,
so a single joint source equation lets any mix of the two directions
cover the pair demand.  The constraint families:

1. cold capacity, per directed edge e:
       sum_flows x_e - delta_e * c_cold_e <= 0
2. warm capacity with cooling relaxation, per directed edge (n, m):
       sum_flows x_(n,m) - xi_m * sum(K) - delta_(n,m) * c_warm_(n,m) <= 0
   (detectors sit at the receiving node, so cooling m lifts the warm cap
   of inbound edges; the cold cap always binds)
3. joint source equation, per unordered pair {i, j}:
       sum_n x^(i,j)_(i,n) + sum_n x^(j,i)_(n,i) = K_ij + K_ji
4. flow conservation of each ordered family at every other node
5. no flow of (i, j) back into its source i
6. no flow of (i, j) out of its destination j
7. domains: xi binary; delta binary (or bounded integer when
   ``equip_mode="integer"``); flows continuous and non-negative

Flows are relaxed to continuous reals: the objective carries no flow
term, so the optimum is unchanged while solves get far cheaper.
``integral_flows=True`` restores integer flows in bit/s units.

Solutions come from the deterministic branch-and-bound in
:mod:`qkdcool.bnb` and can be re-checked constraint by constraint with
:func:`verify_solution`, which shares no code with the model builder.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

from .bnb import BudgetExceededError, MilpProblem, MilpResult, solve_milp
from .topology import DirectedEdge, NetworkGraph

__all__ = [
    "DemandMatrix",
    "PlacementModel",
    "PlacementSolution",
    "FlowAssignment",
    "Violation",
    "VerificationReport",
    "BudgetExceededError",
    "build_demands",
    "build_model",
    "with_cooling_cost",
    "solve",
    "solve_with_fixed_cooling",
    "uncooled_feasible",
    "verify_solution",
    "export_lp",
]

FLOW_EPS = 1e-6  # flows below this are treated as zero in reports


@dataclass(frozen=True, eq=False)
class DemandMatrix:
    """Required key rate per ordered pair of trusted nodes, in bit/s."""

    node_ids: tuple[int, ...]
    rates: np.ndarray  # dense, indexed by position in node_ids

    def __post_init__(self) -> None:
        t = len(self.node_ids)
        if self.rates.shape != (t, t):
            raise ValueError("rates must be square over node_ids")
        if np.any(self.rates < 0):
            raise ValueError("demands must be >= 0")

    def index_of(self, node_id: int) -> int:
        return self.node_ids.index(node_id)

    def rate(self, i: int, j: int) -> float:
        """Demand from node id ``i`` to node id ``j``."""
        return float(self.rates[self.index_of(i), self.index_of(j)])

    def total(self) -> float:
        return float(self.rates.sum())

    def unordered_pairs(self) -> tuple[tuple[int, int], ...]:
        ids = self.node_ids
        return tuple(
            (ids[a], ids[b]) for a in range(len(ids)) for b in range(a + 1, len(ids))
        )


def build_demands(graph: NetworkGraph, per_node_traffic_bps: float) -> DemandMatrix:
    """Full demand matrix: each trusted node spreads its traffic evenly.

    K_ij = per_node_traffic / (t - 1) for all ordered trusted pairs, so
    every row sums to the per-node traffic.  Relays carry no demand.
    """
    trusted = graph.trusted_ids
    if len(trusted) < 2:
        raise ValueError("need at least 2 trusted nodes for demands")
    if per_node_traffic_bps < 0:
        raise ValueError("per-node traffic must be >= 0")
    t = len(trusted)
    rates = np.full((t, t), per_node_traffic_bps / (t - 1))
    np.fill_diagonal(rates, 0.0)
    return DemandMatrix(node_ids=tuple(trusted), rates=rates)


@dataclass(frozen=True, eq=False)
class PlacementModel:
    """The assembled program plus every index map needed to read it."""

    graph: NetworkGraph
    demands: DemandMatrix
    cooling_cost: float
    equip_mode: str
    integral_flows: bool
    edges: tuple[DirectedEdge, ...]
    pairs: tuple[tuple[int, int], ...]
    orderings: tuple[tuple[int, int], ...]  # two per pair, pair-major
    delta_offset: int
    xi_offset: int
    n_vars: int
    delta_upper: np.ndarray
    c: np.ndarray
    a_ub: sp.csr_matrix
    b_ub: np.ndarray
    a_eq: sp.csr_matrix
    b_eq: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    integral: np.ndarray

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def flow_col(self, ordering_idx: int, edge_idx: int) -> int:
        return ordering_idx * len(self.edges) + edge_idx

    def delta_col(self, edge_idx: int) -> int:
        return self.delta_offset + edge_idx

    def xi_col(self, node_id: int) -> int:
        return self.xi_offset + node_id


def build_model(
    graph: NetworkGraph,
    demands: DemandMatrix,
    cooling_cost: float,
    equip_mode: str = "binary",
    integral_flows: bool = False,
) -> PlacementModel:
    """Assemble objective, constraints and bounds for one placement run."""
    if equip_mode not in ("binary", "integer"):
        raise ValueError("equip_mode must be 'binary' or 'integer'")
    if cooling_cost < 0:
        raise ValueError("cooling_cost must be >= 0")
    edges = graph.directed_edges()
    n_edges = len(edges)
    n_nodes = len(graph.nodes)
    pairs = demands.unordered_pairs()
    orderings: list[tuple[int, int]] = []
    for i, j in pairs:
        orderings.append((i, j))
        orderings.append((j, i))

    n_flow = len(orderings) * n_edges
    delta_offset = n_flow
    xi_offset = n_flow + n_edges
    n_vars = xi_offset + n_nodes

    total_demand = demands.total()
    if equip_mode == "binary":
        delta_upper = np.ones(n_edges)
    else:
        delta_upper = np.array(
            [max(1.0, math.ceil(total_demand / e.capacity_warm)) for e in edges]
        )

    c = np.zeros(n_vars)
    c[delta_offset:xi_offset] = 1.0
    c[xi_offset:] = cooling_cost

    lower = np.zeros(n_vars)
    upper = np.full(n_vars, np.inf)
    upper[delta_offset:xi_offset] = delta_upper
    upper[xi_offset:] = 1.0

    integral = np.zeros(n_vars, dtype=bool)
    integral[delta_offset:] = True
    if integral_flows:
        integral[:n_flow] = True

    out_edges: dict[int, list[int]] = {n.id: [] for n in graph.nodes}
    in_edges: dict[int, list[int]] = {n.id: [] for n in graph.nodes}
    for e_idx, edge in enumerate(edges):
        out_edges[edge.tail].append(e_idx)
        in_edges[edge.head].append(e_idx)

    rows_ub: list[int] = []
    cols_ub: list[int] = []
    vals_ub: list[float] = []
    # rows 0..n_edges-1: cold capacity; rows n_edges..2n_edges-1: warm
    for o_idx in range(len(orderings)):
        for e_idx in range(n_edges):
            col = o_idx * n_edges + e_idx
            rows_ub.append(e_idx)
            cols_ub.append(col)
            vals_ub.append(1.0)
            rows_ub.append(n_edges + e_idx)
            cols_ub.append(col)
            vals_ub.append(1.0)
    for e_idx, edge in enumerate(edges):
        rows_ub.append(e_idx)
        cols_ub.append(delta_offset + e_idx)
        vals_ub.append(-edge.capacity_cold)
        rows_ub.append(n_edges + e_idx)
        cols_ub.append(delta_offset + e_idx)
        vals_ub.append(-edge.capacity_warm)
        rows_ub.append(n_edges + e_idx)
        cols_ub.append(xi_offset + edge.head)
        vals_ub.append(-total_demand)
    a_ub = sp.csr_matrix(
        (vals_ub, (rows_ub, cols_ub)), shape=(2 * n_edges, n_vars)
    )
    b_ub = np.zeros(2 * n_edges)

    rows_eq: list[int] = []
    cols_eq: list[int] = []
    vals_eq: list[float] = []
    b_eq: list[float] = []
    row = 0
    # joint source equation per unordered pair
    for p_idx, (i, j) in enumerate(pairs):
        o_fwd = 2 * p_idx
        o_rev = 2 * p_idx + 1
        for e_idx in out_edges[i]:
            rows_eq.append(row)
            cols_eq.append(o_fwd * n_edges + e_idx)
            vals_eq.append(1.0)
        for e_idx in in_edges[i]:
            rows_eq.append(row)
            cols_eq.append(o_rev * n_edges + e_idx)
            vals_eq.append(1.0)
        b_eq.append(demands.rate(i, j) + demands.rate(j, i))
        row += 1
    # conservation of each ordered family at every intermediate node
    for o_idx, (s, t) in enumerate(orderings):
        for node in graph.nodes:
            n = node.id
            if n == s or n == t:
                continue
            for e_idx in out_edges[n]:
                rows_eq.append(row)
                cols_eq.append(o_idx * n_edges + e_idx)
                vals_eq.append(1.0)
            for e_idx in in_edges[n]:
                rows_eq.append(row)
                cols_eq.append(o_idx * n_edges + e_idx)
                vals_eq.append(-1.0)
            b_eq.append(0.0)
            row += 1
    a_eq = sp.csr_matrix((vals_eq, (rows_eq, cols_eq)), shape=(row, n_vars))

    # no flow back into the source, none out of the destination
    for o_idx, (s, t) in enumerate(orderings):
        for e_idx in in_edges[s]:
            upper[o_idx * n_edges + e_idx] = 0.0
        for e_idx in out_edges[t]:
            upper[o_idx * n_edges + e_idx] = 0.0

    return PlacementModel(
        graph=graph,
        demands=demands,
        cooling_cost=cooling_cost,
        equip_mode=equip_mode,
        integral_flows=integral_flows,
        edges=edges,
        pairs=pairs,
        orderings=tuple(orderings),
        delta_offset=delta_offset,
        xi_offset=xi_offset,
        n_vars=n_vars,
        delta_upper=delta_upper,
        c=c,
        a_ub=a_ub,
        b_ub=b_ub,
        a_eq=a_eq,
        b_eq=np.array(b_eq),
        lower=lower,
        upper=upper,
        integral=integral,
    )


def with_cooling_cost(model: PlacementModel, cooling_cost: float) -> PlacementModel:
    """Same program with a different cooling price (objective only)."""
    if cooling_cost < 0:
        raise ValueError("cooling_cost must be >= 0")
    c = model.c.copy()
    c[model.xi_offset :] = cooling_cost
    return replace(model, cooling_cost=cooling_cost, c=c)


@dataclass(frozen=True)
class FlowAssignment:
    """Key flow of the ordered commodity (source, dest) on one edge."""

    source: int
    dest: int
    tail: int
    head: int
    bps: float


@dataclass(frozen=True)
class PlacementSolution:
    """A solved placement with full flow detail.

    ``objective`` includes the cooling term only when
    ``objective_includes_cooling`` is set (fixed-cooling solves count
    equipped links only).  ``equip_multiplicity`` is all ones in binary
    equip mode.
    """

    status: str  # "optimal" | "infeasible"
    objective: float | None
    equipped: tuple[tuple[int, int], ...]
    equip_multiplicity: tuple[int, ...]
    cooled: tuple[int, ...]
    flows: tuple[FlowAssignment, ...]
    nodes_explored: int
    wall_time_s: float
    objective_includes_cooling: bool = True

    @property
    def link_count(self) -> int:
        return int(sum(self.equip_multiplicity))


def _make_strengthener(model: PlacementModel, cooling_coeff: float):
    """Lift LP bounds onto the lattice of attainable objective values.

    Any integer completion in a subtree has objective i + j * cc with
    i equipped links inside [sum lower, sum upper] of the delta bounds
    and j cooled nodes inside the xi bounds, and is >= the LP bound, so
    the smallest such lattice value is a valid strengthened bound.
    """
    d0, d1 = model.delta_offset, model.xi_offset

    def strengthen(bound: float, lower: np.ndarray, upper: np.ndarray) -> float:
        i_min = float(lower[d0:d1].sum())
        i_max = float(upper[d0:d1].sum())
        j_min = int(round(float(lower[d1:].sum())))
        j_max = int(round(float(upper[d1:].sum())))
        best = math.inf
        for j in range(j_min, j_max + 1):
            needed = max(i_min, math.ceil(bound - j * cooling_coeff - 1e-9))
            if needed > i_max + 0.5:
                continue
            candidate = needed + j * cooling_coeff
            if candidate < best:
                best = candidate
        return best

    return strengthen


def _hint_vector(
    model: PlacementModel,
    equipped: Iterable[tuple[int, int]],
    cooled: Iterable[int],
) -> np.ndarray | None:
    """Integer-variable values (bnb index order) for a candidate placement."""
    if model.integral_flows:
        return None  # flow integers are not part of placement hints
    edge_pos = {(e.tail, e.head): idx for idx, e in enumerate(model.edges)}
    values = np.zeros(model.n_edges + len(model.graph.nodes))
    for tail, head in equipped:
        values[edge_pos[(tail, head)]] += 1.0
    for node_id in cooled:
        values[model.n_edges + node_id] = 1.0
    return values


def _extract_solution(
    model: PlacementModel,
    result: MilpResult,
    includes_cooling: bool,
    cooled_override: tuple[int, ...] | None,
    wall_time_s: float,
) -> PlacementSolution:
    if result.status != "optimal":
        return PlacementSolution(
            status="infeasible",
            objective=None,
            equipped=(),
            equip_multiplicity=(),
            cooled=(),
            flows=(),
            nodes_explored=result.nodes_explored,
            wall_time_s=wall_time_s,
            objective_includes_cooling=includes_cooling,
        )
    x = result.x
    equipped: list[tuple[int, int]] = []
    multiplicity: list[int] = []
    for e_idx, edge in enumerate(model.edges):
        count = int(round(x[model.delta_offset + e_idx]))
        if count >= 1:
            equipped.append((edge.tail, edge.head))
            multiplicity.append(count)
    if cooled_override is not None:
        cooled = tuple(sorted(cooled_override))
    else:
        cooled = tuple(
            n.id
            for n in model.graph.nodes
            if round(x[model.xi_offset + n.id]) >= 1
        )
    flows: list[FlowAssignment] = []
    for o_idx, (s, t) in enumerate(model.orderings):
        for e_idx, edge in enumerate(model.edges):
            val = float(x[model.flow_col(o_idx, e_idx)])
            if val > FLOW_EPS:
                flows.append(
                    FlowAssignment(
                        source=s, dest=t, tail=edge.tail, head=edge.head, bps=val
                    )
                )
    return PlacementSolution(
        status="optimal",
        objective=float(result.objective),
        equipped=tuple(equipped),
        equip_multiplicity=tuple(multiplicity),
        cooled=cooled,
        flows=tuple(flows),
        nodes_explored=result.nodes_explored,
        wall_time_s=wall_time_s,
        objective_includes_cooling=includes_cooling,
    )


def solve(
    model: PlacementModel,
    node_budget: int = 500_000,
    hints: Sequence[tuple[Iterable[tuple[int, int]], Iterable[int]]] = (),
    polish: bool = True,
) -> PlacementSolution:
    """Find a provably optimal placement (free cooling variables).

    ``hints`` are candidate (equipped, cooled) placements used to seed
    the incumbent; they never affect which optimum is provable, only how
    fast the proof closes.

    Raises:
        BudgetExceededError: the branch-and-bound budget ran out.
    """
    problem = MilpProblem(
        c=model.c,
        a_ub=model.a_ub,
        b_ub=model.b_ub,
        a_eq=model.a_eq,
        b_eq=model.b_eq,
        lower=model.lower,
        upper=model.upper,
        integral=model.integral,
    )
    hint_vectors = []
    for equipped, cooled in hints:
        vec = _hint_vector(model, equipped, cooled)
        if vec is not None:
            hint_vectors.append(vec)
    start = time.perf_counter()
    result = solve_milp(
        problem,
        node_budget=node_budget,
        strengthen=_make_strengthener(model, model.cooling_cost),
        hints=hint_vectors,
        polish=polish,
    )
    elapsed = time.perf_counter() - start
    return _extract_solution(
        model, result, includes_cooling=True, cooled_override=None,
        wall_time_s=elapsed,
    )


def solve_with_fixed_cooling(
    model: PlacementModel,
    cooled_set: Iterable[int],
    node_budget: int = 500_000,
    hints: Sequence[Iterable[tuple[int, int]]] = (),
    polish: bool = True,
) -> PlacementSolution:
    """Optimal equipment placement with the cooled nodes pinned.

    The returned objective counts equipped links only; the caller adds
    the cooling cost for the pinned set.
    """
    cooled = tuple(sorted(set(cooled_set)))
    node_ids = {n.id for n in model.graph.nodes}
    for node_id in cooled:
        if node_id not in node_ids:
            raise ValueError(f"unknown node id {node_id} in cooled set")
    lower = model.lower.copy()
    upper = model.upper.copy()
    for node in model.graph.nodes:
        col = model.xi_col(node.id)
        pinned = 1.0 if node.id in cooled else 0.0
        lower[col] = pinned
        upper[col] = pinned
    c = model.c.copy()
    c[model.xi_offset :] = 0.0
    problem = MilpProblem(
        c=c,
        a_ub=model.a_ub,
        b_ub=model.b_ub,
        a_eq=model.a_eq,
        b_eq=model.b_eq,
        lower=lower,
        upper=upper,
        integral=model.integral,
    )
    hint_vectors = []
    for equipped in hints:
        vec = _hint_vector(model, equipped, cooled)
        if vec is not None:
            hint_vectors.append(vec)
    start = time.perf_counter()
    result = solve_milp(
        problem,
        node_budget=node_budget,
        strengthen=_make_strengthener(model, 0.0),
        hints=hint_vectors,
        polish=polish,
    )
    elapsed = time.perf_counter() - start
    return _extract_solution(
        model, result, includes_cooling=False, cooled_override=cooled,
        wall_time_s=elapsed,
    )


def uncooled_feasible(model: PlacementModel) -> bool:
    """Whether the demands fit with every link equipped and no cooling."""
    lower = model.lower.copy()
    upper = model.upper.copy()
    lower[model.delta_offset : model.xi_offset] = model.delta_upper
    upper[model.delta_offset : model.xi_offset] = model.delta_upper
    lower[model.xi_offset :] = 0.0
    upper[model.xi_offset :] = 0.0
    res = linprog(
        np.zeros(model.n_vars),
        A_ub=model.a_ub,
        b_ub=model.b_ub,
        A_eq=model.a_eq,
        b_eq=model.b_eq,
        bounds=np.column_stack((lower, upper)),
        method="highs",
    )
    return res.status == 0


@dataclass(frozen=True)
class Violation:
    family: str
    subject: str
    amount: float


@dataclass(frozen=True)
class VerificationReport:
    ok: bool
    violations: tuple[Violation, ...]


def verify_solution(
    model: PlacementModel, solution: PlacementSolution, tol: float = 1e-6
) -> VerificationReport:
    """Re-check every constraint family and the objective arithmetic.

    Works from the graph, demands and the solution's own flow list;
    deliberately shares nothing with the matrix builder.
    """
    if solution.status != "optimal":
        raise ValueError("can only verify a solution claiming optimality")
    graph = model.graph
    demands = model.demands
    violations: list[Violation] = []

    delta: dict[tuple[int, int], int] = {}
    for (tail, head), count in zip(solution.equipped, solution.equip_multiplicity):
        delta[(tail, head)] = count
        if model.equip_mode == "binary" and count not in (0, 1):
            violations.append(
                Violation("domain", f"delta ({tail}, {head}) = {count}", float(count))
            )
    cooled = set(solution.cooled)

    edge_caps = {
        (e.tail, e.head): (e.capacity_warm, e.capacity_cold)
        for e in graph.directed_edges()
    }
    for flow in solution.flows:
        if (flow.tail, flow.head) not in edge_caps:
            violations.append(
                Violation(
                    "domain",
                    f"flow on unknown edge ({flow.tail}, {flow.head})",
                    flow.bps,
                )
            )
        if flow.bps < -tol:
            violations.append(
                Violation("domain", f"negative flow {flow}", -flow.bps)
            )

    # aggregate flows per edge and per ordered commodity
    edge_load: dict[tuple[int, int], float] = {key: 0.0 for key in edge_caps}
    per_commodity: dict[tuple[int, int], dict[tuple[int, int], float]] = {}
    for flow in solution.flows:
        edge_load[(flow.tail, flow.head)] = (
            edge_load.get((flow.tail, flow.head), 0.0) + flow.bps
        )
        per_commodity.setdefault((flow.source, flow.dest), {})
        per_commodity[(flow.source, flow.dest)][(flow.tail, flow.head)] = (
            per_commodity[(flow.source, flow.dest)].get((flow.tail, flow.head), 0.0)
            + flow.bps
        )

    total_demand = demands.total()
    for (tail, head), load in edge_load.items():
        cap_warm, cap_cold = edge_caps[(tail, head)]
        d = delta.get((tail, head), 0)
        cold_slack = d * cap_cold - load
        if cold_slack < -tol:
            violations.append(
                Violation("cold-capacity", f"edge ({tail}, {head})", -cold_slack)
            )
        relax = total_demand if head in cooled else 0.0
        warm_slack = d * cap_warm + relax - load
        if warm_slack < -tol:
            violations.append(
                Violation("warm-capacity", f"edge ({tail}, {head})", -warm_slack)
            )

    trusted = demands.node_ids
    out_by_node: dict[int, list[tuple[int, int]]] = {}
    in_by_node: dict[int, list[tuple[int, int]]] = {}
    for tail, head in edge_caps:
        out_by_node.setdefault(tail, []).append((tail, head))
        in_by_node.setdefault(head, []).append((tail, head))

    def commodity_flow(ordered: tuple[int, int], edge: tuple[int, int]) -> float:
        return per_commodity.get(ordered, {}).get(edge, 0.0)

    for a in range(len(trusted)):
        for b in range(a + 1, len(trusted)):
            i, j = trusted[a], trusted[b]
            shipped = sum(
                commodity_flow((i, j), e) for e in out_by_node.get(i, [])
            ) + sum(commodity_flow((j, i), e) for e in in_by_node.get(i, []))
            want = demands.rate(i, j) + demands.rate(j, i)
            if abs(shipped - want) > tol:
                violations.append(
                    Violation("source", f"pair {{{i}, {j}}}", abs(shipped - want))
                )
            for s, t in ((i, j), (j, i)):
                for node in graph.nodes:
                    n = node.id
                    if n == s or n == t:
                        continue
                    balance = sum(
                        commodity_flow((s, t), e) for e in out_by_node.get(n, [])
                    ) - sum(commodity_flow((s, t), e) for e in in_by_node.get(n, []))
                    if abs(balance) > tol:
                        violations.append(
                            Violation(
                                "conservation",
                                f"commodity ({s}, {t}) at node {n}",
                                abs(balance),
                            )
                        )
                returned = sum(
                    commodity_flow((s, t), e) for e in in_by_node.get(s, [])
                )
                if returned > tol:
                    violations.append(
                        Violation("no-return", f"commodity ({s}, {t})", returned)
                    )
                leaked = sum(
                    commodity_flow((s, t), e) for e in out_by_node.get(t, [])
                )
                if leaked > tol:
                    violations.append(
                        Violation("no-exit", f"commodity ({s}, {t})", leaked)
                    )

    links = sum(solution.equip_multiplicity)
    expected = float(links)
    if solution.objective_includes_cooling:
        expected += model.cooling_cost * len(cooled)
    if solution.objective is None or abs(solution.objective - expected) > tol:
        violations.append(
            Violation(
                "objective",
                f"reported {solution.objective}, recomputed {expected}",
                abs((solution.objective or 0.0) - expected),
            )
        )

    return VerificationReport(ok=not violations, violations=tuple(violations))


def _fmt(value: float) -> str:
    return f"{value:.12g}"


def export_lp(model: PlacementModel) -> str:
    """Render the program in the textual LP file format.

    Variable naming: ``f_{s}_{t}__{n}_{m}`` for the flow of ordered
    commodity (s, t) on edge (n, m), ``d_{n}_{m}`` for equipment and
    ``xi_{n}`` for cooling.
    """

    def flow_name(o_idx: int, e_idx: int) -> str:
        s, t = model.orderings[o_idx]
        e = model.edges[e_idx]
        return f"f_{s}_{t}__{e.tail}_{e.head}"

    def delta_name(e_idx: int) -> str:
        e = model.edges[e_idx]
        return f"d_{e.tail}_{e.head}"

    def xi_name(node_id: int) -> str:
        return f"xi_{node_id}"

    lines: list[str] = ["\\ cooling placement model", "Minimize"]
    terms = [delta_name(e_idx) for e_idx in range(model.n_edges)]
    if model.cooling_cost > 0:
        terms += [
            f"{_fmt(model.cooling_cost)} {xi_name(n.id)}" for n in model.graph.nodes
        ]
    lines.append(" obj: " + " + ".join(terms))
    lines.append("Subject To")

    total_demand = model.demands.total()
    for e_idx, edge in enumerate(model.edges):
        flow_terms = " + ".join(
            flow_name(o_idx, e_idx) for o_idx in range(len(model.orderings))
        )
        lines.append(
            f" cold_{edge.tail}_{edge.head}: {flow_terms} - "
            f"{_fmt(edge.capacity_cold)} {delta_name(e_idx)} <= 0"
        )
    for e_idx, edge in enumerate(model.edges):
        flow_terms = " + ".join(
            flow_name(o_idx, e_idx) for o_idx in range(len(model.orderings))
        )
        lines.append(
            f" warm_{edge.tail}_{edge.head}: {flow_terms} - "
            f"{_fmt(total_demand)} {xi_name(edge.head)} - "
            f"{_fmt(edge.capacity_warm)} {delta_name(e_idx)} <= 0"
        )
    edge_index = {(e.tail, e.head): idx for idx, e in enumerate(model.edges)}
    for p_idx, (i, j) in enumerate(model.pairs):
        o_fwd, o_rev = 2 * p_idx, 2 * p_idx + 1
        terms = [
            flow_name(o_fwd, e_idx)
            for (tail, _), e_idx in edge_index.items()
            if tail == i
        ] + [
            flow_name(o_rev, e_idx)
            for (_, head), e_idx in edge_index.items()
            if head == i
        ]
        rhs = model.demands.rate(i, j) + model.demands.rate(j, i)
        lines.append(f" src_{i}_{j}: " + " + ".join(terms) + f" = {_fmt(rhs)}")
    for o_idx, (s, t) in enumerate(model.orderings):
        for node in model.graph.nodes:
            n = node.id
            if n == s or n == t:
                continue
            outs = [
                flow_name(o_idx, e_idx)
                for (tail, _), e_idx in edge_index.items()
                if tail == n
            ]
            ins = [
                flow_name(o_idx, e_idx)
                for (_, head), e_idx in edge_index.items()
                if head == n
            ]
            lhs = " + ".join(outs) + "".join(f" - {name}" for name in ins)
            lines.append(f" con_{s}_{t}_{n}: {lhs} = 0")

    lines.append("Bounds")
    for o_idx in range(len(model.orderings)):
        for e_idx in range(model.n_edges):
            if model.upper[model.flow_col(o_idx, e_idx)] == 0.0:
                lines.append(f" {flow_name(o_idx, e_idx)} = 0")
    if model.equip_mode == "integer":
        for e_idx in range(model.n_edges):
            lines.append(
                f" 0 <= {delta_name(e_idx)} <= {_fmt(model.delta_upper[e_idx])}"
            )

    binaries = [xi_name(n.id) for n in model.graph.nodes]
    if model.equip_mode == "binary":
        binaries = [delta_name(e_idx) for e_idx in range(model.n_edges)] + binaries
    lines.append("Binaries")
    lines.append(" " + " ".join(binaries))
    if model.equip_mode == "integer":
        lines.append("Generals")
        lines.append(
            " " + " ".join(delta_name(e_idx) for e_idx in range(model.n_edges))
        )
    lines.append("End")
    return "\n".join(lines) + "\n"
