"""Random network topologies with trusted relays and per-edge capacities.

Generation pipeline:

1. drop trusted nodes uniformly at random into a square box,
2. grow links in nearest-neighbour rounds until a target mean degree,
3. bisect any link too long to carry a minimum rate on uncooled
   detectors, inserting trusted relay nodes at midpoints,
4. annotate every link with its warm and cold secure-key-rate capacity.

Graphs are immutable once built.  The canonical in-memory view is the
directed-edge expansion (two opposite edges per physical link); the JSON
serialization stores the undirected link list.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import keyrate

__all__ = [
    "Node",
    "Link",
    "DirectedEdge",
    "GraphMeta",
    "NetworkGraph",
    "generate_nodes",
    "grow_edges",
    "insert_relays",
    "annotate_capacities",
    "build_network",
    "graph_to_dict",
    "graph_from_dict",
    "save_graph",
    "load_graph",
]


@dataclass(frozen=True)
class Node:
    """A network site: trusted endpoint or inserted relay."""

    id: int
    x_km: float
    y_km: float
    kind: str = "trusted"  # "trusted" | "relay"

    def __post_init__(self) -> None:
        if self.kind not in ("trusted", "relay"):
            raise ValueError("node kind must be 'trusted' or 'relay'")


@dataclass(frozen=True)
class Link:
    """Undirected physical link between nodes ``a < b``."""

    a: int
    b: int
    length_km: float
    cap_warm_bps: float | None = None
    cap_cold_bps: float | None = None

    def __post_init__(self) -> None:
        if self.a == self.b:
            raise ValueError("link endpoints must differ")
        if self.a > self.b:
            raise ValueError("link endpoints must be ordered a < b")
        if self.length_km <= 0:
            raise ValueError("link length must be > 0")


@dataclass(frozen=True)
class DirectedEdge:
    """One direction of a physical link, carrying its own capacities."""

    tail: int
    head: int
    length_km: float
    capacity_warm: float
    capacity_cold: float


@dataclass(frozen=True)
class GraphMeta:
    """Generation parameters plus bookkeeping flags."""

    seed: int
    box_km: float
    target_degree: float
    min_rate_bps: float
    degree_reached: bool = True
    attempts: int | None = None


@dataclass(frozen=True)
class NetworkGraph:
    nodes: tuple[Node, ...]
    links: tuple[Link, ...]
    meta: GraphMeta

    def __post_init__(self) -> None:
        ids = [n.id for n in self.nodes]
        if ids != list(range(len(ids))):
            raise ValueError("node ids must be dense from 0 in order")
        seen = set()
        for link in self.links:
            if (link.a, link.b) in seen:
                raise ValueError(f"duplicate link ({link.a}, {link.b})")
            seen.add((link.a, link.b))

    @property
    def trusted_ids(self) -> tuple[int, ...]:
        return tuple(n.id for n in self.nodes if n.kind == "trusted")

    @property
    def relay_ids(self) -> tuple[int, ...]:
        return tuple(n.id for n in self.nodes if n.kind == "relay")

    def directed_edges(self) -> tuple[DirectedEdge, ...]:
        """Canonical expansion: (a, b) then (b, a) for each link."""
        edges = []
        for link in self.links:
            if link.cap_warm_bps is None or link.cap_cold_bps is None:
                raise ValueError("graph is not capacity-annotated")
            for tail, head in ((link.a, link.b), (link.b, link.a)):
                edges.append(
                    DirectedEdge(
                        tail=tail,
                        head=head,
                        length_km=link.length_km,
                        capacity_warm=link.cap_warm_bps,
                        capacity_cold=link.cap_cold_bps,
                    )
                )
        return tuple(edges)

    def degrees(self) -> dict[int, int]:
        """Undirected degree per node id."""
        deg = {n.id: 0 for n in self.nodes}
        for link in self.links:
            deg[link.a] += 1
            deg[link.b] += 1
        return deg

    def is_connected(self) -> bool:
        if not self.nodes:
            return True
        adjacency: dict[int, list[int]] = {n.id: [] for n in self.nodes}
        for link in self.links:
            adjacency[link.a].append(link.b)
            adjacency[link.b].append(link.a)
        seen = {self.nodes[0].id}
        frontier = [self.nodes[0].id]
        while frontier:
            current = frontier.pop()
            for neighbour in adjacency[current]:
                if neighbour not in seen:
                    seen.add(neighbour)
                    frontier.append(neighbour)
        return len(seen) == len(self.nodes)


def _distance(a: Node, b: Node) -> float:
    return math.hypot(a.x_km - b.x_km, a.y_km - b.y_km)


def generate_nodes(count: int, box_km: float, rng_seed: int) -> tuple[Node, ...]:
    """Drop ``count`` trusted nodes i.i.d. uniform in a box_km x box_km box."""
    if count < 2:
        raise ValueError("need at least 2 nodes")
    if box_km <= 0:
        raise ValueError("box_km must be > 0")
    rng = np.random.default_rng(rng_seed)
    xy = rng.uniform(0.0, box_km, size=(count, 2))
    return tuple(
        Node(id=i, x_km=float(xy[i, 0]), y_km=float(xy[i, 1])) for i in range(count)
    )


def grow_edges(
    nodes: tuple[Node, ...], target_mean_degree: float
) -> tuple[tuple[tuple[int, int], ...], bool]:
    """Grow links by nearest-neighbour rounds up to a mean-degree target.

    Round k connects each node, in id order, to its k-th nearest
    neighbour unless that link already exists.  Growth stops right after
    the first link whose addition pushes the mean undirected degree to
    the target.  Distance ties break towards the lower node id.

    Returns the link set and a flag telling whether the target was
    reached (False when even the complete graph stays below it).
    """
    if len(nodes) < 2:
        raise ValueError("need at least 2 nodes")
    if target_mean_degree <= 0:
        raise ValueError("target_mean_degree must be > 0")
    count = len(nodes)
    xy = np.array([[n.x_km, n.y_km] for n in nodes])
    diff = xy[:, None, :] - xy[None, :, :]
    dist = np.sqrt((diff * diff).sum(axis=2))
    # neighbour ranking per node: by distance, then by id
    order = []
    for i in range(count):
        others = [j for j in range(count) if j != i]
        others.sort(key=lambda j: (dist[i, j], j))
        order.append(others)

    links: list[tuple[int, int]] = []
    present: set[tuple[int, int]] = set()
    for round_k in range(count - 1):
        for i in range(count):
            j = order[i][round_k]
            pair = (min(i, j), max(i, j))
            if pair in present:
                continue
            present.add(pair)
            links.append(pair)
            if 2.0 * len(links) / count >= target_mean_degree:
                return tuple(sorted(links)), True
    return tuple(sorted(links)), False


def insert_relays(
    nodes: tuple[Node, ...],
    link_pairs: tuple[tuple[int, int], ...],
    min_rate_bps: float,
    warm_params: keyrate.LinkModelParams,
) -> tuple[tuple[Node, ...], tuple[tuple[int, int], ...]]:
    """Bisect links too long for ``min_rate_bps`` on uncooled detectors.

    Any link longer than the uncooled reach gets a relay node at its
    midpoint; halving repeats until every link is within reach.  Relay
    ids continue after the existing ids, in creation order.
    """
    reach_km = keyrate.max_reach(min_rate_bps, warm_params)
    if reach_km < 1e-6:
        raise ValueError("uncooled reach is zero; relay spacing would collapse")
    all_nodes = list(nodes)
    out: list[tuple[int, int]] = []

    def split(a: int, b: int) -> None:
        na, nb = all_nodes[a], all_nodes[b]
        if _distance(na, nb) <= reach_km:
            out.append((min(a, b), max(a, b)))
            return
        mid = len(all_nodes)
        all_nodes.append(
            Node(
                id=mid,
                x_km=0.5 * (na.x_km + nb.x_km),
                y_km=0.5 * (na.y_km + nb.y_km),
                kind="relay",
            )
        )
        split(a, mid)
        split(mid, b)

    for a, b in sorted(link_pairs):
        split(a, b)
    return tuple(all_nodes), tuple(sorted(out))


def annotate_capacities(
    nodes: tuple[Node, ...],
    link_pairs: tuple[tuple[int, int], ...],
    warm_params: keyrate.LinkModelParams,
    cold_params: keyrate.LinkModelParams,
    min_rate_bps: float | None = None,
) -> tuple[Link, ...]:
    """Attach warm and cold secure-key-rate capacities to every link."""
    links = []
    for a, b in sorted(link_pairs):
        length = _distance(nodes[a], nodes[b])
        warm = keyrate.secure_key_rate(length, warm_params).rate_per_second
        cold = keyrate.secure_key_rate(length, cold_params).rate_per_second
        if min_rate_bps is not None and warm < min_rate_bps:
            raise RuntimeError(
                f"link ({a}, {b}) warm capacity {warm} below {min_rate_bps}"
            )
        links.append(
            Link(a=a, b=b, length_km=length, cap_warm_bps=warm, cap_cold_bps=cold)
        )
    return tuple(links)


def build_network(
    n_trusted: int,
    seed: int,
    box_km: float = 100.0,
    target_degree: float = 3.5,
    min_rate_bps: float = 4000.0,
    warm_params: keyrate.LinkModelParams | None = None,
    cold_params: keyrate.LinkModelParams | None = None,
) -> NetworkGraph:
    """Full generation pipeline with the default operating point."""
    warm_params = warm_params or keyrate.warm_link_params()
    cold_params = cold_params or keyrate.cold_link_params()
    nodes = generate_nodes(n_trusted, box_km, seed)
    pairs, reached = grow_edges(nodes, target_degree)
    nodes, pairs = insert_relays(nodes, pairs, min_rate_bps, warm_params)
    links = annotate_capacities(nodes, pairs, warm_params, cold_params, min_rate_bps)
    meta = GraphMeta(
        seed=seed,
        box_km=box_km,
        target_degree=target_degree,
        min_rate_bps=min_rate_bps,
        degree_reached=reached,
    )
    return NetworkGraph(nodes=nodes, links=links, meta=meta)


def with_attempts(graph: NetworkGraph, attempts: int) -> NetworkGraph:
    """Copy of the graph with the generation attempt count recorded."""
    return replace(graph, meta=replace(graph.meta, attempts=attempts))


def graph_to_dict(graph: NetworkGraph) -> dict:
    return {
        "nodes": [
            {"id": n.id, "x_km": n.x_km, "y_km": n.y_km, "kind": n.kind}
            for n in graph.nodes
        ],
        "links": [
            {
                "a": l.a,
                "b": l.b,
                "length_km": l.length_km,
                "cap_warm_bps": l.cap_warm_bps,
                "cap_cold_bps": l.cap_cold_bps,
            }
            for l in graph.links
        ],
        "meta": {
            "seed": graph.meta.seed,
            "box_km": graph.meta.box_km,
            "target_degree": graph.meta.target_degree,
            "min_rate_bps": graph.meta.min_rate_bps,
        },
    }


def graph_from_dict(doc: dict) -> NetworkGraph:
    nodes = tuple(
        Node(id=n["id"], x_km=n["x_km"], y_km=n["y_km"], kind=n["kind"])
        for n in doc["nodes"]
    )
    links = tuple(
        Link(
            a=l["a"],
            b=l["b"],
            length_km=l["length_km"],
            cap_warm_bps=l["cap_warm_bps"],
            cap_cold_bps=l["cap_cold_bps"],
        )
        for l in doc["links"]
    )
    meta = GraphMeta(
        seed=doc["meta"]["seed"],
        box_km=doc["meta"]["box_km"],
        target_degree=doc["meta"]["target_degree"],
        min_rate_bps=doc["meta"]["min_rate_bps"],
    )
    return NetworkGraph(nodes=nodes, links=links, meta=meta)


def save_graph(graph: NetworkGraph, path: str | Path) -> None:
    Path(path).write_text(json.dumps(graph_to_dict(graph), indent=2) + "\n")


def load_graph(path: str | Path) -> NetworkGraph:
    return graph_from_dict(json.loads(Path(path).read_text()))
