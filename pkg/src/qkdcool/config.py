"""Run configuration: canonical defaults, JSON loading, validation.

The empty document is a complete configuration; every key overrides one
default.  Unknown keys are rejected and every validation failure names
the offending field path, so a typo never silently falls back to a
default.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .experiments import ExperimentConfig
from .keyrate import (
    COLD_DETECTOR,
    WARM_DETECTOR,
    DetectorProfile,
    FibreParams,
    LinkModelParams,
    SourceParams,
)

__all__ = [
    "ConfigError",
    "TopologySection",
    "SolverSection",
    "ExperimentSection",
    "RunConfig",
    "load_config",
    "parse_config",
    "serialize_config",
]


class ConfigError(ValueError):
    """Invalid configuration document; the message carries the field path."""


@dataclass(frozen=True)
class TopologySection:
    box_km: float = 100.0
    target_mean_degree: float = 3.5
    relay_min_rate_bps: float = 4000.0

    def __post_init__(self) -> None:
        if self.box_km <= 0:
            raise ValueError("box_km must be > 0")
        if self.target_mean_degree <= 0:
            raise ValueError("target_mean_degree must be > 0")
        if self.relay_min_rate_bps <= 0:
            raise ValueError("relay_min_rate_bps must be > 0")


@dataclass(frozen=True)
class SolverSection:
    node_budget: int = 500_000
    integral_flows: bool = False
    equip_mode: str = "binary"

    def __post_init__(self) -> None:
        if self.node_budget < 1:
            raise ValueError("node_budget must be >= 1")
        if self.equip_mode not in ("binary", "integer"):
            raise ValueError("equip_mode must be 'binary' or 'integer'")


@dataclass(frozen=True)
class ExperimentSection:
    node_counts: tuple[int, ...] = (5, 6, 7, 8, 9, 10)
    instances_per_count: int = 100
    base_seed: int = 1
    attempt_budget: int = 1000
    cc_grid: tuple[float, ...] = tuple(i * 0.5 for i in range(21))

    def __post_init__(self) -> None:
        if self.instances_per_count < 1:
            raise ValueError("instances_per_count must be >= 1")
        if any(n < 2 for n in self.node_counts):
            raise ValueError("node_counts entries must be >= 2")
        if self.attempt_budget < 1:
            raise ValueError("attempt_budget must be >= 1")
        if any(cc < 0 for cc in self.cc_grid):
            raise ValueError("cc_grid entries must be >= 0")


@dataclass(frozen=True)
class RunConfig:
    source: SourceParams = field(default_factory=SourceParams)
    fibre: FibreParams = field(default_factory=FibreParams)
    detector_cold: DetectorProfile = COLD_DETECTOR
    detector_warm: DetectorProfile = WARM_DETECTOR
    error_correction_efficiency: float = 1.2
    misalignment_floor: float = 5.3e-7
    topology: TopologySection = field(default_factory=TopologySection)
    per_node_traffic_bps: float = 8000.0
    solver: SolverSection = field(default_factory=SolverSection)
    experiments: ExperimentSection = field(default_factory=ExperimentSection)
    output_dir: str = "out"

    def __post_init__(self) -> None:
        if self.error_correction_efficiency < 1:
            raise ValueError("error_correction_efficiency must be >= 1")
        if self.misalignment_floor < 0:
            raise ValueError("misalignment_floor must be >= 0")
        if self.per_node_traffic_bps < 0:
            raise ValueError("per_node_traffic_bps must be >= 0")
        if self.detector_cold.regime != "cold":
            raise ValueError("detector_cold must carry regime 'cold'")
        if self.detector_warm.regime != "warm":
            raise ValueError("detector_warm must carry regime 'warm'")

    def cold_link_params(self) -> LinkModelParams:
        return LinkModelParams(
            source=self.source,
            fibre=self.fibre,
            detector=self.detector_cold,
            error_correction_efficiency=self.error_correction_efficiency,
            misalignment_floor=self.misalignment_floor,
        )

    def warm_link_params(self) -> LinkModelParams:
        return LinkModelParams(
            source=self.source,
            fibre=self.fibre,
            detector=self.detector_warm,
            error_correction_efficiency=self.error_correction_efficiency,
            misalignment_floor=self.misalignment_floor,
        )

    def experiment_config(self) -> ExperimentConfig:
        return ExperimentConfig(
            node_counts=self.experiments.node_counts,
            instances_per_count=self.experiments.instances_per_count,
            base_seed=self.experiments.base_seed,
            per_node_traffic_bps=self.per_node_traffic_bps,
            relay_min_rate_bps=self.topology.relay_min_rate_bps,
            target_mean_degree=self.topology.target_mean_degree,
            box_km=self.topology.box_km,
            cc_grid=self.experiments.cc_grid,
            attempt_budget=self.experiments.attempt_budget,
            node_budget=self.solver.node_budget,
        )


def _require(value, kinds, path: str):
    if isinstance(value, bool) and bool not in kinds:
        raise ConfigError(f"{path}: expected {kinds}, got bool")
    if not isinstance(value, tuple(kinds)):
        names = "/".join(k.__name__ for k in kinds)
        raise ConfigError(f"{path}: expected {names}, got {type(value).__name__}")
    return value


def _number(doc: dict, key: str, default: float, path: str) -> float:
    if key not in doc:
        return default
    return float(_require(doc.pop(key), (int, float), f"{path}.{key}"))


def _integer(doc: dict, key: str, default: int, path: str) -> int:
    if key not in doc:
        return default
    return int(_require(doc.pop(key), (int,), f"{path}.{key}"))


def _boolean(doc: dict, key: str, default: bool, path: str) -> bool:
    if key not in doc:
        return default
    return bool(_require(doc.pop(key), (bool,), f"{path}.{key}"))


def _string(doc: dict, key: str, default: str, path: str) -> str:
    if key not in doc:
        return default
    return str(_require(doc.pop(key), (str,), f"{path}.{key}"))


def _number_list(doc: dict, key: str, default: tuple, path: str, integral=False):
    if key not in doc:
        return default
    raw = _require(doc.pop(key), (list,), f"{path}.{key}")
    out = []
    for idx, item in enumerate(raw):
        kinds = (int,) if integral else (int, float)
        out.append(
            (int if integral else float)(
                _require(item, kinds, f"{path}.{key}[{idx}]")
            )
        )
    return tuple(out)


def _section(doc: dict, key: str, path: str) -> dict:
    if key not in doc:
        return {}
    return dict(_require(doc.pop(key), (dict,), f"{path}.{key}" if path else key))


def _reject_unknown(doc: dict, path: str) -> None:
    if doc:
        name = sorted(doc)[0]
        where = f"{path}.{name}" if path else name
        raise ConfigError(f"unknown config key: {where}")


def _build(constructor, path: str, **kwargs):
    try:
        return constructor(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _detector(doc: dict, default: DetectorProfile, path: str) -> DetectorProfile:
    built = _build(
        DetectorProfile,
        path,
        dark_count_rate=_number(doc, "dark_count_rate_hz", default.dark_count_rate, path),
        efficiency=_number(doc, "efficiency", default.efficiency, path),
        dead_time=_number(doc, "dead_time_s", default.dead_time, path),
        detection_window=_number(
            doc, "detection_window_s", default.detection_window, path
        ),
        regime=default.regime,
    )
    _reject_unknown(doc, path)
    return built


def parse_config(doc: dict) -> RunConfig:
    """Build a validated RunConfig from a parsed JSON document."""
    doc = dict(_require(doc, (dict,), "config"))

    src = _section(doc, "source", "")
    source = _build(
        SourceParams,
        "source",
        mu=_number(src, "mu", SourceParams.mu, "source"),
        f_rep=_number(src, "f_rep_hz", SourceParams.f_rep, "source"),
    )
    _reject_unknown(src, "source")

    fib = _section(doc, "fibre", "")
    fibre = _build(
        FibreParams,
        "fibre",
        alpha=_number(fib, "alpha_db_per_km", FibreParams.alpha, "fibre"),
    )
    _reject_unknown(fib, "fibre")

    detector_cold = _detector(
        _section(doc, "detector_cold", ""), COLD_DETECTOR, "detector_cold"
    )
    detector_warm = _detector(
        _section(doc, "detector_warm", ""), WARM_DETECTOR, "detector_warm"
    )

    top = _section(doc, "topology", "")
    topo = _build(
        TopologySection,
        "topology",
        box_km=_number(top, "box_km", TopologySection.box_km, "topology"),
        target_mean_degree=_number(
            top, "target_mean_degree", TopologySection.target_mean_degree, "topology"
        ),
        relay_min_rate_bps=_number(
            top, "relay_min_rate_bps", TopologySection.relay_min_rate_bps, "topology"
        ),
    )
    _reject_unknown(top, "topology")

    dem = _section(doc, "demand", "")
    per_node = _number(
        dem, "per_node_traffic_bps", RunConfig.per_node_traffic_bps, "demand"
    )
    _reject_unknown(dem, "demand")

    sol = _section(doc, "solver", "")
    solver = _build(
        SolverSection,
        "solver",
        node_budget=_integer(sol, "node_budget", SolverSection.node_budget, "solver"),
        integral_flows=_boolean(
            sol, "integral_flows", SolverSection.integral_flows, "solver"
        ),
        equip_mode=_string(sol, "equip_mode", SolverSection.equip_mode, "solver"),
    )
    _reject_unknown(sol, "solver")

    exp = _section(doc, "experiments", "")
    defaults = ExperimentSection()
    experiments = _build(
        ExperimentSection,
        "experiments",
        node_counts=_number_list(
            exp, "node_counts", defaults.node_counts, "experiments", integral=True
        ),
        instances_per_count=_integer(
            exp, "instances_per_count", defaults.instances_per_count, "experiments"
        ),
        base_seed=_integer(exp, "base_seed", defaults.base_seed, "experiments"),
        attempt_budget=_integer(
            exp, "attempt_budget", defaults.attempt_budget, "experiments"
        ),
        cc_grid=_number_list(exp, "cc_grid", defaults.cc_grid, "experiments"),
    )
    _reject_unknown(exp, "experiments")

    ecc = _number(
        doc,
        "error_correction_efficiency",
        RunConfig.error_correction_efficiency,
        "",
    )
    floor = _number(doc, "misalignment_floor", RunConfig.misalignment_floor, "")
    output_dir = _string(doc, "output_dir", RunConfig.output_dir, "")
    _reject_unknown(doc, "")

    return _build(
        RunConfig,
        "config",
        source=source,
        fibre=fibre,
        detector_cold=detector_cold,
        detector_warm=detector_warm,
        error_correction_efficiency=ecc,
        misalignment_floor=floor,
        topology=topo,
        per_node_traffic_bps=per_node,
        solver=solver,
        experiments=experiments,
        output_dir=output_dir,
    )


def load_config(path: str | Path | None) -> RunConfig:
    """Read and validate a JSON configuration file; None gives defaults."""
    if path is None:
        return RunConfig()
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config parse error: {exc}") from exc
    return parse_config(doc)


def serialize_config(config: RunConfig) -> dict:
    """Full JSON document for the configuration (defaults included)."""
    return {
        "source": {"mu": config.source.mu, "f_rep_hz": config.source.f_rep},
        "fibre": {"alpha_db_per_km": config.fibre.alpha},
        "detector_cold": {
            "dark_count_rate_hz": config.detector_cold.dark_count_rate,
            "efficiency": config.detector_cold.efficiency,
            "dead_time_s": config.detector_cold.dead_time,
            "detection_window_s": config.detector_cold.detection_window,
        },
        "detector_warm": {
            "dark_count_rate_hz": config.detector_warm.dark_count_rate,
            "efficiency": config.detector_warm.efficiency,
            "dead_time_s": config.detector_warm.dead_time,
            "detection_window_s": config.detector_warm.detection_window,
        },
        "error_correction_efficiency": config.error_correction_efficiency,
        "misalignment_floor": config.misalignment_floor,
        "topology": {
            "box_km": config.topology.box_km,
            "target_mean_degree": config.topology.target_mean_degree,
            "relay_min_rate_bps": config.topology.relay_min_rate_bps,
        },
        "demand": {"per_node_traffic_bps": config.per_node_traffic_bps},
        "solver": {
            "node_budget": config.solver.node_budget,
            "integral_flows": config.solver.integral_flows,
            "equip_mode": config.solver.equip_mode,
        },
        "experiments": {
            "node_counts": list(config.experiments.node_counts),
            "instances_per_count": config.experiments.instances_per_count,
            "base_seed": config.experiments.base_seed,
            "attempt_budget": config.experiments.attempt_budget,
            "cc_grid": list(config.experiments.cc_grid),
        },
        "output_dir": config.output_dir,
    }
