"""Planning toolkit for QKD networks with shared detector cooling.

Submodules:

- :mod:`qkdcool.keyrate`: decoy-state BB84 secure key rates and reach.
- :mod:`qkdcool.topology`: random graphs, trusted relays, capacities.
- :mod:`qkdcool.milp`: exact cooling/equipment placement program.
- :mod:`qkdcool.bnb`: the deterministic branch-and-bound underneath.
- :mod:`qkdcool.heuristic`: degree-based cooling sweep and cost envelope.
- :mod:`qkdcool.experiments`: seeded batch studies and statistics.
- :mod:`qkdcool.config`: JSON configuration with canonical defaults.
- :mod:`qkdcool.cli`: the ``qkdcool`` command.
"""

from . import bnb, cli, config, experiments, heuristic, keyrate, milp, topology

__all__ = [
    "bnb",
    "cli",
    "config",
    "experiments",
    "heuristic",
    "keyrate",
    "milp",
    "topology",
]

__version__ = "0.1.0"
