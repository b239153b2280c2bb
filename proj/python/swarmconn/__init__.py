"""Connectivity-maintaining swarm simulator."""

from ._core import (
    ConfigError,
    Graph,
    ScenarioConfig,
    WireError,
    build_graph,
    combine,
    connectivity_contribution,
    coverage_contribution,
    default_alpha,
    energy,
    energy_slope,
    fiedler,
    graph_from_weights,
    hop_distances,
    initial_positions,
    is_connected,
    laplacian,
    laplacian_spectrum,
    lj_equilibrium,
    lj_force,
    load_config,
    parse_config,
    read_trace,
    robustness_score,
    run,
    two_hop_structure,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
