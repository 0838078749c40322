"""Group sparse beamforming for Cloud-RAN."""

from ._gsbf import (
    AsymptoticInfeasibleError,
    Channel,
    ConfigError,
    DualitySolution,
    Error,
    ExperimentSpec,
    InfeasibleError,
    NetworkConfig,
    RunResult,
    StageOutcome,
    Topology,
    check_feasibility,
    emit_reports,
    generate_topology,
    load_spec,
    network_power,
    parse_spec,
    run_instantaneous,
    run_statistical,
    run_three_stage,
    run_trials,
    sample_channel,
    solve_subproblem,
)

__all__ = [name for name in dir() if not name.startswith("_")]
