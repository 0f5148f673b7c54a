"""Model-free HVAC fleet control that tracks a PV generation profile.

The package wires an intelligent-proportional controller with a real-time
drift estimator (control), a three-state RC building model (plant), a
band-splitting fleet coordinator (coordinator), synthetic or CSV scenario
inputs (scenario) and a simulation/trace/metrics engine with a CLI
(simulate, cli).
"""

from .control import (
    Estimator,
    IpController,
    Sample,
    SampleWindow,
    estimate_f_algebraic,
    estimate_f_closed_loop,
    ip_control,
)
from .coordinator import (
    BuildingBounds,
    FleetConfig,
    PowerBand,
    StepRecord,
    clamp_to_bounds,
    coordinator_step,
    per_building_bounds,
    power_band,
)
from .errors import (
    ConfigurationError,
    EstimatorNotReady,
    PlantDivergenceError,
    ProfileError,
    PvflockError,
    WindowError,
)
from .plant import (
    BuildingParams,
    BuildingState,
    DisturbanceSample,
    build_matrices,
    equilibrium,
    plant_derivative,
    plant_step,
    rk4_fleet,
    rk4_fleet_reference,
)
from .scenario import (
    DisturbanceParams,
    Profile,
    PvSourceConfig,
    ScenarioConfig,
    load_config,
    load_profile_csv,
    parse_config_text,
    scenario_building_defaults,
    synth_disturbances,
    synth_pv,
)
from .simulate import (
    MetricsReport,
    SimulationTrace,
    build_fleet,
    compute_metrics,
    read_trace,
    run_simulation,
    trace_header,
    write_trace,
)

__version__ = "0.1.0"

__all__ = [
    "BuildingBounds",
    "BuildingParams",
    "BuildingState",
    "ConfigurationError",
    "DisturbanceParams",
    "DisturbanceSample",
    "Estimator",
    "EstimatorNotReady",
    "FleetConfig",
    "IpController",
    "MetricsReport",
    "PlantDivergenceError",
    "PowerBand",
    "Profile",
    "ProfileError",
    "PvSourceConfig",
    "PvflockError",
    "Sample",
    "SampleWindow",
    "ScenarioConfig",
    "SimulationTrace",
    "StepRecord",
    "WindowError",
    "build_fleet",
    "build_matrices",
    "clamp_to_bounds",
    "compute_metrics",
    "coordinator_step",
    "equilibrium",
    "estimate_f_algebraic",
    "estimate_f_closed_loop",
    "ip_control",
    "load_config",
    "load_profile_csv",
    "parse_config_text",
    "per_building_bounds",
    "plant_derivative",
    "plant_step",
    "power_band",
    "read_trace",
    "rk4_fleet",
    "rk4_fleet_reference",
    "run_simulation",
    "scenario_building_defaults",
    "synth_disturbances",
    "synth_pv",
    "trace_header",
    "write_trace",
]
