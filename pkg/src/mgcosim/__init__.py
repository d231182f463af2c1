"""mgcosim: co-simulation of islanded microgrid secondary frequency control
over emulated communication networks.

The package couples three kinds of simulation units on one deterministic
fixed-step master: a reduced-order droop-controlled microgrid, a
point-to-point latency/loss emulator, and secondary frequency controllers
in either centralized (MGCC) or distributed (consensus multi-agent) form.
Scenarios are declarative YAML documents; experiments emit CSV traces and
structured metrics.
"""

from .control import (ConsensusAgentUnit, MgccUnit, PIParams, PIState,
                      WeightMatrix, consensus_oracle, metropolis_weights,
                      pi_step)
from .experiments import (RunResult, SweepResult, build_simulation,
                          compare_scenarios, gain_sweep, run_scenario)
from .kernel import (ConfigurationError, LifecycleError, Master, MasterConfig,
                     Port, SimUnit, UnitStepError)
from .metrics import FrequencyScan, RunMetrics, scan_samples
from .network import (CommEmulatorUnit, LatencyStats, LinkParams, Packet,
                      latency_floor, preset_link, sample_latency)
from .plant import (DGParams, GridNetwork, Line, LoadSpec, PlantDivergedError,
                    PlantState, PlantUnit, apply_events, derivatives,
                    droop_frequency, electrical_power, integrate_step,
                    steady_state_frequency, steady_state_shares)
from .scenario import (Scenario, ScenarioError, bundled_scenario_names,
                       emit_scenario, load_bundled_scenario,
                       load_scenario_file, parse_scenario)
from .timebase import SimTime, exact_fraction, ticks_for

__version__ = "0.1.0"

__all__ = [
    "ConsensusAgentUnit", "MgccUnit", "PIParams", "PIState", "WeightMatrix",
    "consensus_oracle", "metropolis_weights", "pi_step",
    "RunResult", "SweepResult", "build_simulation", "compare_scenarios",
    "gain_sweep", "run_scenario",
    "ConfigurationError", "LifecycleError", "Master", "MasterConfig", "Port",
    "SimUnit", "UnitStepError",
    "FrequencyScan", "RunMetrics", "scan_samples",
    "CommEmulatorUnit", "LatencyStats", "LinkParams", "Packet",
    "latency_floor", "preset_link", "sample_latency",
    "DGParams", "GridNetwork", "Line", "LoadSpec", "PlantDivergedError",
    "PlantState", "PlantUnit", "apply_events", "derivatives",
    "droop_frequency", "electrical_power", "integrate_step",
    "steady_state_frequency", "steady_state_shares",
    "Scenario", "ScenarioError", "bundled_scenario_names", "emit_scenario",
    "load_bundled_scenario", "load_scenario_file", "parse_scenario",
    "SimTime", "exact_fraction", "ticks_for",
]
