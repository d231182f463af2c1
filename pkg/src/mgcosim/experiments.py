"""Experiment execution: single runs, scenario comparison, PI gain sweeps.

Builds the unit graph a scenario describes (plant, communication
emulator, secondary controllers), runs the master to the configured end
time, and reduces the run to a trace plus metrics.  Sweeps fan out over a
gain grid with one independent master per point and a deterministic
sub-seed per point, so results are reproducible regardless of worker
count or scheduling.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .control import ConsensusAgentUnit, MgccUnit, PIParams, metropolis_weights
from .kernel import ConfigurationError, Master, MasterConfig, UnitStepError
from .metrics import FrequencyScan, RunMetrics
from .network import CommEmulatorUnit, LatencyStats
from .plant import GridNetwork, LoadSpec, PlantDivergedError, PlantUnit
from .rng import subseed
from .scenario import Scenario, agent_edges, build_link_set, uplink_id

@dataclass
class SimBuild:
    master: Master
    plant: PlantUnit
    comm: CommEmulatorUnit | None
    f_ports: list
    trace_header: list[str]
    trace_ports: list


def event_time(scn: Scenario) -> float:
    trips = [l.trip_at_s for l in scn.plant.loads if l.trip_at_s is not None]
    return min(trips) if trips else 0.0


def build_simulation(scn: Scenario) -> SimBuild:
    """Instantiate and wire all units for one scenario (not yet initialized)."""
    master = Master(MasterConfig(step_s=scn.master.step_s,
                                 resolution_s=scn.master.resolution_s,
                                 seed=scn.seed,
                                 end_time_s=scn.master.t_end_s))
    grid = GridNetwork(list(scn.plant.dgs), list(scn.plant.lines))
    loads = [LoadSpec(l.load_id, l.bus, l.p_demand, l.trip_at_s) for l in scn.plant.loads]
    plant = PlantUnit("plant", grid, loads)
    master.register(plant)

    dg_ids = [p.dg_id for p in scn.plant.dgs]
    f_ref = scn.plant.f_nominal()
    control = scn.control
    pi = PIParams(kp=control.pi_kp, ki=control.pi_ki, clamp=control.pi_clamp)
    comm = None
    agents: list[ConsensusAgentUnit] = []

    if control.mode == "centralized":
        links = build_link_set(scn)
        routes = {("mgcc:sensor", "mgcc:mgcc"): uplink_id(scn)}
        for k in dg_ids:
            routes[("mgcc:mgcc", f"mgcc:ctrl-{k}")] = f"c-{k}"
        comm = CommEmulatorUnit("comm", links, routes, scn.seed,
                                keep_packets=scn.outputs.dump_latency_samples)
        master.register(comm)
        mgcc = MgccUnit("mgcc", comm, f_ref, pi, dg_ids,
                        uplink_id=uplink_id(scn),
                        downlink_ids={k: f"c-{k}" for k in dg_ids},
                        update_period_s=control.mgcc_update_period_s,
                        sample_size_bits=control.sample_size_bits)
        master.register(mgcc)
        m = control.mgcc_measurement_dg
        master.connect(plant.port(f"f_{m}"), mgcc.port("f_meas"))
        for k in dg_ids:
            master.connect(mgcc.port(f"delta_f_{k}"), plant.port(f"delta_f_{k}"))

    elif control.mode == "distributed":
        links = build_link_set(scn)
        routes = {}
        for lid in links:
            a, b = lid.split("-")
            routes[(f"agent-{a}", f"agent-{b}")] = lid
        comm = CommEmulatorUnit("comm", links, routes, scn.seed,
                                keep_packets=scn.outputs.dump_latency_samples)
        master.register(comm)
        weights = metropolis_weights(dg_ids, agent_edges(scn))
        for k in dg_ids:
            agent = ConsensusAgentUnit(
                f"agent-{k}", comm, k, weights, f_ref, pi,
                n_consensus=control.n_consensus,
                msg_size_bits=control.consensus_size_bits,
                round_timeout_s=control.round_timeout_s)
            master.register(agent)
            master.connect(plant.port(f"f_{k}"), agent.port("f_meas"))
            master.connect(agent.port("delta_f"), plant.port(f"delta_f_{k}"))
            agents.append(agent)

    f_ports = [plant.port(f"f_{k}") for k in dg_ids]
    header = ["t_s"]
    trace_ports = []
    for prefix, maker in (("f", lambda k: plant.port(f"f_{k}")),
                          ("p_e", lambda k: plant.port(f"p_e_{k}")),
                          ("delta_f", lambda k: plant.port(f"delta_f_{k}"))):
        for k in dg_ids:
            header.append(f"{prefix}_{k}")
            trace_ports.append(maker(k))
    for prefix, port_name in (("consensus", "consensus"), ("iteration", "iteration")):
        for agent in agents:
            header.append(f"{prefix}_{agent.agent_id}")
            trace_ports.append(agent.port(port_name))

    return SimBuild(master=master, plant=plant, comm=comm, f_ports=f_ports,
                    trace_header=header, trace_ports=trace_ports)


class TraceRecorder:
    """Observer keeping every k-th post-step sample of the trace ports."""

    def __init__(self, trace_ports, decimation: int):
        self.ports = trace_ports
        self.decimation = max(1, decimation)
        self.rows: list[list[float]] = []
        self._step = 0

    def __call__(self, t, master) -> None:
        self._step += 1
        if self._step % self.decimation == 0:
            row = [t.seconds]
            row.extend(p.value for p in self.ports)
            self.rows.append(row)


class _MetricsFeeder:
    def __init__(self, f_ports, scan: FrequencyScan):
        self.ports = f_ports
        self.scan = scan

    def __call__(self, t, master) -> None:
        self.scan.feed(t.seconds, [p.value for p in self.ports])


@dataclass
class RunResult:
    scenario: Scenario
    metrics: RunMetrics
    trace_header: list[str]
    trace_rows: list[list[float]]
    link_stats: list[LatencyStats]
    link_drops: dict[str, int]
    link_sent: dict[str, int]
    link_samples: dict[str, list[float]]
    packet_log: list

    @property
    def exit_code(self) -> int:
        return self.metrics.exit_code


def run_scenario(scn: Scenario, collect_trace: bool = True,
                 band_hz: float | None = None,
                 final_window_s: float | None = None) -> RunResult:
    """Build, run to t_end, and reduce one scenario.

    The settling band and trailing error window default to the scenario's
    outputs section.  Plant divergence (non-finite state) ends the run
    early with verdict "diverged"; any other unit failure propagates as
    UnitStepError.
    """
    build = build_simulation(scn)
    scan = FrequencyScan(f_ref=scn.plant.f_nominal(),
                         band_hz=scn.outputs.settling_band_hz
                         if band_hz is None else band_hz,
                         event_time_s=event_time(scn),
                         t_end_s=scn.master.t_end_s,
                         final_window_s=scn.outputs.final_window_s
                         if final_window_s is None else final_window_s)
    observers = [_MetricsFeeder(build.f_ports, scan)]
    recorder = None
    if collect_trace:
        recorder = TraceRecorder(build.trace_ports, scn.outputs.trace_decimation)
        observers.append(recorder)

    build.master.initialize()
    try:
        build.master.run(scn.master.t_end_s, observers)
    except UnitStepError as exc:
        if isinstance(exc.cause, PlantDivergedError):
            scan.mark_diverged(exc.time.seconds)
        else:
            raise
    finally:
        build.master.terminate()

    stats = []
    drops = {}
    sent = {}
    samples = {}
    packet_log = []
    if build.comm is not None:
        for lid in sorted(build.comm.link_ids()):
            report = build.comm.latency_report(lid)
            if report is not None:
                stats.append(report)
                samples[lid] = build.comm.latency_samples(lid)
            drops[lid] = build.comm.drop_count(lid)
            sent[lid] = build.comm.sent_count(lid)
        if build.comm.keep_packets:
            packet_log = build.comm.packet_log()

    return RunResult(
        scenario=scn,
        metrics=scan.result(),
        trace_header=build.trace_header,
        trace_rows=recorder.rows if recorder is not None else [],
        link_stats=stats,
        link_drops=drops,
        link_sent=sent,
        link_samples=samples,
        packet_log=packet_log,
    )


# -- comparison --------------------------------------------------------------

@dataclass
class ComparisonRow:
    name: str
    network: str
    verdict: str
    settling_time_s: float | None
    steady_state_error_hz: float | None
    nadir_hz: float | None
    zenith_hz: float | None


def compare_scenarios(scenarios: list[Scenario],
                      band_hz: float | None = None) -> list[ComparisonRow]:
    """Run several scenarios that differ only in their network section."""
    if len(scenarios) < 2:
        raise ConfigurationError("compare needs at least two scenarios")
    first = scenarios[0]
    for other in scenarios[1:]:
        if other.control != first.control:
            raise ConfigurationError(
                f"control sections differ: {first.name!r} vs {other.name!r}")
        if other.plant != first.plant:
            raise ConfigurationError(
                f"plant sections differ: {first.name!r} vs {other.name!r}")
        if other.master != first.master:
            raise ConfigurationError(
                f"master sections differ: {first.name!r} vs {other.name!r}")
    rows = []
    for scn in scenarios:
        result = run_scenario(scn, collect_trace=False, band_hz=band_hz)
        m = result.metrics
        rows.append(ComparisonRow(
            name=scn.name, network=scn.network.scenario, verdict=m.verdict,
            settling_time_s=m.settling_time_s,
            steady_state_error_hz=m.steady_state_error_hz,
            nadir_hz=m.nadir_hz, zenith_hz=m.zenith_hz))
    return rows


# -- gain sweep ---------------------------------------------------------------

@dataclass
class SweepPoint:
    kp: float
    ki: float
    seed: int
    verdict: str
    settling_time_s: float | None
    steady_state_error_hz: float | None


@dataclass
class SweepResult:
    base_kp: float
    base_ki: float
    points: list[SweepPoint]

    def settled(self) -> list[SweepPoint]:
        return [p for p in self.points if p.verdict == "settled"]

    def best(self) -> SweepPoint | None:
        """Fastest-settling stable point; ties go to the smallest gains."""
        candidates = self.settled()
        if not candidates:
            return None
        return min(candidates, key=lambda p: (p.settling_time_s, p.kp, p.ki))

    def ki_direction(self) -> str:
        """Whether the best stabilizing Ki sits above or below the base Ki."""
        best = self.best()
        if best is None:
            return "none"
        if best.ki > self.base_ki:
            return "above"
        if best.ki < self.base_ki:
            return "below"
        return "baseline"


def _sweep_point(args) -> tuple[int, SweepPoint]:
    index, scn, kp, ki = args
    seed = subseed(scn.seed, f"sweep:kp={kp!r}:ki={ki!r}")
    point_scn = scn.with_control(pi_kp=kp, pi_ki=ki).with_seed(seed)
    result = run_scenario(point_scn, collect_trace=False)
    m = result.metrics
    return index, SweepPoint(kp=kp, ki=ki, seed=seed, verdict=m.verdict,
                             settling_time_s=m.settling_time_s,
                             steady_state_error_hz=m.steady_state_error_hz)


def gain_sweep(scn: Scenario, kp_values, ki_values,
               workers: int | None = None) -> SweepResult:
    """One full run per (Kp, Ki) grid point, each with its own sub-seed.

    Points execute in parallel when workers > 1; the result is assembled
    by grid index, so the report never depends on scheduling.
    """
    kp_values = list(kp_values)
    ki_values = list(ki_values)
    if not kp_values or not ki_values:
        raise ConfigurationError("gain sweep needs a non-empty Kp and Ki grid")
    tasks = []
    index = 0
    for kp in kp_values:
        for ki in ki_values:
            tasks.append((index, scn, kp, ki))
            index += 1
    if workers is None:
        workers = min(len(tasks), os.cpu_count() or 1)
    results: dict[int, SweepPoint] = {}
    if workers <= 1:
        for task in tasks:
            i, point = _sweep_point(task)
            results[i] = point
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for i, point in pool.map(_sweep_point, tasks):
                results[i] = point
    points = [results[i] for i in range(len(tasks))]
    return SweepResult(base_kp=scn.control.pi_kp, base_ki=scn.control.pi_ki,
                       points=points)
