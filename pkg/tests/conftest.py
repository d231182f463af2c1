from __future__ import annotations

from dataclasses import replace

import pytest

from mgcosim.control import ConsensusAgentUnit, PIParams, metropolis_weights
from mgcosim.kernel import Master, MasterConfig, SimUnit
from mgcosim.network import CommEmulatorUnit, LinkParams, preset_link
from mgcosim.plant import LoadSpec
from mgcosim.scenario import Scenario, load_bundled_scenario

AGENT_EDGES = [(1, 4), (2, 3), (3, 4), (3, 5)]
AGENT_IDS = [1, 2, 3, 4, 5]


class ConstantSource(SimUnit):
    def __init__(self, name, value, tag="Hz"):
        super().__init__(name)
        self.out = self.add_output("y", tag, initial=value)




def shorten(scn: Scenario, t_end_s: float, decimation: int | None = None) -> Scenario:
    master = replace(scn.master, t_end_s=t_end_s)
    outputs = scn.outputs if decimation is None else replace(
        scn.outputs, trace_decimation=decimation)
    return replace(scn, master=master, outputs=outputs)


def with_trip_at(scn: Scenario, trip_s: float) -> Scenario:
    """Move every timed load trip to trip_s (keeps events inside short runs)."""
    loads = tuple(
        LoadSpec(l.load_id, l.bus, l.p_demand,
                 trip_s if l.trip_at_s is not None else None)
        for l in scn.plant.loads)
    return replace(scn, plant=replace(scn.plant, loads=loads))


@pytest.fixture(scope="session")
def baseline_centralized() -> Scenario:
    return load_bundled_scenario("paper-baseline-centralized-ideal")


@pytest.fixture(scope="session")
def baseline_distributed() -> Scenario:
    return load_bundled_scenario("paper-baseline-distributed-ideal")


def build_consensus_sim(x0, n_consensus, preset="ideal", sigma_zero=True,
                        pi=PIParams(kp=0.0, ki=0.0), msg_bits=1536,
                        timeout_s=None, seed=42):
    distances = {(1, 4): 4000.0, (2, 3): 6000.0, (3, 4): 8000.0, (3, 5): 2000.0}
    links = {}
    routes = {}
    for (a, b), dist in distances.items():
        for lid, src, dst in ((f"{a}-{b}", a, b), (f"{b}-{a}", b, a)):
            base = preset_link(preset, lid, dist, msg_bits)
            if sigma_zero and base.noise_sigma_s:
                base = LinkParams(lid, base.distance_m, base.data_rate_bps,
                                  base.prop_speed_mps, base.proc_delay_s, 0.0, 0.0)
            links[lid] = base
            routes[(f"agent-{src}", f"agent-{dst}")] = lid
    master = Master(MasterConfig(step_s="0.001", seed=seed))
    comm = CommEmulatorUnit("comm", links, routes, seed)
    master.register(comm)
    weights = metropolis_weights(AGENT_IDS, AGENT_EDGES)
    agents = []
    for k in AGENT_IDS:
        src = ConstantSource(f"src-{k}", x0[k - 1])
        master.register(src)
        agent = ConsensusAgentUnit(f"agent-{k}", comm, k, weights, 50.0, pi,
                                   n_consensus=n_consensus, msg_size_bits=msg_bits,
                                   round_timeout_s=timeout_s)
        master.register(agent)
        master.connect(src.out, agent.port("f_meas"))
        agents.append(agent)
    master.initialize()
    return master, agents, weights


def run_until_rounds(master, agents, rounds, max_steps=200_000):
    for _ in range(max_steps):
        if all(a.rounds_completed >= rounds for a in agents):
            return
        master.step()
    raise AssertionError("consensus rounds did not complete in time")
