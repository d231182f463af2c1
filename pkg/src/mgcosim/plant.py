"""Reduced-order islanded microgrid model.

Each distributed generator (DG) is a droop law

    f = f0 - kp * (Pm - P0) + delta_f

plus a first-order power-measurement filter dPm/dt = wc * (Pe - Pm).
Generators couple through a linearized power flow: the flow on a line
between buses a and b is b_ab * (theta_a - theta_b), with angles kept in
a frame rotating at the rated frequency, and loads drawn at the DG bus
they are co-located with.  Electrical angles obey
dtheta/dt = 2*pi*(f - f0).

State advances with classical fixed-step RK4; the secondary correction
delta_f is held constant across a step.  The model never clamps: if the
state leaves the finite range the integrator aborts, so instability stays
observable instead of being masked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .kernel import SimUnit
from .timebase import SimTime

TWO_PI = 2.0 * math.pi


class PlantDivergedError(Exception):
    """State became non-finite during integration."""

    def __init__(self, t_s: float):
        super().__init__(f"plant state became non-finite at t={t_s} s")
        self.t_s = t_s


@dataclass(frozen=True)
class DGParams:
    """Droop parameters of one grid-forming inverter."""

    dg_id: int
    bus: int
    f0: float = 50.0       # rated frequency, Hz
    p0: float = 0.0        # nominal real power, W
    kp: float = 1e-5       # droop coefficient, Hz/W
    wc: float = 31.4       # power filter cutoff, rad/s

    def __post_init__(self):
        if self.f0 <= 0:
            raise ValueError(f"DG {self.dg_id}: f0 must be positive")
        if self.kp <= 0:
            raise ValueError(f"DG {self.dg_id}: kp must be positive")
        if self.wc <= 0:
            raise ValueError(f"DG {self.dg_id}: wc must be positive")


@dataclass(frozen=True)
class Line:
    """Synchronizing line between two DG buses; coupling in W/rad."""

    bus_a: int
    bus_b: int
    coupling: float = 5e4

    def __post_init__(self):
        if self.coupling <= 0:
            raise ValueError(f"line {self.bus_a}-{self.bus_b}: coupling must be positive")
        if self.bus_a == self.bus_b:
            raise ValueError(f"line {self.bus_a}-{self.bus_b}: self-loop")


@dataclass
class LoadSpec:
    """A real-power load at a DG bus, optionally tripped at a fixed time."""

    load_id: str
    bus: int
    p_demand: float
    trip_at_s: float | None = None
    active: bool = True

    def __post_init__(self):
        if self.p_demand < 0:
            raise ValueError(f"load {self.load_id}: demand must be non-negative")


def apply_events(loads: list[LoadSpec], t_s: float) -> list[LoadSpec]:
    """Deactivate every load whose trip time has passed.  Idempotent;
    a tripped load never comes back."""
    for load in loads:
        if load.trip_at_s is not None and t_s >= load.trip_at_s:
            load.active = False
    return loads


def droop_frequency(pm: float, delta_f: float, p: DGParams) -> float:
    """Instantaneous frequency of one DG from its droop law."""
    return p.f0 - p.kp * (pm - p.p0) + delta_f


def steady_state_frequency(dgs: list[DGParams], total_load: float) -> float:
    """Common frequency after primary control only (delta_f == 0).

    Solves sum_i (f0_i - f)/kp_i + P0_i = total_load for f; with a shared
    f0 this is f0 - (L - sum P0) / sum(1/kp).
    """
    inv = sum(1.0 / p.kp for p in dgs)
    num = sum(p.f0 / p.kp for p in dgs) - (total_load - sum(p.p0 for p in dgs))
    return num / inv


def steady_state_shares(dgs: list[DGParams], total_load: float) -> list[float]:
    """Per-DG power at the primary-only steady state (inverse-kp sharing)."""
    f_ss = steady_state_frequency(dgs, total_load)
    return [(p.f0 - f_ss) / p.kp + p.p0 for p in dgs]


class GridNetwork:
    """The line graph over DG buses; must be connected."""

    def __init__(self, dgs: list[DGParams], lines: list[Line]):
        if not dgs:
            raise ValueError("at least one DG required")
        ids = [p.dg_id for p in dgs]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate DG ids")
        buses = [p.bus for p in dgs]
        if len(set(buses)) != len(buses):
            raise ValueError("DG buses must be distinct")
        self.dgs = list(dgs)
        self.lines = list(lines)
        self.bus_index = {bus: i for i, bus in enumerate(buses)}
        for line in lines:
            if line.bus_a not in self.bus_index or line.bus_b not in self.bus_index:
                raise ValueError(f"line {line.bus_a}-{line.bus_b}: unknown bus")
        if len(dgs) > 1:
            self._check_connected()
        # Dense (index_a, index_b, coupling) triples for the hot loop.
        self._edges = [
            (self.bus_index[l.bus_a], self.bus_index[l.bus_b], l.coupling) for l in lines
        ]

    def _check_connected(self):
        adj = {i: set() for i in range(len(self.dgs))}
        for line in self.lines:
            a = self.bus_index[line.bus_a]
            b = self.bus_index[line.bus_b]
            adj[a].add(b)
            adj[b].add(a)
        seen = {0}
        stack = [0]
        while stack:
            for j in adj[stack.pop()]:
                if j not in seen:
                    seen.add(j)
                    stack.append(j)
        if len(seen) != len(self.dgs):
            raise ValueError("line graph over DG buses is not connected")

    def demand_vector(self, loads: list[LoadSpec]) -> list[float]:
        """Active demand aggregated at each DG index."""
        demand = [0.0] * len(self.dgs)
        for load in loads:
            if load.bus not in self.bus_index:
                raise ValueError(f"load {load.load_id}: unknown bus {load.bus}")
            if load.active:
                demand[self.bus_index[load.bus]] += load.p_demand
        return demand


@dataclass
class PlantState:
    """Continuous states: per-DG electrical angle and filtered power."""

    theta: list[float]
    pm: list[float]

    @classmethod
    def nominal(cls, dgs: list[DGParams]) -> "PlantState":
        return cls(theta=[0.0] * len(dgs), pm=[p.p0 for p in dgs])

    def copy(self) -> "PlantState":
        return PlantState(list(self.theta), list(self.pm))


def electrical_power(network: GridNetwork, theta: list[float],
                     demand: list[float]) -> list[float]:
    """Per-DG delivered power: line exports plus co-located demand.

    Line flows are antisymmetric, so the total equals the total active
    demand exactly.
    """
    pe = list(demand)
    for ia, ib, b in network._edges:
        flow = b * (theta[ia] - theta[ib])
        pe[ia] += flow
        pe[ib] -= flow
    return pe


def derivatives(network: GridNetwork, state: PlantState, delta_f: list[float],
                demand: list[float]) -> tuple[list[float], list[float]]:
    """Time derivatives (dtheta/dt, dPm/dt) at the given state."""
    dgs = network.dgs
    theta, pm = state.theta, state.pm
    pe = electrical_power(network, theta, demand)
    dtheta = [0.0] * len(dgs)
    dpm = [0.0] * len(dgs)
    for i, p in enumerate(dgs):
        f_i = p.f0 - p.kp * (pm[i] - p.p0) + delta_f[i]
        dtheta[i] = TWO_PI * (f_i - p.f0)
        dpm[i] = p.wc * (pe[i] - pm[i])
    return dtheta, dpm


def integrate_step(network: GridNetwork, state: PlantState, delta_f: list[float],
                   demand: list[float], h: float, t_s: float = 0.0) -> PlantState:
    """One classical RK4 step of size h, delta_f and demand held constant."""
    n = len(network.dgs)
    th0, pm0 = state.theta, state.pm

    k1t, k1p = derivatives(network, state, delta_f, demand)
    s2 = PlantState([th0[i] + 0.5 * h * k1t[i] for i in range(n)],
                    [pm0[i] + 0.5 * h * k1p[i] for i in range(n)])
    k2t, k2p = derivatives(network, s2, delta_f, demand)
    s3 = PlantState([th0[i] + 0.5 * h * k2t[i] for i in range(n)],
                    [pm0[i] + 0.5 * h * k2p[i] for i in range(n)])
    k3t, k3p = derivatives(network, s3, delta_f, demand)
    s4 = PlantState([th0[i] + h * k3t[i] for i in range(n)],
                    [pm0[i] + h * k3p[i] for i in range(n)])
    k4t, k4p = derivatives(network, s4, delta_f, demand)

    sixth = h / 6.0
    theta = [th0[i] + sixth * (k1t[i] + 2.0 * k2t[i] + 2.0 * k3t[i] + k4t[i])
             for i in range(n)]
    pm = [pm0[i] + sixth * (k1p[i] + 2.0 * k2p[i] + 2.0 * k3p[i] + k4p[i])
          for i in range(n)]
    for x in theta:
        if not math.isfinite(x):
            raise PlantDivergedError(t_s)
    for x in pm:
        if not math.isfinite(x):
            raise PlantDivergedError(t_s)
    return PlantState(theta, pm)


class PlantUnit(SimUnit):
    """The microgrid as a simulation unit.

    Inputs: one secondary correction per DG (delta_f_<id>, Hz, default 0,
    zero-order held across the step).  Outputs per DG: instantaneous
    frequency f_<id>, delivered power p_e_<id>, filtered power p_m_<id>.
    Load trips are applied at step boundaries before integrating.
    """

    def __init__(self, name: str, network: GridNetwork, loads: list[LoadSpec],
                 initial: PlantState | None = None):
        super().__init__(name)
        self.network = network
        self.loads = loads
        self.state = initial.copy() if initial is not None else PlantState.nominal(network.dgs)
        self._demand = [0.0] * len(network.dgs)
        self._pending_trips: list[float] = []
        self._delta_in = []
        self._f_out = []
        self._pe_out = []
        self._pm_out = []
        for p in network.dgs:
            self._delta_in.append(self.add_input(f"delta_f_{p.dg_id}", "Hz", default=0.0))
            self._f_out.append(self.add_output(f"f_{p.dg_id}", "Hz"))
            self._pe_out.append(self.add_output(f"p_e_{p.dg_id}", "W"))
            self._pm_out.append(self.add_output(f"p_m_{p.dg_id}", "W"))

    def on_initialize(self, t0: SimTime, h_ticks: int) -> None:
        apply_events(self.loads, t0.seconds)
        self._refresh_demand(t0.seconds)
        self._write_outputs([p.value for p in self._delta_in])

    def _refresh_demand(self, t_s: float) -> None:
        self._demand = self.network.demand_vector(self.loads)
        self._pending_trips = sorted(
            l.trip_at_s for l in self.loads
            if l.active and l.trip_at_s is not None and l.trip_at_s > t_s
        )

    def _write_outputs(self, delta: list[float]) -> None:
        theta, pm = self.state.theta, self.state.pm
        pe = electrical_power(self.network, theta, self._demand)
        for i, p in enumerate(self.network.dgs):
            self._f_out[i].value = p.f0 - p.kp * (pm[i] - p.p0) + delta[i]
            self._pe_out[i].value = pe[i]
            self._pm_out[i].value = pm[i]

    def do_step(self, t: SimTime, h_s: float) -> None:
        t_s = t.seconds
        if self._pending_trips and t_s >= self._pending_trips[0]:
            apply_events(self.loads, t_s)
            self._refresh_demand(t_s)
        delta = [p.value for p in self._delta_in]
        self.state = integrate_step(self.network, self.state, delta,
                                    self._demand, h_s, t_s)
        self._write_outputs(delta)
