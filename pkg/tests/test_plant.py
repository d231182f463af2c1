"""Microgrid model: droop law, power flow, dynamics, events, steady state."""

from __future__ import annotations

import math

import pytest

from mgcosim.kernel import Master, MasterConfig, UnitStepError
from mgcosim.plant import (DGParams, GridNetwork, Line, LoadSpec,
                           PlantDivergedError, PlantState, PlantUnit,
                           apply_events, derivatives, droop_frequency,
                           electrical_power, integrate_step,
                           steady_state_frequency, steady_state_shares)


def five_dg_network(kp=1e-5):
    dgs = [DGParams(dg_id=i + 1, bus=i + 1, kp=kp) for i in range(5)]
    lines = [Line(i + 1, i + 2) for i in range(4)]
    return GridNetwork(dgs, lines)


def default_loads():
    return [LoadSpec("load-1", bus=2, p_demand=60e3),
            LoadSpec("load-2", bus=5, p_demand=40e3, trip_at_s=60.0)]


# -- electrical power --------------------------------------------------------

def test_equal_angles_no_load_gives_zero_power():
    net = five_dg_network()
    pe = electrical_power(net, [0.3] * 5, [0.0] * 5)
    assert pe == [0.0] * 5


def test_two_dg_flow_is_antisymmetric():
    net = GridNetwork([DGParams(1, 1), DGParams(2, 2)], [Line(1, 2, coupling=1000.0)])
    pe = electrical_power(net, [0.1, 0.0], [0.0, 0.0])
    assert pe[0] == pytest.approx(100.0)
    assert pe[1] == pytest.approx(-100.0)
    assert pe[0] + pe[1] == 0.0


def test_power_balance_along_a_trajectory():
    net = five_dg_network()
    loads = default_loads()
    demand = net.demand_vector(loads)
    total = sum(demand)
    state = PlantState.nominal(net.dgs)
    for k in range(500):
        state = integrate_step(net, state, [0.0] * 5, demand, 1e-3)
        pe = electrical_power(net, state.theta, demand)
        assert sum(pe) == pytest.approx(total, rel=1e-9)


# -- droop law ---------------------------------------------------------------

def test_droop_at_nominal_point():
    p = DGParams(1, 1, f0=50.0, p0=5e3, kp=2e-5)
    assert droop_frequency(pm=5e3, delta_f=0.0, p=p) == 50.0


def test_droop_example_values():
    p = DGParams(1, 1, f0=50.0, p0=0.0, kp=1e-5)
    assert droop_frequency(20_000.0, 0.0, p) == pytest.approx(49.8, abs=1e-12)
    assert droop_frequency(20_000.0, 0.2, p) == pytest.approx(50.0, abs=1e-12)


# -- derivatives -------------------------------------------------------------

def test_equilibrium_has_zero_pm_derivative_and_common_drift():
    net = five_dg_network()
    demand = [0.0, 60e3, 0.0, 0.0, 40e3]
    # Settle numerically, then check the fixed-point structure.
    state = PlantState.nominal(net.dgs)
    for _ in range(20000):
        state = integrate_step(net, state, [0.0] * 5, demand, 1e-3)
    dtheta, dpm = derivatives(net, state, [0.0] * 5, demand)
    assert all(abs(d) < 1e-6 for d in dpm)
    # All angles drift together at the common droop deviation: relative
    # angles are stationary.
    assert max(dtheta) - min(dtheta) < 1e-9


def test_single_dg_filter_relaxes_with_time_constant():
    dg = DGParams(1, 1, wc=31.4)
    net = GridNetwork([dg], [])
    load = 10e3
    state = PlantState(theta=[0.0], pm=[0.0])
    h = 1e-4
    steps = int(0.1 / h)
    for _ in range(steps):
        state = integrate_step(net, state, [0.0], [load], h)
    expected = load * (1.0 - math.exp(-dg.wc * 0.1))
    assert state.pm[0] == pytest.approx(expected, rel=1e-6)


def test_derivatives_match_finite_differences():
    net = five_dg_network()
    demand = [0.0, 60e3, 0.0, 0.0, 40e3]
    state = PlantState(theta=[0.01, -0.02, 0.005, 0.0, 0.03],
                       pm=[1e3, 2e3, -500.0, 4e3, 0.0])
    delta = [0.05, 0.0, -0.02, 0.01, 0.0]
    eps = 1e-7
    one = integrate_step(net, state, delta, demand, eps)
    two = integrate_step(net, one, delta, demand, eps)
    dtheta, dpm = derivatives(net, state, delta, demand)
    for i in range(5):
        # second-order one-sided difference kills the O(eps) truncation term
        fd_theta = (4.0 * one.theta[i] - two.theta[i] - 3.0 * state.theta[i]) / (2.0 * eps)
        fd_pm = (4.0 * one.pm[i] - two.pm[i] - 3.0 * state.pm[i]) / (2.0 * eps)
        assert fd_theta == pytest.approx(dtheta[i], rel=1e-6, abs=1e-8)
        assert fd_pm == pytest.approx(dpm[i], rel=1e-6, abs=1e-4)


# -- integration guard -------------------------------------------------------

def test_non_finite_state_aborts():
    net = five_dg_network()
    state = PlantState(theta=[float("inf")] + [0.0] * 4, pm=[0.0] * 5)
    with pytest.raises(PlantDivergedError):
        integrate_step(net, state, [0.0] * 5, [0.0] * 5, 1e-3, t_s=1.5)


# -- events ------------------------------------------------------------------

def test_trip_boundary_semantics():
    loads = default_loads()
    apply_events(loads, 59.999)
    assert loads[1].active
    apply_events(loads, 60.000)
    assert not loads[1].active


def test_untripped_load_stays_active_and_reapply_is_idempotent():
    loads = default_loads()
    apply_events(loads, 60.0)
    snapshot = [(l.load_id, l.active) for l in loads]
    apply_events(loads, 70.0)
    assert [(l.load_id, l.active) for l in loads] == snapshot
    assert loads[0].active   # no trip time: active forever


def test_total_demand_non_increasing_at_trip():
    net = five_dg_network()
    loads = default_loads()
    totals = []
    for t in [0.0, 30.0, 59.999, 60.0, 80.0]:
        apply_events(loads, t)
        totals.append(sum(net.demand_vector(loads)))
    assert totals == sorted(totals, reverse=True)
    assert totals[0] == 100e3 and totals[-1] == 60e3


# -- steady state ------------------------------------------------------------

def test_steady_state_identical_dgs():
    dgs = [DGParams(i + 1, i + 1, kp=1e-5) for i in range(5)]
    assert steady_state_frequency(dgs, 100e3) == pytest.approx(49.8, abs=1e-12)
    shares = steady_state_shares(dgs, 100e3)
    assert shares == pytest.approx([20e3] * 5, rel=1e-12)


def test_steady_state_nominal_loading_gives_f0():
    dgs = [DGParams(i + 1, i + 1, p0=10e3) for i in range(3)]
    assert steady_state_frequency(dgs, 30e3) == pytest.approx(50.0, abs=1e-12)


def test_steady_state_inverse_kp_sharing():
    dgs = [DGParams(1, 1, kp=1e-5), DGParams(2, 2, kp=2e-5)]
    shares = steady_state_shares(dgs, 30e3)
    assert shares == pytest.approx([20e3, 10e3], rel=1e-12)


# -- plant unit on the master -------------------------------------------------

def run_plant(loads, t_end_s, h="0.001"):
    net = five_dg_network()
    unit = PlantUnit("plant", net, loads)
    master = Master(MasterConfig(step_s=h))
    master.register(unit)
    master.initialize()
    rows = []

    def observe(t, m):
        rows.append((t.seconds,
                     [unit.port(f"f_{k}").value for k in range(1, 6)],
                     [unit.port(f"p_e_{k}").value for k in range(1, 6)],
                     [unit.port(f"p_m_{k}").value for k in range(1, 6)]))

    master.run(until_s=t_end_s, observers=[observe])
    return unit, rows


def test_droop_identity_holds_at_every_sample():
    unit, rows = run_plant(default_loads(), t_end_s="0.5")
    for _, fs, _, pms in rows:
        for i, p in enumerate(unit.network.dgs):
            assert fs[i] == p.f0 - p.kp * (pms[i] - p.p0) + 0.0


def test_primary_only_converges_to_closed_form():
    unit, rows = run_plant([LoadSpec("l", bus=2, p_demand=100e3)], t_end_s="5.0")
    f_ss = steady_state_frequency(unit.network.dgs, 100e3)
    shares = steady_state_shares(unit.network.dgs, 100e3)
    _, fs, pes, _ = rows[-1]
    for i in range(5):
        assert abs(fs[i] - f_ss) < 1e-3
        assert abs(pes[i] - shares[i]) < 0.01 * 100e3


def test_plant_divergence_surfaces_as_unit_step_error():
    net = five_dg_network()
    unit = PlantUnit("plant", net, [])
    unit.state.theta[0] = float("nan")
    master = Master(MasterConfig(step_s="0.001"))
    master.register(unit)
    master.initialize()
    with pytest.raises(UnitStepError) as excinfo:
        master.step()
    assert isinstance(excinfo.value.cause, PlantDivergedError)


def test_rk4_order_on_step_halving():
    """Global error vs an h/8 reference should shrink ~16x per halving."""
    net = five_dg_network()
    demand = [0.0, 60e3, 0.0, 0.0, 40e3]
    t_end = 1.0

    def trace(h):
        state = PlantState.nominal(net.dgs)
        out = {}
        steps = int(round(t_end / h))
        for k in range(1, steps + 1):
            state = integrate_step(net, state, [0.0] * 5, demand, h)
            t = k * h
            out[round(t, 9)] = list(state.pm)
        return out

    h = 4e-3
    ref = trace(h / 8)
    errs = []
    for step in (h, h / 2):
        tr = trace(step)
        err = max(abs(tr[t][i] - ref[t][i])
                  for t in tr if t in ref for i in range(5))
        errs.append(err)
    ratio = errs[0] / errs[1]
    assert 8.0 <= ratio <= 32.0
