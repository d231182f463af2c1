"""Secondary frequency control: centralized MGCC and distributed consensus.

Both strategies compute the same PI correction

    delta_f = Kp * err + Ki * integral(err)

on a measured frequency error and hand it to the droop loops, but they
obtain the measurement differently.  The central controller reads one
remote measurement over an uplink and broadcasts its output over one
downlink per DG.  The distributed agents each read their local DG
frequency, run synchronous Metropolis-weighted average consensus over
neighbor links for a fixed number of iterations, and feed the agreed
average to a local PI.  All remote values travel as packets through the
communication emulator; agents share no state.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction

from .kernel import ConfigurationError, SimUnit
from .network import CommEmulatorUnit
from .timebase import SimTime, ticks_for

log = logging.getLogger(__name__)


# -- PI regulator ------------------------------------------------------------

@dataclass(frozen=True)
class PIParams:
    kp: float                  # Hz out per Hz error
    ki: float                  # 1/s
    clamp: float | None = None  # symmetric output limit, Hz

    def __post_init__(self):
        if self.ki < 0:
            raise ValueError("Ki must be non-negative")
        if self.clamp is not None and self.clamp <= 0:
            raise ValueError("clamp must be positive when set")


@dataclass
class PIState:
    integral: float = 0.0      # Hz*s
    output: float = 0.0        # Hz


def pi_step(error: float, dt: float, params: PIParams, state: PIState) -> float:
    """Advance the PI one update of length dt and return the new output.

    Forward-Euler integral with conditional anti-windup: while the output
    sits on the clamp and the error pushes further into it, the integrator
    freezes; the moment the error reverses, integration resumes, so
    recovery starts within one update.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    candidate = state.integral + error * dt
    u = params.kp * error + params.ki * candidate
    clamp = params.clamp
    if clamp is not None and abs(u) > clamp:
        limited = clamp if u > 0 else -clamp
        if error * limited <= 0:
            state.integral = candidate   # error pulls back out: keep integrating
        state.output = limited
        return limited
    state.integral = candidate
    state.output = u
    return u


# -- Metropolis-weighted average consensus -----------------------------------

@dataclass(frozen=True)
class WeightMatrix:
    """Symmetric doubly stochastic consensus weights over agent ids."""

    ids: tuple[int, ...]
    a: tuple[tuple[float, ...], ...]

    def index(self, agent_id: int) -> int:
        return self.ids.index(agent_id)

    def row(self, agent_id: int) -> tuple[float, ...]:
        return self.a[self.index(agent_id)]

    @property
    def n(self) -> int:
        return len(self.ids)


def _normalize_edges(agent_ids, edges) -> set[frozenset]:
    known = set(agent_ids)
    normalized = set()
    for a, b in edges:
        if a == b:
            raise ConfigurationError(f"self-loop on agent {a}")
        if a not in known or b not in known:
            raise ConfigurationError(f"edge {a}-{b} references unknown agent")
        normalized.add(frozenset((a, b)))
    return normalized


def metropolis_weights(agent_ids, edges) -> WeightMatrix:
    """Metropolis weights for an undirected connected agent graph.

    Off-diagonal a_kj = 1/(1 + max(deg_k, deg_j)) on edges, diagonal the
    row remainder.  Entries are built as exact rationals and converted to
    float at the end, so e.g. a diagonal of 5/12 is the correctly rounded
    double, not an accumulation artifact.
    """
    ids = tuple(agent_ids)
    if len(set(ids)) != len(ids):
        raise ConfigurationError("duplicate agent ids")
    edge_set = _normalize_edges(ids, edges)

    neighbors = {k: set() for k in ids}
    for edge in edge_set:
        a, b = tuple(edge)
        neighbors[a].add(b)
        neighbors[b].add(a)

    # Consensus over a disconnected graph cannot reach the global mean.
    seen = {ids[0]}
    stack = [ids[0]]
    while stack:
        for j in neighbors[stack.pop()]:
            if j not in seen:
                seen.add(j)
                stack.append(j)
    if len(seen) != len(ids):
        raise ConfigurationError("agent graph is not connected")

    deg = {k: len(neighbors[k]) for k in ids}
    pos = {k: i for i, k in enumerate(ids)}
    rows = []
    for k in ids:
        row = [Fraction(0)] * len(ids)
        for j in neighbors[k]:
            row[pos[j]] = Fraction(1, 1 + max(deg[k], deg[j]))
        row[pos[k]] = Fraction(1) - sum(row)
        rows.append(tuple(float(x) for x in row))
    return WeightMatrix(ids=ids, a=tuple(rows))


def consensus_oracle(weights: WeightMatrix, x0, n: int) -> list[float]:
    """Reference result of n synchronous consensus iterations: W^n x0.

    Accumulates each row the same way an agent does (own value first, then
    neighbors in ascending id order) so the protocol can be compared
    against it bit for bit.
    """
    if n < 0:
        raise ValueError("iteration count must be non-negative")
    if len(x0) != weights.n:
        raise ValueError("x0 length does not match weight matrix")
    x = [float(v) for v in x0]
    a = weights.a
    size = weights.n
    for _ in range(n):
        nxt = []
        for k in range(size):
            row = a[k]
            acc = row[k] * x[k]
            for j in range(size):
                if j != k and row[j] != 0.0:
                    acc += row[j] * x[j]
            nxt.append(acc)
        x = nxt
    return x


# -- centralized strategy ----------------------------------------------------

class MgccUnit(SimUnit):
    """Central secondary controller plus its remote measurement sensor.

    Every update period the sensor side samples the measured frequency
    port and sends it up the uplink; the controller side consumes the
    newest delivered measurement (zero-order hold between arrivals), runs
    the PI, and broadcasts the correction over one downlink per DG.  The
    DG-side receivers apply the newest delivered correction with
    zero-order hold; nothing is ever extrapolated.
    """

    def __init__(self, name: str, comm: CommEmulatorUnit, f_ref: float,
                 pi_params: PIParams, dg_ids, uplink_id: str,
                 downlink_ids: dict[int, str], update_period_s,
                 sample_size_bits: int = 1024):
        super().__init__(name)
        self.comm = comm
        self.f_ref = f_ref
        self.pi_params = pi_params
        self.pi_state = PIState()
        self.dg_ids = tuple(dg_ids)
        missing = [k for k in self.dg_ids if k not in downlink_ids]
        if missing:
            raise ConfigurationError(f"no downlink configured for DGs {missing}")
        self.uplink_id = uplink_id
        self.downlink_ids = dict(downlink_ids)
        self.update_period_s = update_period_s
        self.sample_size_bits = sample_size_bits
        self._period_ticks = None
        self._last_meas: float | None = None

        self.f_meas = self.add_input("f_meas", "Hz")
        self._delta_ports = {
            k: self.add_output(f"delta_f_{k}", "Hz", initial=0.0) for k in self.dg_ids
        }
        self.sensor_endpoint = f"{name}:sensor"
        self.mgcc_endpoint = f"{name}:mgcc"

    def controller_endpoint(self, dg_id: int) -> str:
        return f"{self.name}:ctrl-{dg_id}"

    def on_initialize(self, t0: SimTime, h_ticks: int) -> None:
        try:
            self._period_ticks = ticks_for(self.update_period_s, t0.resolution)
        except ValueError as exc:
            raise ConfigurationError(str(exc)) from None
        if self._period_ticks % h_ticks != 0:
            raise ConfigurationError(
                "secondary update period must be a multiple of the master step")
        self._period_s = float(Fraction(self._period_ticks) * t0.resolution)
        if self.comm.route(self.sensor_endpoint, self.mgcc_endpoint) != self.uplink_id:
            raise ConfigurationError(
                f"uplink {self.uplink_id!r} not routed for {self.name!r}")
        for k in self.dg_ids:
            if self.comm.route(self.mgcc_endpoint,
                               self.controller_endpoint(k)) != self.downlink_ids[k]:
                raise ConfigurationError(
                    f"downlink {self.downlink_ids[k]!r} not routed for DG {k}")

    def do_step(self, t: SimTime, h_s: float) -> None:
        for pkt in self.comm.poll_delivered(self.mgcc_endpoint, t):
            self._last_meas = pkt.payload
        for k in self.dg_ids:
            delivered = self.comm.poll_delivered(self.controller_endpoint(k), t)
            if delivered:
                self._delta_ports[k].value = delivered[-1].payload

        if t.ticks % self._period_ticks == 0:
            self.comm.send(self.sensor_endpoint, self.mgcc_endpoint,
                           self.f_meas.value, self.sample_size_bits, t)
            if self._last_meas is not None:
                err = self.f_ref - self._last_meas
                out = pi_step(err, self._period_s, self.pi_params, self.pi_state)
                for k in self.dg_ids:
                    self.comm.send(self.mgcc_endpoint, self.controller_endpoint(k),
                                   out, self.sample_size_bits, t)


# -- distributed strategy ----------------------------------------------------

@dataclass(frozen=True, slots=True)
class ConsensusMsg:
    """One consensus exchange: sender, round number, iteration tag, value."""

    src: int
    round_no: int
    tag: int
    value: float


class ConsensusAgentUnit(SimUnit):
    """One agent of the synchronous average-consensus secondary control.

    Protocol per round: sample the local frequency, then for each
    iteration send (round, i, value) to every neighbor, wait until the
    iteration-i value from every neighbor has arrived (early messages are
    buffered, never dropped), apply the weighted update, and after
    n_consensus iterations feed the agreed value to the local PI and start
    over.  Per-link FIFO plus the round/iteration tags make the matching
    unambiguous.  With the optional round timeout disabled (the default),
    a lost message stalls the round forever, faithfully to the synchronous
    protocol.
    """

    def __init__(self, name: str, comm: CommEmulatorUnit, agent_id: int,
                 weights: WeightMatrix, f_ref: float, pi_params: PIParams,
                 n_consensus: int, msg_size_bits: int = 1536,
                 round_timeout_s: float | None = None):
        super().__init__(name)
        if n_consensus < 1:
            raise ConfigurationError("n_consensus must be at least 1")
        if round_timeout_s is not None and round_timeout_s <= 0:
            raise ConfigurationError("round timeout must be positive when set")
        self.comm = comm
        self.agent_id = agent_id
        self.f_ref = f_ref
        self.pi_params = pi_params
        self.pi_state = PIState()
        self.n_consensus = n_consensus
        self.msg_size_bits = msg_size_bits
        self.round_timeout_s = round_timeout_s

        row = weights.row(agent_id)
        self.self_weight = row[weights.index(agent_id)]
        self.neighbor_weights = {
            j: row[weights.index(j)]
            for j in weights.ids
            if j != agent_id and row[weights.index(j)] != 0.0
        }
        self.neighbors = tuple(sorted(self.neighbor_weights))
        if not self.neighbors:
            raise ConfigurationError(f"agent {agent_id} has no neighbors")
        self._neighbor_endpoints = tuple(f"agent-{j}" for j in self.neighbors)

        self._inbox: dict[int, list[ConsensusMsg]] = {j: [] for j in self.neighbors}
        self._round = 0
        self._iteration = 0
        self._value = 0.0
        self._exchanging = False
        self._round_start_s = 0.0
        self._last_pi_s = 0.0
        self.last_round_output: float | None = None
        self.rounds_completed = 0
        self.rounds_abandoned = 0
        self.protocol_errors = 0

        self.endpoint = f"agent-{agent_id}"
        self.f_meas = self.add_input("f_meas", "Hz")
        self.delta_f = self.add_output("delta_f", "Hz", initial=0.0)
        self.consensus_out = self.add_output("consensus", "Hz", initial=float("nan"))
        self.iteration_out = self.add_output("iteration", "dimensionless", initial=0.0)

    @property
    def cumulative_iterations(self) -> int:
        """Total consensus updates applied since start, across rounds."""
        return self.rounds_completed * self.n_consensus + self._iteration

    def on_initialize(self, t0: SimTime, h_ticks: int) -> None:
        missing = [j for j in self.neighbors
                   if self.comm.route(self.endpoint, f"agent-{j}") is None]
        if missing:
            raise ConfigurationError(
                f"agent {self.agent_id}: no link to neighbors {missing}")

    def _ingest(self, t: SimTime) -> None:
        for pkt in self.comm.poll_delivered(self.endpoint, t):
            msg = pkt.payload
            box = self._inbox.get(msg.src)
            if box is None:
                self.protocol_errors += 1
                log.warning("agent %s: message from non-neighbor %s ignored",
                            self.agent_id, msg.src)
                continue
            box.append(msg)

    def _start_round(self, t: SimTime) -> None:
        self._round += 1
        self._iteration = 0
        self._value = self.f_meas.value
        self._round_start_s = t.seconds
        self._exchanging = True
        self._send_current(t)

    def _send_current(self, t: SimTime) -> None:
        msg = ConsensusMsg(self.agent_id, self._round, self._iteration, self._value)
        send = self.comm.send
        for dst in self._neighbor_endpoints:
            send(self.endpoint, dst, msg, self.msg_size_bits, t)

    def _heads_ready(self) -> bool:
        for j in self.neighbors:
            box = self._inbox[j]
            while box and (box[0].round_no, box[0].tag) < (self._round, self._iteration):
                box.pop(0)   # stale: only possible after an abandoned round
            if not box:
                return False
            head = box[0]
            if (head.round_no, head.tag) != (self._round, self._iteration):
                return False
        return True

    def do_step(self, t: SimTime, h_s: float) -> None:
        self._ingest(t)
        if not self._exchanging:
            self._start_round(t)
        while self._exchanging:
            if (self.round_timeout_s is not None
                    and t.seconds - self._round_start_s > self.round_timeout_s):
                self.rounds_abandoned += 1
                self._start_round(t)
                continue
            if not self._heads_ready():
                break
            acc = self.self_weight * self._value
            for j in self.neighbors:
                acc += self.neighbor_weights[j] * self._inbox[j].pop(0).value
            self._value = acc
            self._iteration += 1
            if self._iteration >= self.n_consensus:
                self._deliver(t)
                self._start_round(t)
            else:
                self._send_current(t)
        self.iteration_out.value = float(self._iteration)

    def _deliver(self, t: SimTime) -> None:
        self.last_round_output = self._value
        self.rounds_completed += 1
        self.consensus_out.value = self._value
        dt = t.seconds - self._last_pi_s
        if dt > 0:
            err = self.f_ref - self._value
            self.delta_f.value = pi_step(err, dt, self.pi_params, self.pi_state)
            self._last_pi_s = t.seconds
        self._exchanging = False
