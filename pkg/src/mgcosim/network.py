"""Point-to-point communication emulation on the simulation timeline.

Every directed link has a deterministic latency floor

    floor = size/data_rate + distance/prop_speed + proc_delay

plus optional additive Gaussian noise clamped so the total never drops
below the floor, and an optional independent drop probability.  Delivery
times are quantized up to the next clock tick (at least one tick after
the send, so causality holds even on a perfect link) and monotonized per
link, so a link never reorders its own packets.

Each link draws from its own RNG substream keyed by the link id, so the
presence or absence of other links never changes its sequence of draws.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

from .kernel import ConfigurationError, SimUnit
from .rng import substream
from .timebase import SimTime


@dataclass(frozen=True)
class LinkParams:
    """One directed channel; distances in meters, rates in bit/s."""

    link_id: str
    distance_m: float
    data_rate_bps: float
    prop_speed_mps: float = 2e8
    proc_delay_s: float = 0.0
    noise_sigma_s: float = 0.0
    loss_prob: float = 0.0

    def __post_init__(self):
        if self.distance_m < 0:
            raise ValueError(f"link {self.link_id}: negative distance")
        if self.data_rate_bps <= 0:
            raise ValueError(f"link {self.link_id}: data rate must be positive")
        if self.prop_speed_mps <= 0:
            raise ValueError(f"link {self.link_id}: propagation speed must be positive")
        if self.proc_delay_s < 0:
            raise ValueError(f"link {self.link_id}: negative processing delay")
        if self.noise_sigma_s < 0:
            raise ValueError(f"link {self.link_id}: negative noise sigma")
        if not 0.0 <= self.loss_prob <= 1.0:
            raise ValueError(f"link {self.link_id}: loss probability outside [0, 1]")


def latency_floor(link: LinkParams, size_bits: int) -> float:
    """Deterministic part of the one-way latency, in seconds."""
    return (size_bits / link.data_rate_bps
            + link.distance_m / link.prop_speed_mps
            + link.proc_delay_s)


def sample_latency(link: LinkParams, size_bits: int, rng) -> float:
    """One latency draw: floor plus clamped Gaussian noise (never below floor)."""
    floor = latency_floor(link, size_bits)
    if link.noise_sigma_s == 0.0:
        return floor
    noise = rng.normal(0.0, link.noise_sigma_s)
    return floor if noise < 0.0 else floor + noise


@dataclass(slots=True)
class Packet:
    """An in-flight or delivered message on one link."""

    seq: int
    src: str
    dst: str
    link_id: str
    payload: object
    size_bits: int
    send_ticks: int
    deliver_ticks: int | None   # None when dropped
    latency_s: float | None

    @property
    def dropped(self) -> bool:
        return self.deliver_ticks is None


@dataclass
class LatencyStats:
    """Five-number summary plus mean of delivered latencies on one link."""

    link_id: str
    count: int
    dropped: int
    min_s: float
    q1_s: float
    median_s: float
    q3_s: float
    max_s: float
    mean_s: float


def quartiles(sorted_sample: list[float], p: float) -> float:
    """Quantile by linear interpolation on an ascending sample."""
    n = len(sorted_sample)
    if n == 0:
        raise ValueError("empty sample")
    pos = p * (n - 1)
    lo = math.floor(pos)
    hi = math.ceil(pos)
    if lo == hi:
        return sorted_sample[lo]
    frac = pos - lo
    return sorted_sample[lo] + frac * (sorted_sample[hi] - sorted_sample[lo])


class _LinkState:
    __slots__ = ("params", "rng", "last_deliver_ticks", "latencies", "sent", "dropped")

    def __init__(self, params: LinkParams, rng):
        self.params = params
        self.rng = rng
        self.last_deliver_ticks = -1
        self.latencies: list[float] = []
        self.sent = 0
        self.dropped = 0


class CommEmulatorUnit(SimUnit):
    """The communication emulator as a simulation unit.

    Routes map (src endpoint, dst endpoint) to a link id.  Other units
    call send() and poll_delivered() during their own do-step at the
    current master time; a packet sent at tick T is never visible before
    tick T+1.
    """

    def __init__(self, name: str, links: dict[str, LinkParams],
                 routes: dict[tuple[str, str], str], master_seed: int,
                 keep_packets: bool = False):
        super().__init__(name)
        unknown = [lid for lid in routes.values() if lid not in links]
        if unknown:
            raise ConfigurationError(f"routes reference unknown links: {sorted(set(unknown))}")
        self._links = {
            lid: _LinkState(p, substream(master_seed, f"link:{lid}"))
            for lid, p in links.items()
        }
        self._routes = dict(routes)
        self._queues: dict[str, list] = {}
        self._seq = 0
        self._ticks_per_second = 0.0
        self._res_num = 1
        self._res_den = 10**6
        self._resolution = None
        self.keep_packets = keep_packets
        self._log: list[Packet] = []

    def on_initialize(self, t0: SimTime, h_ticks: int) -> None:
        self._resolution = t0.resolution
        self._res_num = t0.resolution.numerator
        self._res_den = t0.resolution.denominator
        self._ticks_per_second = t0.resolution.denominator / t0.resolution.numerator

    def link_params(self, link_id: str) -> LinkParams:
        return self._links[link_id].params

    def link_ids(self):
        return tuple(self._links)

    def route(self, src: str, dst: str) -> str | None:
        return self._routes.get((src, dst))

    # -- traffic -----------------------------------------------------------

    def send(self, src: str, dst: str, payload, size_bits: int, now: SimTime) -> int:
        """Inject one message; returns its sequence id.

        The drop decision and the latency draw both come from the link's
        own substream, in send order on that link.
        """
        link_id = self._routes.get((src, dst))
        if link_id is None:
            raise ConfigurationError(f"no link configured for {src!r} -> {dst!r}")
        link = self._links[link_id]
        seq = self._seq
        self._seq += 1
        link.sent += 1

        if link.params.loss_prob > 0.0 and link.rng.random() < link.params.loss_prob:
            link.dropped += 1
            packet = Packet(seq, src, dst, link_id, payload, size_bits,
                            now.ticks, None, None)
            if self.keep_packets:
                self._log.append(packet)
            return seq

        latency = sample_latency(link.params, size_bits, link.rng)
        ticks = max(1, math.ceil(latency * self._ticks_per_second))
        deliver = now.ticks + ticks
        if deliver < link.last_deliver_ticks:    # FIFO: never overtake
            deliver = link.last_deliver_ticks
        link.last_deliver_ticks = deliver
        # int*int/int is one correctly rounded float op, so the 6-decimal
        # dump of a microsecond-tick latency parses back to this exact value
        actual_latency = (deliver - now.ticks) * self._res_num / self._res_den
        link.latencies.append(actual_latency)

        packet = Packet(seq, src, dst, link_id, payload, size_bits,
                        now.ticks, deliver, actual_latency)
        heapq.heappush(self._queues.setdefault(dst, []), (deliver, seq, packet))
        if self.keep_packets:
            self._log.append(packet)
        return seq

    def poll_delivered(self, dst: str, now: SimTime) -> list[Packet]:
        """All packets for dst due at or before ``now``, each exactly once,
        in (deliver time, seq) order."""
        queue = self._queues.get(dst)
        if not queue or queue[0][0] > now.ticks:
            return []
        out = []
        ticks = now.ticks
        while queue and queue[0][0] <= ticks:
            out.append(heapq.heappop(queue)[2])
        return out

    # -- statistics --------------------------------------------------------

    def latency_report(self, link_id: str) -> LatencyStats | None:
        """Summary stats for one link, or None when nothing was delivered."""
        link = self._links[link_id]
        sample = sorted(link.latencies)
        if not sample:
            return None
        return LatencyStats(
            link_id=link_id,
            count=len(sample),
            dropped=link.dropped,
            min_s=sample[0],
            q1_s=quartiles(sample, 0.25),
            median_s=quartiles(sample, 0.50),
            q3_s=quartiles(sample, 0.75),
            max_s=sample[-1],
            mean_s=sum(sample) / len(sample),
        )

    def drop_count(self, link_id: str) -> int:
        return self._links[link_id].dropped

    def sent_count(self, link_id: str) -> int:
        return self._links[link_id].sent

    def latency_samples(self, link_id: str) -> list[float]:
        return list(self._links[link_id].latencies)

    def packet_log(self) -> list[Packet]:
        if not self.keep_packets:
            raise ConfigurationError("packet logging disabled for this emulator")
        return list(self._log)


# -- named network quality presets ------------------------------------------

PRESET_NAMES = ("ideal", "network-1", "network-2", "network-3")

_PRESET_RATES = {"network-1": 1e6, "network-2": 1e5, "network-3": 1e4}


def preset_link(scenario: str, link_id: str, distance_m: float,
                default_size_bits: int) -> LinkParams:
    """Build one link under a named quality preset.

    The three degraded presets share the propagation speed and differ in
    data rate (1 Mb/s, 100 kb/s, 10 kb/s), which puts their latency floors
    near 1, 10 and 100 ms for kilobit messages; noise sigma is 10% of the
    floor at the class's default message size.  "ideal" forces zero
    latency and zero loss.
    """
    if scenario == "ideal":
        return LinkParams(link_id=link_id, distance_m=0.0, data_rate_bps=math.inf)
    try:
        rate = _PRESET_RATES[scenario]
    except KeyError:
        raise ConfigurationError(f"unknown network preset {scenario!r}") from None
    base = LinkParams(link_id=link_id, distance_m=distance_m, data_rate_bps=rate)
    sigma = 0.1 * latency_floor(base, default_size_bits)
    return LinkParams(link_id=link_id, distance_m=distance_m, data_rate_bps=rate,
                      noise_sigma_s=sigma)
