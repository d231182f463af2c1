"""Declarative experiment scenarios.

A scenario is one YAML document with named sections: metadata, master,
plant, network, control, outputs.  Parsing validates everything up front
and reports all problems together with their location paths; a parsed
scenario re-emits to canonical YAML, and parse(emit(parse(x))) is
structurally identical to parse(x).

The full grammar is documented in README.md; bundled scenarios under
mgcosim/scenarios/ encode the five-DG test case with its two link tables
and the four network quality cases.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

import yaml

from .network import PRESET_NAMES, LinkParams, preset_link
from .plant import DGParams, GridNetwork, Line, LoadSpec
from .timebase import exact_fraction

CONTROL_MODES = ("centralized", "distributed", "primary-only")


class ScenarioError(Exception):
    """One or more validation problems; each entry is 'path: message'."""

    def __init__(self, problems: list[str]):
        super().__init__("invalid scenario:\n  " + "\n  ".join(problems))
        self.problems = problems


@dataclass(frozen=True)
class MasterSection:
    step_s: float = 0.001
    t_end_s: float = 100.0
    resolution_s: float = 1e-6


@dataclass(frozen=True)
class PlantSection:
    dgs: tuple[DGParams, ...]
    lines: tuple[Line, ...]
    loads: tuple[LoadSpec, ...]

    def f_nominal(self) -> float:
        return self.dgs[0].f0


@dataclass(frozen=True)
class NetworkSection:
    scenario: str = "ideal"
    mgcc_links: tuple[tuple[str, float], ...] = ()    # (link id, distance m)
    agent_links: tuple[tuple[str, float], ...] = ()   # (edge "a-b", distance m)
    overrides: tuple[tuple[str, tuple[tuple[str, object], ...]], ...] = ()


@dataclass(frozen=True)
class ControlSection:
    mode: str = "primary-only"
    pi_kp: float = 0.2
    pi_ki: float = 1.0
    pi_clamp: float | None = 1.0
    n_consensus: int = 20
    mgcc_update_period_s: float = 0.1
    mgcc_measurement_dg: int = 1
    sample_size_bits: int = 1024
    consensus_size_bits: int = 1536
    round_timeout_s: float | None = None


@dataclass(frozen=True)
class OutputsSection:
    trace_decimation: int = 10
    dump_latency_samples: bool = False
    settling_band_hz: float = 0.010
    final_window_s: float = 5.0


@dataclass(frozen=True)
class Scenario:
    name: str
    seed: int
    master: MasterSection = MasterSection()
    plant: PlantSection | None = None
    network: NetworkSection = NetworkSection()
    control: ControlSection = ControlSection()
    outputs: OutputsSection = OutputsSection()

    def with_seed(self, seed: int) -> "Scenario":
        return Scenario(self.name, seed, self.master, self.plant,
                        self.network, self.control, self.outputs)

    def with_control(self, **changes) -> "Scenario":
        base = {
            "mode": self.control.mode,
            "pi_kp": self.control.pi_kp,
            "pi_ki": self.control.pi_ki,
            "pi_clamp": self.control.pi_clamp,
            "n_consensus": self.control.n_consensus,
            "mgcc_update_period_s": self.control.mgcc_update_period_s,
            "mgcc_measurement_dg": self.control.mgcc_measurement_dg,
            "sample_size_bits": self.control.sample_size_bits,
            "consensus_size_bits": self.control.consensus_size_bits,
            "round_timeout_s": self.control.round_timeout_s,
        }
        base.update(changes)
        return Scenario(self.name, self.seed, self.master, self.plant,
                        self.network, ControlSection(**base), self.outputs)


# -- parsing helpers ---------------------------------------------------------

class _Reader:
    """Walks a parsed mapping, collecting problems with location paths."""

    def __init__(self, problems: list[str]):
        self.problems = problems

    def fail(self, path: str, message: str) -> None:
        self.problems.append(f"{path}: {message}")

    def mapping(self, value, path: str) -> dict:
        if value is None:
            return {}
        if not isinstance(value, dict):
            self.fail(path, f"expected a mapping, got {type(value).__name__}")
            return {}
        return value

    def check_keys(self, data: dict, allowed, path: str) -> None:
        for key in data:
            if key not in allowed:
                self.fail(path, f"unknown key {key!r}")

    def take(self, data: dict, key: str, path: str, kind, default=..., required=False):
        if key not in data:
            if required:
                self.fail(path, f"missing required key {key!r}")
                return None
            return None if default is ... else default
        value = data[key]
        if kind is float:
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                self.fail(f"{path}.{key}", f"expected a number, got {value!r}")
                return None if default is ... else default
            return float(value)
        if kind is int:
            if isinstance(value, bool) or not isinstance(value, int):
                self.fail(f"{path}.{key}", f"expected an integer, got {value!r}")
                return None if default is ... else default
            return value
        if kind is bool:
            if not isinstance(value, bool):
                self.fail(f"{path}.{key}", f"expected true/false, got {value!r}")
                return None if default is ... else default
            return value
        if kind is str:
            if not isinstance(value, str):
                self.fail(f"{path}.{key}", f"expected a string, got {value!r}")
                return None if default is ... else default
            return value
        raise TypeError(f"unsupported kind {kind}")

    def take_optional_float(self, data: dict, key: str, path: str, default=None):
        if key not in data or data[key] is None:
            return default
        return self.take(data, key, path, float)


def _parse_master(r: _Reader, data, path) -> MasterSection:
    d = r.mapping(data, path)
    r.check_keys(d, {"step_s", "t_end_s", "resolution_s"}, path)
    step = r.take(d, "step_s", path, float, default=0.001)
    t_end = r.take(d, "t_end_s", path, float, default=100.0)
    res = r.take(d, "resolution_s", path, float, default=1e-6)
    section = MasterSection(step_s=step, t_end_s=t_end, resolution_s=res)
    try:
        res_f = exact_fraction(res)
        step_f = exact_fraction(step)
        if res_f <= 0:
            r.fail(f"{path}.resolution_s", "must be positive")
        elif step_f <= 0:
            r.fail(f"{path}.step_s", "must be positive")
        elif (step_f / res_f).denominator != 1:
            r.fail(f"{path}.step_s",
                   f"step {step} is not an integer multiple of resolution {res}")
    except ValueError as exc:
        r.fail(path, str(exc))
    if t_end is not None and t_end <= 0:
        r.fail(f"{path}.t_end_s", "must be positive")
    return section


def _parse_plant(r: _Reader, data, path) -> PlantSection | None:
    d = r.mapping(data, path)
    if not d:
        r.fail(path, "missing required section")
        return None
    r.check_keys(d, {"dgs", "lines", "loads"}, path)

    dgs = []
    for i, entry in enumerate(d.get("dgs") or []):
        p = f"{path}.dgs[{i}]"
        e = r.mapping(entry, p)
        r.check_keys(e, {"id", "bus", "f0_hz", "p0_w", "kp_hz_per_w", "wc_rad_per_s"}, p)
        try:
            dgs.append(DGParams(
                dg_id=r.take(e, "id", p, int, required=True) or 0,
                bus=r.take(e, "bus", p, int, required=True) or 0,
                f0=r.take(e, "f0_hz", p, float, default=50.0),
                p0=r.take(e, "p0_w", p, float, default=0.0),
                kp=r.take(e, "kp_hz_per_w", p, float, default=1e-5),
                wc=r.take(e, "wc_rad_per_s", p, float, default=31.4),
            ))
        except (ValueError, TypeError) as exc:
            r.fail(p, str(exc))
    if not dgs:
        r.fail(f"{path}.dgs", "at least one DG required")

    lines = []
    for i, entry in enumerate(d.get("lines") or []):
        p = f"{path}.lines[{i}]"
        e = r.mapping(entry, p)
        r.check_keys(e, {"bus_a", "bus_b", "coupling_w_per_rad"}, p)
        try:
            lines.append(Line(
                bus_a=r.take(e, "bus_a", p, int, required=True) or 0,
                bus_b=r.take(e, "bus_b", p, int, required=True) or 0,
                coupling=r.take(e, "coupling_w_per_rad", p, float, default=5e4),
            ))
        except (ValueError, TypeError) as exc:
            r.fail(p, str(exc))

    loads = []
    for i, entry in enumerate(d.get("loads") or []):
        p = f"{path}.loads[{i}]"
        e = r.mapping(entry, p)
        r.check_keys(e, {"id", "bus", "p_w", "trip_at_s"}, p)
        trip = r.take_optional_float(e, "trip_at_s", p)
        if trip is not None and trip < 0:
            r.fail(f"{p}.trip_at_s", "must be non-negative")
        try:
            loads.append(LoadSpec(
                load_id=r.take(e, "id", p, str, default=f"load-{i + 1}"),
                bus=r.take(e, "bus", p, int, required=True) or 0,
                p_demand=r.take(e, "p_w", p, float, default=0.0),
                trip_at_s=trip,
            ))
        except (ValueError, TypeError) as exc:
            r.fail(p, str(exc))

    if not dgs:
        return None
    try:
        network = GridNetwork(dgs, lines)
        for load in loads:
            if load.bus not in network.bus_index:
                r.fail(f"{path}.loads", f"load {load.load_id}: unknown bus {load.bus}")
    except ValueError as exc:
        r.fail(path, str(exc))
    f0s = {p.f0 for p in dgs}
    if len(f0s) > 1:
        r.fail(f"{path}.dgs", "all DGs must share the same rated frequency f0_hz")
    return PlantSection(dgs=tuple(dgs), lines=tuple(lines), loads=tuple(loads))


_LINK_OVERRIDE_KEYS = {"distance_m", "data_rate_bps", "prop_speed_mps",
                       "proc_delay_s", "noise_sigma_s", "loss_prob"}


def _parse_network(r: _Reader, data, path) -> NetworkSection:
    d = r.mapping(data, path)
    r.check_keys(d, {"scenario", "mgcc_links", "agent_links", "overrides"}, path)
    scenario = r.take(d, "scenario", path, str, default="ideal")
    if scenario not in PRESET_NAMES and scenario != "custom":
        r.fail(f"{path}.scenario",
               f"unknown network scenario {scenario!r} "
               f"(expected one of {', '.join(PRESET_NAMES)} or custom)")

    def link_table(key):
        table = r.mapping(d.get(key), f"{path}.{key}")
        out = []
        for link_id, dist in table.items():
            p = f"{path}.{key}.{link_id}"
            if isinstance(dist, bool) or not isinstance(dist, (int, float)):
                r.fail(p, f"expected a distance in meters, got {dist!r}")
                continue
            if dist < 0:
                r.fail(p, f"link {link_id!r}: negative distance")
                continue
            out.append((str(link_id), float(dist)))
        return tuple(out)

    mgcc_links = link_table("mgcc_links")
    agent_links = link_table("agent_links")
    for edge, _ in agent_links:
        parts = edge.split("-")
        if len(parts) != 2 or not all(s.isdigit() for s in parts):
            r.fail(f"{path}.agent_links.{edge}",
                   "edge keys must look like '<agent>-<agent>', e.g. 1-4")

    overrides = []
    for link_id, entry in r.mapping(d.get("overrides"), f"{path}.overrides").items():
        p = f"{path}.overrides.{link_id}"
        e = r.mapping(entry, p)
        r.check_keys(e, _LINK_OVERRIDE_KEYS, p)
        fields = []
        for key in sorted(e):
            if key not in _LINK_OVERRIDE_KEYS:
                continue
            value = e[key]
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                r.fail(f"{p}.{key}", f"expected a number, got {value!r}")
                continue
            fields.append((key, float(value)))
        overrides.append((str(link_id), tuple(fields)))

    return NetworkSection(scenario=scenario, mgcc_links=mgcc_links,
                          agent_links=agent_links, overrides=tuple(overrides))


def _parse_control(r: _Reader, data, path) -> ControlSection:
    d = r.mapping(data, path)
    r.check_keys(d, {"mode", "pi", "n_consensus", "mgcc_update_period_s",
                     "mgcc_measurement_dg", "sample_size_bits",
                     "consensus_size_bits", "round_timeout_s"}, path)
    mode = r.take(d, "mode", path, str, default="primary-only")
    if mode not in CONTROL_MODES:
        r.fail(f"{path}.mode",
               f"unknown control mode {mode!r} (expected one of {', '.join(CONTROL_MODES)})")
    pi = r.mapping(d.get("pi"), f"{path}.pi")
    r.check_keys(pi, {"kp", "ki_per_s", "clamp_hz"}, f"{path}.pi")
    kp = r.take(pi, "kp", f"{path}.pi", float, default=0.2)
    ki = r.take(pi, "ki_per_s", f"{path}.pi", float, default=1.0)
    clamp = pi.get("clamp_hz", 1.0)
    if clamp is not None:
        if isinstance(clamp, bool) or not isinstance(clamp, (int, float)):
            r.fail(f"{path}.pi.clamp_hz", f"expected a number or null, got {clamp!r}")
            clamp = None
        else:
            clamp = float(clamp)
            if clamp <= 0:
                r.fail(f"{path}.pi.clamp_hz", "must be positive when set")
    if ki is not None and ki < 0:
        r.fail(f"{path}.pi.ki_per_s", "must be non-negative")
    n_consensus = r.take(d, "n_consensus", path, int, default=20)
    if n_consensus is not None and n_consensus < 1:
        r.fail(f"{path}.n_consensus", "must be at least 1")
    period = r.take(d, "mgcc_update_period_s", path, float, default=0.1)
    meas_dg = r.take(d, "mgcc_measurement_dg", path, int, default=1)
    sample_bits = r.take(d, "sample_size_bits", path, int, default=1024)
    consensus_bits = r.take(d, "consensus_size_bits", path, int, default=1536)
    for name, bits in (("sample_size_bits", sample_bits),
                       ("consensus_size_bits", consensus_bits)):
        if bits is not None and bits <= 0:
            r.fail(f"{path}.{name}", "must be positive")
    timeout = d.get("round_timeout_s")
    if timeout is not None:
        if isinstance(timeout, bool) or not isinstance(timeout, (int, float)):
            r.fail(f"{path}.round_timeout_s", f"expected a number or null, got {timeout!r}")
            timeout = None
        else:
            timeout = float(timeout)
            if timeout <= 0:
                r.fail(f"{path}.round_timeout_s", "must be positive when set")
    return ControlSection(mode=mode, pi_kp=kp, pi_ki=ki, pi_clamp=clamp,
                          n_consensus=n_consensus,
                          mgcc_update_period_s=period,
                          mgcc_measurement_dg=meas_dg,
                          sample_size_bits=sample_bits,
                          consensus_size_bits=consensus_bits,
                          round_timeout_s=timeout)


def _parse_outputs(r: _Reader, data, path) -> OutputsSection:
    d = r.mapping(data, path)
    r.check_keys(d, {"trace_decimation", "dump_latency_samples",
                     "settling_band_hz", "final_window_s"}, path)
    decim = r.take(d, "trace_decimation", path, int, default=10)
    if decim is not None and decim < 1:
        r.fail(f"{path}.trace_decimation", "must be at least 1")
    dump = r.take(d, "dump_latency_samples", path, bool, default=False)
    band = r.take(d, "settling_band_hz", path, float, default=0.010)
    if band is not None and band <= 0:
        r.fail(f"{path}.settling_band_hz", "must be positive")
    window = r.take(d, "final_window_s", path, float, default=5.0)
    if window is not None and window <= 0:
        r.fail(f"{path}.final_window_s", "must be positive")
    return OutputsSection(trace_decimation=decim, dump_latency_samples=dump,
                          settling_band_hz=band, final_window_s=window)


def _cross_validate(r: _Reader, scn: Scenario) -> None:
    if scn.plant is None:
        return
    control = scn.control
    master = scn.master
    dg_ids = [p.dg_id for p in scn.plant.dgs]

    try:
        period = exact_fraction(control.mgcc_update_period_s)
        step = exact_fraction(master.step_s)
        if (period / step).denominator != 1:
            r.fail("control.mgcc_update_period_s",
                   "must be an integer multiple of master.step_s")
    except ValueError as exc:
        r.fail("control.mgcc_update_period_s", str(exc))

    if control.mode == "centralized":
        if control.mgcc_measurement_dg not in dg_ids:
            r.fail("control.mgcc_measurement_dg",
                   f"DG {control.mgcc_measurement_dg} not defined in plant.dgs")
        have = {lid for lid, _ in scn.network.mgcc_links}
        missing = [f"c-{k}" for k in dg_ids if f"c-{k}" not in have]
        if missing:
            r.fail("network.mgcc_links",
                   f"missing MGCC links for this plant: {', '.join(missing)}")
    if control.mode == "distributed":
        if not scn.network.agent_links:
            r.fail("network.agent_links", "missing agent links (required in distributed mode)")
        else:
            known = set(dg_ids)
            edges = []
            for edge, _ in scn.network.agent_links:
                parts = edge.split("-")
                if len(parts) == 2 and all(s.isdigit() for s in parts):
                    a, b = int(parts[0]), int(parts[1])
                    if a not in known or b not in known:
                        r.fail(f"network.agent_links.{edge}", "references unknown agent id")
                    else:
                        edges.append((a, b))
            if edges:
                from .control import metropolis_weights
                try:
                    metropolis_weights(dg_ids, edges)
                except Exception as exc:
                    r.fail("network.agent_links", str(exc))

    if control.mode != "primary-only" and not r.problems:
        try:
            build_link_set(scn)
        except ScenarioError as exc:
            for problem in exc.problems:
                r.fail("network", problem)
        except ValueError as exc:
            r.fail("network", str(exc))


def parse_scenario(text: str) -> Scenario:
    """Parse and fully validate one scenario document.

    Raises ScenarioError carrying every problem found, each prefixed with
    its location path.
    """
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ScenarioError([f"document: not valid YAML ({exc})"]) from None
    problems: list[str] = []
    r = _Reader(problems)
    data = r.mapping(raw, "document")
    if not data:
        raise ScenarioError(problems or ["document: empty scenario"])
    r.check_keys(data, {"name", "seed", "master", "plant", "network",
                        "control", "outputs"}, "document")
    name = r.take(data, "name", "document", str, default="unnamed")
    seed = r.take(data, "seed", "document", int, required=True)
    if seed is None:
        seed = 0
    scn = Scenario(
        name=name,
        seed=seed,
        master=_parse_master(r, data.get("master"), "master"),
        plant=_parse_plant(r, data.get("plant"), "plant"),
        network=_parse_network(r, data.get("network"), "network"),
        control=_parse_control(r, data.get("control"), "control"),
        outputs=_parse_outputs(r, data.get("outputs"), "outputs"),
    )
    _cross_validate(r, scn)
    if problems:
        raise ScenarioError(problems)
    return scn


# -- emission ----------------------------------------------------------------

def scenario_to_dict(scn: Scenario) -> dict:
    """Canonical plain-data form of a scenario (section order fixed)."""
    return {
        "name": scn.name,
        "seed": scn.seed,
        "master": {
            "step_s": scn.master.step_s,
            "t_end_s": scn.master.t_end_s,
            "resolution_s": scn.master.resolution_s,
        },
        "plant": {
            "dgs": [
                {"id": p.dg_id, "bus": p.bus, "f0_hz": p.f0, "p0_w": p.p0,
                 "kp_hz_per_w": p.kp, "wc_rad_per_s": p.wc}
                for p in scn.plant.dgs
            ],
            "lines": [
                {"bus_a": l.bus_a, "bus_b": l.bus_b, "coupling_w_per_rad": l.coupling}
                for l in scn.plant.lines
            ],
            "loads": [
                {"id": l.load_id, "bus": l.bus, "p_w": l.p_demand,
                 "trip_at_s": l.trip_at_s}
                for l in scn.plant.loads
            ],
        },
        "network": {
            "scenario": scn.network.scenario,
            "mgcc_links": {lid: d for lid, d in scn.network.mgcc_links},
            "agent_links": {lid: d for lid, d in scn.network.agent_links},
            "overrides": {lid: dict(fields) for lid, fields in scn.network.overrides},
        },
        "control": {
            "mode": scn.control.mode,
            "pi": {"kp": scn.control.pi_kp, "ki_per_s": scn.control.pi_ki,
                   "clamp_hz": scn.control.pi_clamp},
            "n_consensus": scn.control.n_consensus,
            "mgcc_update_period_s": scn.control.mgcc_update_period_s,
            "mgcc_measurement_dg": scn.control.mgcc_measurement_dg,
            "sample_size_bits": scn.control.sample_size_bits,
            "consensus_size_bits": scn.control.consensus_size_bits,
            "round_timeout_s": scn.control.round_timeout_s,
        },
        "outputs": {
            "trace_decimation": scn.outputs.trace_decimation,
            "dump_latency_samples": scn.outputs.dump_latency_samples,
            "settling_band_hz": scn.outputs.settling_band_hz,
            "final_window_s": scn.outputs.final_window_s,
        },
    }


def emit_scenario(scn: Scenario) -> str:
    return yaml.safe_dump(scenario_to_dict(scn), sort_keys=False,
                          default_flow_style=False)


# -- link construction -------------------------------------------------------

def agent_edges(scn: Scenario) -> list[tuple[int, int]]:
    return [tuple(int(s) for s in edge.split("-")) for edge, _ in scn.network.agent_links]


def uplink_id(scn: Scenario) -> str:
    return f"up-{scn.control.mgcc_measurement_dg}"


def build_link_set(scn: Scenario) -> dict[str, LinkParams]:
    """All directed links this scenario needs, with preset and overrides applied.

    Centralized mode uses the five downlinks c-<dg> plus one uplink whose
    distance copies the measurement DG's downlink; distributed mode turns
    each agent edge into two directed links.  Noise presets are sized by
    the message class a link carries (scalar sample vs consensus message).
    """
    problems: list[str] = []
    overrides = {lid: dict(fields) for lid, fields in scn.network.overrides}
    wildcard = overrides.pop("*", {})
    mode = scn.control.mode
    preset = scn.network.scenario

    wanted: list[tuple[str, float, int]] = []   # (link id, distance, size class)
    if mode == "centralized":
        table = dict(scn.network.mgcc_links)
        for lid, dist in scn.network.mgcc_links:
            wanted.append((lid, dist, scn.control.sample_size_bits))
        up = uplink_id(scn)
        up_dist = table.get(f"c-{scn.control.mgcc_measurement_dg}", 0.0)
        wanted.append((up, up_dist, scn.control.sample_size_bits))
    elif mode == "distributed":
        for edge, dist in scn.network.agent_links:
            a, b = edge.split("-")
            wanted.append((f"{a}-{b}", dist, scn.control.consensus_size_bits))
            wanted.append((f"{b}-{a}", dist, scn.control.consensus_size_bits))

    links: dict[str, LinkParams] = {}
    for lid, dist, size_bits in wanted:
        merged = dict(wildcard)
        merged.update(overrides.pop(lid, {}))
        if preset == "custom":
            fields = {"link_id": lid, "distance_m": dist}
            fields.update(merged)
            if "data_rate_bps" not in fields:
                problems.append(f"link {lid}: custom network needs data_rate_bps "
                                "(per-link or '*' override)")
                continue
            try:
                links[lid] = LinkParams(**fields)
            except (TypeError, ValueError) as exc:
                problems.append(str(exc))
        else:
            base = preset_link(preset, lid, dist, size_bits)
            if merged:
                fields = {
                    "link_id": lid,
                    "distance_m": base.distance_m,
                    "data_rate_bps": base.data_rate_bps,
                    "prop_speed_mps": base.prop_speed_mps,
                    "proc_delay_s": base.proc_delay_s,
                    "noise_sigma_s": base.noise_sigma_s,
                    "loss_prob": base.loss_prob,
                }
                fields.update(merged)
                try:
                    links[lid] = LinkParams(**fields)
                except (TypeError, ValueError) as exc:
                    problems.append(str(exc))
            else:
                links[lid] = base
    for leftover in overrides:
        if leftover not in links:
            problems.append(f"override for unknown link {leftover!r}")
    if problems:
        raise ScenarioError(problems)
    return links


# -- bundled scenarios -------------------------------------------------------

def bundled_scenario_names() -> list[str]:
    root = resources.files("mgcosim.scenarios")
    return sorted(p.name[: -len(".yaml")] for p in root.iterdir()
                  if p.name.endswith(".yaml"))


def load_bundled_scenario(name: str) -> Scenario:
    root = resources.files("mgcosim.scenarios")
    path = root / f"{name}.yaml"
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ScenarioError(
            [f"document: no bundled scenario {name!r} "
             f"(available: {', '.join(bundled_scenario_names())})"]) from None
    return parse_scenario(text)


def load_scenario_file(path: str) -> Scenario:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_scenario(fh.read())
