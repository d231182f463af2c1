"""Fixed-step co-simulation master.

Simulation units expose typed input/output ports and a do-step callback.
The master wires output ports to input ports, then advances every unit on
a shared integer-tick timeline with Jacobi exchange semantics: at each
step all outputs are sampled, copied to the connected inputs, and only
then does every unit step, in registration order.  A value written to an
output at step k is therefore visible to consumers at step k+1, never
earlier.
"""

from __future__ import annotations

from fractions import Fraction

from .timebase import MICROSECOND, SimTime, exact_fraction, ticks_for

INPUT = "input"
OUTPUT = "output"

_UNSET = object()


class ConfigurationError(Exception):
    """Invalid wiring or parametrization, detected before stepping."""


class LifecycleError(Exception):
    """Operation called in the wrong lifecycle state."""


class UnitStepError(Exception):
    """A unit failed during do-step; carries the unit and master time."""

    def __init__(self, unit_name: str, time: SimTime, cause: BaseException):
        super().__init__(f"unit {unit_name!r} failed at t={time.seconds} s: {cause}")
        self.unit_name = unit_name
        self.time = time
        self.cause = cause


class Port:
    """A named scalar (or message) terminal on a unit.

    An input port is driven by at most one connection; the unit-of-measure
    tags of connected ports must agree.
    """

    __slots__ = ("owner", "name", "direction", "unit_tag", "value", "default", "driven")

    def __init__(self, owner: "SimUnit", name: str, direction: str, unit_tag: str,
                 default=_UNSET):
        self.owner = owner
        self.name = name
        self.direction = direction
        self.unit_tag = unit_tag
        self.default = default
        self.value = None if default is _UNSET else default
        self.driven = False

    @property
    def has_default(self) -> bool:
        return self.default is not _UNSET

    def __repr__(self):
        return f"Port({self.owner.name}.{self.name} [{self.unit_tag}] {self.direction})"


class SimUnit:
    """Base class for simulation units (FMI-like lifecycle, simplified).

    Lifecycle: created -> initialized -> stepping -> terminated.  do_step
    may only run in the stepping state and always receives the master's
    fixed step size; a unit never observes time going backward.
    """

    def __init__(self, name: str):
        self.name = name
        self.unit_id: int | None = None
        self.lifecycle = "created"
        self._ports: dict[str, Port] = {}

    def add_input(self, name: str, unit_tag: str, default=_UNSET) -> Port:
        return self._add_port(Port(self, name, INPUT, unit_tag, default))

    def add_output(self, name: str, unit_tag: str, initial=0.0) -> Port:
        port = self._add_port(Port(self, name, OUTPUT, unit_tag))
        port.value = initial
        return port

    def _add_port(self, port: Port) -> Port:
        if port.name in self._ports:
            raise ConfigurationError(f"duplicate port {port.name!r} on unit {self.name!r}")
        self._ports[port.name] = port
        return port

    def port(self, name: str) -> Port:
        try:
            return self._ports[name]
        except KeyError:
            raise ConfigurationError(f"unit {self.name!r} has no port {name!r}") from None

    def ports(self):
        return self._ports.values()

    # Hooks for subclasses.
    def on_initialize(self, t0: SimTime, h_ticks: int) -> None:
        pass

    def do_step(self, t: SimTime, h_s: float) -> None:
        pass

    def on_terminate(self) -> None:
        pass


class MasterConfig:
    """Fixed-step master settings: step size, tick resolution, seed."""

    def __init__(self, step_s=Fraction(1, 1000), resolution_s: Fraction = MICROSECOND,
                 seed: int = 0, end_time_s=None):
        self.resolution = exact_fraction(resolution_s)
        if self.resolution <= 0:
            raise ConfigurationError("tick resolution must be positive")
        self.step = exact_fraction(step_s)
        if self.step <= 0:
            raise ConfigurationError("step size must be positive")
        try:
            self.h_ticks = ticks_for(self.step, self.resolution)
        except ValueError as exc:
            raise ConfigurationError(str(exc)) from None
        self.seed = int(seed)
        self.end_time_s = end_time_s


class Master:
    """Deterministic fixed-step Jacobi master over registered units.

    Evaluation order is registration order, fixed for the life of the run;
    connected values are order-insensitive under Jacobi exchange, but side
    effects (RNG draws, message sends) rely on this order for determinism.
    """

    def __init__(self, config: MasterConfig):
        self.config = config
        self._units: list[SimUnit] = []
        self._names: set[str] = set()
        self._wires: list[tuple[Port, Port]] = []
        self._ticks = 0
        self._initialized = False
        self._terminated = False

    # -- construction ------------------------------------------------------

    def register(self, unit: SimUnit) -> int:
        if self._initialized:
            raise LifecycleError("master sealed: cannot register units after initialize")
        if unit.name in self._names:
            raise ConfigurationError(f"duplicate unit id {unit.name!r}")
        unit.unit_id = len(self._units)
        self._units.append(unit)
        self._names.add(unit.name)
        return unit.unit_id

    def connect(self, src: Port, dst: Port) -> int:
        if self._initialized:
            raise LifecycleError("master sealed: cannot connect ports after initialize")
        if src.direction != OUTPUT or dst.direction != INPUT:
            raise ConfigurationError(
                f"direction mismatch: {src!r} -> {dst!r} (need output -> input)")
        if src.unit_tag != dst.unit_tag:
            raise ConfigurationError(
                f"unit mismatch: {src!r} [{src.unit_tag}] -> {dst!r} [{dst.unit_tag}]")
        if dst.driven:
            raise ConfigurationError(f"input already driven: {dst!r}")
        if src.owner.unit_id is None or dst.owner.unit_id is None:
            raise ConfigurationError("connect requires both units to be registered")
        dst.driven = True
        self._wires.append((src, dst))
        return len(self._wires) - 1

    # -- lifecycle ---------------------------------------------------------

    def initialize(self) -> None:
        if self._initialized:
            raise LifecycleError("master already initialized")
        undriven = [
            f"{u.name}.{p.name}"
            for u in self._units
            for p in u.ports()
            if p.direction == INPUT and not p.driven and not p.has_default
        ]
        if undriven:
            raise ConfigurationError(
                "undriven inputs without defaults: " + ", ".join(sorted(undriven)))
        seen = set()
        for _, dst in self._wires:
            key = id(dst)
            if key in seen:
                raise ConfigurationError(f"input driven twice: {dst!r}")
            seen.add(key)

        t0 = self.time
        for unit in self._units:
            unit.on_initialize(t0, self.config.h_ticks)
            unit.lifecycle = "stepping"
        self._propagate()
        self._initialized = True

    def terminate(self) -> None:
        if self._terminated:
            return
        for unit in self._units:
            unit.on_terminate()
            unit.lifecycle = "terminated"
        self._terminated = True

    # -- stepping ----------------------------------------------------------

    @property
    def time(self) -> SimTime:
        return SimTime(self._ticks, self.config.resolution)

    def _propagate(self) -> None:
        for src, dst in self._wires:
            dst.value = src.value

    def step(self) -> SimTime:
        """One Jacobi exchange plus one do-step for every unit."""
        if not self._initialized:
            raise LifecycleError("master not initialized")
        if self._terminated:
            raise LifecycleError("master terminated")
        t = self.time
        h_s = float(self.config.step)
        self._propagate()
        for unit in self._units:
            try:
                unit.do_step(t, h_s)
            except Exception as exc:
                self.terminate()
                raise UnitStepError(unit.name, t, exc) from exc
        self._ticks += self.config.h_ticks
        return self.time

    def run(self, until_s=None, observers=()) -> SimTime:
        """Step until master time reaches ``until_s`` (>= semantics).

        Observers are called after each step with the master; they must
        treat port values as read-only.
        """
        if until_s is None:
            until_s = self.config.end_time_s
        if until_s is None:
            raise ConfigurationError("no end time configured")
        until = exact_fraction(until_s) / self.config.resolution
        while self._ticks < until:
            t = self.step()
            for obs in observers:
                obs(t, self)
        return self.time

    # -- introspection -----------------------------------------------------

    def unit(self, name: str) -> SimUnit:
        for u in self._units:
            if u.name == name:
                return u
        raise ConfigurationError(f"no unit named {name!r}")

    def units(self):
        return tuple(self._units)

    def port_value(self, unit_name: str, port_name: str):
        return self.unit(unit_name).port(port_name).value
