"""Master algorithm: registration, wiring rules, Jacobi exchange, time."""

from __future__ import annotations

from fractions import Fraction

import pytest

from mgcosim.kernel import (ConfigurationError, LifecycleError, Master,
                            MasterConfig, SimUnit, UnitStepError)
from mgcosim.rng import substream
from mgcosim.timebase import exact_fraction, ticks_for


class Source(SimUnit):
    def __init__(self, name, value=0.0, tag="Hz"):
        super().__init__(name)
        self.out = self.add_output("y", tag, initial=value)


class PassThrough(SimUnit):
    def __init__(self, name, tag="Hz"):
        super().__init__(name)
        self.inp = self.add_input("x", tag, default=0.0)
        self.out = self.add_output("y", tag)

    def do_step(self, t, h_s):
        self.out.value = self.inp.value


class Recorder(SimUnit):
    def __init__(self, name, tag="Hz"):
        super().__init__(name)
        self.inp = self.add_input("x", tag, default=0.0)
        self.seen = []

    def do_step(self, t, h_s):
        self.seen.append((t.ticks, self.inp.value))


class Noisy(SimUnit):
    """Draws one number per step from a seeded substream."""

    def __init__(self, name, seed):
        super().__init__(name)
        self.rng = substream(seed, f"unit:{name}")
        self.out = self.add_output("y", "dimensionless")

    def do_step(self, t, h_s):
        self.out.value = self.rng.random()


class Failing(SimUnit):
    def do_step(self, t, h_s):
        raise RuntimeError("boom")


def make_master(**kw):
    kw.setdefault("step_s", "0.001")
    return Master(MasterConfig(**kw))


def test_registration_order_gives_dense_ids():
    master = make_master()
    ids = [master.register(Source(n)) for n in ("plant", "comm", "control")]
    assert ids == [0, 1, 2]
    assert [u.name for u in master.units()] == ["plant", "comm", "control"]


def test_register_after_initialize_is_sealed():
    master = make_master()
    master.register(Source("a"))
    master.initialize()
    with pytest.raises(LifecycleError, match="master sealed"):
        master.register(Source("b"))


def test_duplicate_unit_name_rejected():
    master = make_master()
    master.register(Source("a"))
    with pytest.raises(ConfigurationError, match="duplicate unit id"):
        master.register(Source("a"))


def test_connect_checks_unit_tags():
    master = make_master()
    src = Source("plant", tag="Hz")
    dst = Recorder("agent", tag="W")
    master.register(src)
    master.register(dst)
    with pytest.raises(ConfigurationError, match="unit mismatch"):
        master.connect(src.out, dst.inp)


def test_connect_rejects_second_driver():
    master = make_master()
    a, b = Source("a"), Source("b")
    sink = Recorder("sink")
    for u in (a, b, sink):
        master.register(u)
    master.connect(a.out, sink.inp)
    with pytest.raises(ConfigurationError, match="already driven"):
        master.connect(b.out, sink.inp)


def test_connect_rejects_direction_mismatch():
    master = make_master()
    a, b = Source("a"), Source("b")
    master.register(a)
    master.register(b)
    with pytest.raises(ConfigurationError, match="direction mismatch"):
        master.connect(a.out, b.out)


def test_initialize_lists_undriven_inputs():
    master = make_master()

    class NeedsInput(SimUnit):
        def __init__(self):
            super().__init__("needy")
            self.add_input("x", "Hz")   # no default, never driven

    master.register(NeedsInput())
    with pytest.raises(ConfigurationError, match="needy.x"):
        master.initialize()


def test_jacobi_one_step_delay():
    master = make_master()
    src = Source("src", value=7.0)
    mid = PassThrough("mid")
    sink = Recorder("sink")
    for u in (src, mid, sink):
        master.register(u)
    master.connect(src.out, mid.inp)
    master.connect(mid.out, sink.inp)
    master.initialize()
    master.step()   # mid computes y=7 during this step; sink still sees initial 0
    master.step()
    assert sink.seen[0][1] == 0.0
    assert sink.seen[1][1] == 7.0


def test_hundred_steps_land_exactly_on_tenth_of_second():
    master = make_master(step_s="0.001")
    master.register(Source("a"))
    master.initialize()
    for _ in range(100):
        master.step()
    assert master.time.ticks == 100 * 1000
    assert master.time.seconds == 0.1
    assert master.time.exact_seconds() == Fraction(1, 10)


def test_run_until_semantics():
    master = make_master(step_s="0.001")
    master.register(Source("a"))
    master.initialize()
    end = master.run(until_s="0.0105")
    assert end.exact_seconds() == Fraction(11, 1000)   # first grid point >= 10.5 ms


def test_step_size_must_align_with_resolution():
    with pytest.raises(ConfigurationError, match="not an integer multiple"):
        MasterConfig(step_s="0.0015", resolution_s="0.001")


def test_unit_failure_carries_unit_and_time():
    master = make_master()
    master.register(Failing("bad"))
    master.initialize()
    with pytest.raises(UnitStepError) as excinfo:
        master.step()
    assert excinfo.value.unit_name == "bad"
    assert excinfo.value.time.ticks == 0
    with pytest.raises(LifecycleError, match="terminated"):
        master.step()


def test_identical_seed_identical_port_values():
    def trace(seed):
        master = make_master(seed=seed)
        noisy = Noisy("n", seed)
        rec = Recorder("r", tag="dimensionless")
        master.register(noisy)
        master.register(rec)
        master.connect(noisy.out, rec.inp)
        master.initialize()
        for _ in range(50):
            master.step()
        return rec.seen

    assert trace(123) == trace(123)
    assert trace(123) != trace(124)


def test_observers_called_after_each_step():
    master = make_master()
    master.register(Source("a", value=3.0))
    master.initialize()
    times = []
    master.run(until_s="0.005", observers=[lambda t, m: times.append(t.ticks)])
    assert times == [1000, 2000, 3000, 4000, 5000]


def test_exact_fraction_and_ticks_for():
    assert exact_fraction(0.001) == Fraction(1, 1000)
    assert exact_fraction("1e-6") == Fraction(1, 10**6)
    assert ticks_for("0.1", Fraction(1, 10**6)) == 100_000
    with pytest.raises(ValueError):
        ticks_for("0.0005", Fraction(1, 1000))
