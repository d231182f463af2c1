"""Run metrics: settling, nadir/zenith, steady-state error, verdicts.

A run is judged on its frequency trace against the rated frequency:

  settled     every DG frequency stays inside the band from some time
              after the disturbance through the end of the run;
  diverged    the state became non-finite;
  oscillating finite but never settled.

The same streaming scan serves the live observer (fed every master step)
and offline recomputation from an emitted, possibly decimated, trace.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass


@dataclass
class RunMetrics:
    verdict: str                      # settled | oscillating | diverged
    band_hz: float
    final_window_s: float
    t_end_s: float
    event_time_s: float
    settled_at_s: float | None        # first in-band time held through t_end
    settling_time_s: float | None     # settled_at_s - event_time_s
    nadir_hz: float | None            # min frequency at/after the event
    zenith_hz: float | None           # max frequency at/after the event
    steady_state_error_hz: float | None  # mean |f - f0| over the final window
    diverged_at_s: float | None = None

    @property
    def exit_code(self) -> int:
        return {"settled": 0, "oscillating": 2, "diverged": 3}[self.verdict]


class FrequencyScan:
    """Streaming scan over (t, [f_i]) samples.

    Feed samples in increasing time order, then call result().  Works at
    any sampling rate, so metrics from a decimated trace agree with the
    live full-rate metrics up to the decimation interval.
    """

    def __init__(self, f_ref: float, band_hz: float, event_time_s: float,
                 t_end_s: float, final_window_s: float = 5.0):
        self.f_ref = f_ref
        self.band_hz = band_hz
        self.event_time_s = event_time_s
        self.t_end_s = t_end_s
        self.final_window_s = final_window_s
        self._settled_candidate: float | None = None
        self._nadir: float | None = None
        self._zenith: float | None = None
        self._window: deque[tuple[float, float]] = deque()
        self._window_sum = 0.0
        self._diverged_at: float | None = None

    def feed(self, t_s: float, freqs) -> None:
        if self._diverged_at is not None:
            return
        lo = hi = None
        err_sum = 0.0
        for f in freqs:
            if not math.isfinite(f):
                self._diverged_at = t_s
                return
            if lo is None or f < lo:
                lo = f
            if hi is None or f > hi:
                hi = f
            err_sum += abs(f - self.f_ref)
        if lo is None:
            return
        n = len(freqs)

        if t_s > self.event_time_s:
            if self._nadir is None or lo < self._nadir:
                self._nadir = lo
            if self._zenith is None or hi > self._zenith:
                self._zenith = hi
            out_of_band = (self.f_ref - lo > self.band_hz
                           or hi - self.f_ref > self.band_hz)
            if out_of_band:
                self._settled_candidate = None
            elif self._settled_candidate is None:
                self._settled_candidate = t_s

        window_start = self.t_end_s - self.final_window_s
        if t_s > window_start:
            mean_err = err_sum / n
            self._window.append((t_s, mean_err))
            self._window_sum += mean_err

    def mark_diverged(self, t_s: float) -> None:
        if self._diverged_at is None:
            self._diverged_at = t_s

    def result(self) -> RunMetrics:
        if self._diverged_at is not None:
            verdict = "diverged"
            settled_at = None
        elif self._settled_candidate is not None:
            verdict = "settled"
            settled_at = self._settled_candidate
        else:
            verdict = "oscillating"
            settled_at = None
        sse = self._window_sum / len(self._window) if self._window else None
        return RunMetrics(
            verdict=verdict,
            band_hz=self.band_hz,
            final_window_s=self.final_window_s,
            t_end_s=self.t_end_s,
            event_time_s=self.event_time_s,
            settled_at_s=settled_at,
            settling_time_s=None if settled_at is None else settled_at - self.event_time_s,
            nadir_hz=self._nadir,
            zenith_hz=self._zenith,
            steady_state_error_hz=sse,
            diverged_at_s=self._diverged_at,
        )


def scan_samples(samples, f_ref: float, band_hz: float, event_time_s: float,
                 t_end_s: float, final_window_s: float = 5.0,
                 diverged_at_s: float | None = None) -> RunMetrics:
    """Metrics from an iterable of (t_s, [f_i]) rows (e.g. a re-read trace)."""
    scan = FrequencyScan(f_ref, band_hz, event_time_s, t_end_s, final_window_s)
    for t_s, freqs in samples:
        scan.feed(t_s, freqs)
    if diverged_at_s is not None:
        scan.mark_diverged(diverged_at_s)
    return scan.result()
