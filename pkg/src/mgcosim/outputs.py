"""Structured output emission: trace CSV, metrics document, latency dump.

All numeric formatting is fixed (9 significant digits for traces, 6
decimals for latency samples, '\\n' line endings), so a deterministic run
produces byte-identical files.
"""

from __future__ import annotations

import math

import yaml

from .experiments import ComparisonRow, RunResult, SweepResult


def sig9(x: float) -> str:
    return "%.9g" % x


def render_trace_csv(header: list[str], rows: list[list[float]]) -> str:
    out = [",".join(header)]
    for row in rows:
        out.append(",".join(sig9(v) for v in row))
    return "\n".join(out) + "\n"


def render_latency_csv(packets, resolution_float: float = 1e-6) -> str:
    """Raw per-packet dump: link_id, seq, send_time_s, deliver_time_s,
    latency_s, dropped.  Times carry 6 decimals, exact at the default
    1 microsecond tick."""
    lines = ["link_id,seq,send_time_s,deliver_time_s,latency_s,dropped"]
    for p in packets:
        send_s = p.send_ticks * resolution_float
        if p.dropped:
            lines.append(f"{p.link_id},{p.seq},{send_s:.6f},,,1")
        else:
            deliver_s = p.deliver_ticks * resolution_float
            lines.append(
                f"{p.link_id},{p.seq},{send_s:.6f},{deliver_s:.6f},{p.latency_s:.6f},0")
    return "\n".join(lines) + "\n"


def _opt(value):
    if value is None:
        return None
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    return value


def metrics_document(result: RunResult) -> dict:
    scn = result.scenario
    m = result.metrics
    links = {}
    for stats in result.link_stats:
        links[stats.link_id] = {
            "sent": result.link_sent.get(stats.link_id, stats.count + stats.dropped),
            "delivered": stats.count,
            "dropped": stats.dropped,
            "min_s": stats.min_s,
            "q1_s": stats.q1_s,
            "median_s": stats.median_s,
            "q3_s": stats.q3_s,
            "max_s": stats.max_s,
            "mean_s": stats.mean_s,
        }
    for lid in sorted(result.link_sent):
        if lid not in links:
            links[lid] = {"sent": result.link_sent[lid], "delivered": 0,
                          "dropped": result.link_drops.get(lid, 0)}
    return {
        "scenario": scn.name,
        "seed": scn.seed,
        "control_mode": scn.control.mode,
        "network_scenario": scn.network.scenario,
        "verdict": m.verdict,
        "exit_code": m.exit_code,
        "band_hz": m.band_hz,
        "final_window_s": m.final_window_s,
        "event_time_s": m.event_time_s,
        "settled_at_s": _opt(m.settled_at_s),
        "settling_time_s": _opt(m.settling_time_s),
        "nadir_hz": _opt(m.nadir_hz),
        "zenith_hz": _opt(m.zenith_hz),
        "steady_state_error_hz": _opt(m.steady_state_error_hz),
        "diverged_at_s": _opt(m.diverged_at_s),
        "t_end_s": scn.master.t_end_s,
        "step_s": scn.master.step_s,
        "links": dict(sorted(links.items())),
    }


def render_metrics_doc(result: RunResult) -> str:
    return yaml.safe_dump(metrics_document(result), sort_keys=False,
                          default_flow_style=False)


def _fmt_opt(x, pattern="{:.3f}") -> str:
    return "-" if x is None else pattern.format(x)


def render_comparison_table(rows: list[ComparisonRow]) -> str:
    header = f"{'scenario':<42} {'network':<10} {'verdict':<12} " \
             f"{'settling_s':>10} {'sse_hz':>12}"
    lines = [header, "-" * len(header)]
    for row in rows:
        lines.append(
            f"{row.name:<42} {row.network:<10} {row.verdict:<12} "
            f"{_fmt_opt(row.settling_time_s):>10} "
            f"{_fmt_opt(row.steady_state_error_hz, '{:.3e}'):>12}")
    return "\n".join(lines) + "\n"


def render_comparison_csv(rows: list[ComparisonRow]) -> str:
    lines = ["name,network,verdict,settling_time_s,steady_state_error_hz,nadir_hz,zenith_hz"]
    for row in rows:
        lines.append(",".join([
            row.name, row.network, row.verdict,
            "" if row.settling_time_s is None else sig9(row.settling_time_s),
            "" if row.steady_state_error_hz is None else sig9(row.steady_state_error_hz),
            "" if row.nadir_hz is None else sig9(row.nadir_hz),
            "" if row.zenith_hz is None else sig9(row.zenith_hz),
        ]))
    return "\n".join(lines) + "\n"


def render_sweep_csv(result: SweepResult) -> str:
    lines = ["kp,ki,seed,verdict,settling_time_s,steady_state_error_hz"]
    for p in result.points:
        lines.append(",".join([
            sig9(p.kp), sig9(p.ki), str(p.seed), p.verdict,
            "" if p.settling_time_s is None else sig9(p.settling_time_s),
            "" if p.steady_state_error_hz is None else sig9(p.steady_state_error_hz),
        ]))
    return "\n".join(lines) + "\n"


def render_sweep_summary(result: SweepResult) -> str:
    best = result.best()
    lines = [
        f"grid points: {len(result.points)}",
        f"settled points: {len(result.settled())}",
        f"base gains: kp={sig9(result.base_kp)} ki={sig9(result.base_ki)}",
    ]
    if best is None:
        lines.append("best settled point: none")
    else:
        lines.append(
            f"best settled point: kp={sig9(best.kp)} ki={sig9(best.ki)} "
            f"settling_time_s={sig9(best.settling_time_s)}")
        lines.append(f"stabilizing ki relative to base: {result.ki_direction()}")
    return "\n".join(lines) + "\n"


def write_text(path, text: str) -> None:
    """Render-then-write: the file is only opened once the full document
    exists, so a bad path fails before any partial content lands."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
