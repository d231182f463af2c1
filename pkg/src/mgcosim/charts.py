"""Optional static charts rendered from run outputs.

Charts are post-hoc views of the CSV data; nothing downstream depends on
them and the test suite never inspects image content.
"""

from __future__ import annotations


def _pyplot():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def frequency_chart(result, path) -> None:
    """Per-DG frequency vs time, with the settling band around f0."""
    plt = _pyplot()
    header = result.trace_header
    rows = result.trace_rows
    t = [row[0] for row in rows]
    fig, ax = plt.subplots(figsize=(9, 4.5))
    f_ref = result.scenario.plant.f_nominal()
    for col, name in enumerate(header):
        if name.startswith("f_"):
            ax.plot(t, [row[col] for row in rows], label=name, linewidth=0.8)
    band = result.metrics.band_hz
    ax.axhspan(f_ref - band, f_ref + band, color="0.85", zorder=0)
    if result.metrics.event_time_s > 0:
        ax.axvline(result.metrics.event_time_s, color="k", linestyle=":", linewidth=0.8)
    ax.set_xlabel("time [s]")
    ax.set_ylabel("frequency [Hz]")
    ax.set_title(f"{result.scenario.name} — verdict: {result.metrics.verdict}")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def latency_boxplot(link_samples: dict, path, title: str = "link latency") -> None:
    """Box-and-whisker latency distribution per link."""
    plt = _pyplot()
    labels = sorted(link_samples)
    data = [[s * 1e3 for s in link_samples[lid]] for lid in labels]
    fig, ax = plt.subplots(figsize=(8, 4))
    ax.boxplot(data, tick_labels=labels, whis=(0, 100))
    ax.set_ylabel("latency [ms]")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
