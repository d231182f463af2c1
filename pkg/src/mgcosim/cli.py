"""Command-line entry point.

    mgcosim run <scenario> [--out DIR] [--seed N] [--charts]
    mgcosim compare <scenario>... [--out DIR] [--seed N]
    mgcosim sweep <scenario> --kp a,b,... --ki a,b,... [--workers N] [--out DIR]
    mgcosim validate <scenario>...

A scenario argument is a YAML file path or the name of a bundled
scenario (see `mgcosim list`).  Run exit codes are machine readable:
0 settled, 2 oscillating, 3 diverged, 1 any runtime or usage error.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import charts, outputs
from .experiments import compare_scenarios, gain_sweep, run_scenario
from .kernel import ConfigurationError, UnitStepError
from .scenario import (Scenario, ScenarioError, bundled_scenario_names,
                       load_bundled_scenario, load_scenario_file)

OUT_ENV = "MGCOSIM_OUT"


def _resolve_scenario(arg: str, seed_override: int | None) -> Scenario:
    if os.path.exists(arg):
        scn = load_scenario_file(arg)
    else:
        scn = load_bundled_scenario(arg)
    if seed_override is not None:
        scn = scn.with_seed(seed_override)
    return scn


def _out_dir(args) -> Path:
    out = args.out or os.environ.get(OUT_ENV) or "mgcosim-out"
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _cmd_run(args) -> int:
    scn = _resolve_scenario(args.scenario, args.seed)
    result = run_scenario(scn)
    out = _out_dir(args)
    outputs.write_text(out / f"{scn.name}-trace.csv",
                       outputs.render_trace_csv(result.trace_header, result.trace_rows))
    outputs.write_text(out / f"{scn.name}-metrics.yaml",
                       outputs.render_metrics_doc(result))
    if scn.outputs.dump_latency_samples and result.packet_log:
        outputs.write_text(out / f"{scn.name}-latency.csv",
                           outputs.render_latency_csv(result.packet_log))
    if args.charts:
        charts.frequency_chart(result, out / f"{scn.name}-frequency.png")
        if result.link_samples:
            charts.latency_boxplot(result.link_samples,
                                   out / f"{scn.name}-latency.png",
                                   title=f"{scn.name} link latency")
    m = result.metrics
    print(f"{scn.name}: verdict={m.verdict}"
          f" settling_time_s={m.settling_time_s}"
          f" steady_state_error_hz={m.steady_state_error_hz}")
    print(f"outputs written to {out}")
    return result.exit_code


def _cmd_compare(args) -> int:
    scns = [_resolve_scenario(a, args.seed) for a in args.scenarios]
    rows = compare_scenarios(scns)
    table = outputs.render_comparison_table(rows)
    print(table, end="")
    if args.out or os.environ.get(OUT_ENV):
        out = _out_dir(args)
        outputs.write_text(out / "compare.csv", outputs.render_comparison_csv(rows))
        outputs.write_text(out / "compare.txt", table)
        print(f"outputs written to {out}")
    return 0


def _parse_grid(text: str, name: str) -> list[float]:
    try:
        values = [float(v) for v in text.split(",") if v.strip() != ""]
    except ValueError:
        raise ConfigurationError(f"--{name} expects comma-separated numbers") from None
    if not values:
        raise ConfigurationError(f"--{name} grid is empty")
    return values


def _cmd_sweep(args) -> int:
    scn = _resolve_scenario(args.scenario, args.seed)
    kp = _parse_grid(args.kp, "kp")
    ki = _parse_grid(args.ki, "ki")
    result = gain_sweep(scn, kp, ki, workers=args.workers)
    summary = outputs.render_sweep_summary(result)
    print(summary, end="")
    out = _out_dir(args)
    outputs.write_text(out / f"{scn.name}-sweep.csv", outputs.render_sweep_csv(result))
    outputs.write_text(out / f"{scn.name}-sweep.txt", summary)
    print(f"outputs written to {out}")
    return 0


def _cmd_validate(args) -> int:
    status = 0
    for arg in args.scenarios:
        try:
            scn = _resolve_scenario(arg, None)
        except ScenarioError as exc:
            status = 1
            print(f"{arg}: INVALID")
            for problem in exc.problems:
                print(f"  {problem}")
            continue
        except FileNotFoundError:
            status = 1
            print(f"{arg}: INVALID\n  file not found")
            continue
        print(f"{arg}: OK ({scn.control.mode}, network {scn.network.scenario})")
    return status


def _cmd_list(args) -> int:
    for name in bundled_scenario_names():
        print(name)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mgcosim", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one scenario, emit trace and metrics")
    run.add_argument("scenario")
    run.add_argument("--out", help=f"output directory (default ${OUT_ENV} or ./mgcosim-out)")
    run.add_argument("--seed", type=int, help="override the scenario seed")
    run.add_argument("--charts", action="store_true", help="also render PNG charts")
    run.set_defaults(func=_cmd_run)

    comp = sub.add_parser("compare", help="run scenarios differing only in network")
    comp.add_argument("scenarios", nargs="+")
    comp.add_argument("--out")
    comp.add_argument("--seed", type=int)
    comp.set_defaults(func=_cmd_compare)

    sweep = sub.add_parser("sweep", help="grid sweep over PI gains")
    sweep.add_argument("scenario")
    sweep.add_argument("--kp", required=True, help="comma-separated Kp values")
    sweep.add_argument("--ki", required=True, help="comma-separated Ki values")
    sweep.add_argument("--workers", type=int, default=None)
    sweep.add_argument("--out")
    sweep.add_argument("--seed", type=int)
    sweep.set_defaults(func=_cmd_sweep)

    val = sub.add_parser("validate", help="parse and validate scenario files")
    val.add_argument("scenarios", nargs="+")
    val.set_defaults(func=_cmd_validate)

    lst = sub.add_parser("list", help="list bundled scenarios")
    lst.set_defaults(func=_cmd_list)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ScenarioError as exc:
        print(exc, file=sys.stderr)
        return 1
    except (ConfigurationError, UnitStepError, FileNotFoundError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
