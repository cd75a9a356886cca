"""Command-line front end.

Subcommands:
  simulate <cfg> -o <dir>   run one scenario, write timeseries.csv + summary.csv
  sweep <manifest> -o <dir> run a list of scenarios, write lookup_table.csv
  mpp <cfg>                 print the PV maximum power point

Exit codes: 0 success, 1 validation failure, 2 simulation failure,
3 I/O failure.  The output directory falls back to $DCMICROGRID_OUT_DIR
and then to ./out when -o is not given.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .config import Scenario, dump_scenario, parse_scenario, with_overrides
from .errors import ConfigError, MicrogridError
from .grid import SimResult, SteadySummary, simulate
from .pv import pv_mpp

OUT_DIR_ENV = "DCMICROGRID_OUT_DIR"

# lookup_table.csv / summary.csv column order; 'error' stays last.
LOOKUP_COLUMNS = [
    "label", "f_sw_khz", "battery_desc", "irradiance_wm2",
    "pv_v", "pv_i", "src_v", "src_i", "src_p_mean", "mppt_duty",
    "pmu1_v", "pmu1_i", "pmu1_p", "pmu2_v", "pmu2_i", "pmu2_p",
    "efficiency_pct", "error",
]


def _num(x) -> str:
    """Fixed 6-significant-digit formatting for deterministic CSV diffs."""
    return f"{x:.6g}"


def battery_description(scenario: Scenario) -> str:
    descs = [f"{u.battery.v_nominal:g}V {u.battery.capacity:g}Ah"
             for u in scenario.pmus]
    if len(set(descs)) == 1:
        return f"{len(descs)}x {descs[0]}" if len(descs) > 1 else descs[0]
    return " + ".join(descs)


def lookup_row(scenario: Scenario, summary: SteadySummary) -> dict:
    """One lookup-table row from a finished run's trailing-window means."""
    row = {
        "label": scenario.label,
        "f_sw_khz": _num(scenario.pmus[0].converter.f_sw / 1e3),
        "battery_desc": battery_description(scenario),
        "irradiance_wm2": _num(summary.irradiance),
        "pv_v": _num(summary.pv_v),
        "pv_i": _num(summary.pv_i),
        "src_v": _num(summary.v_bus),
        "src_i": _num(summary.i_dc),
        "src_p_mean": _num(summary.src_p),
        "mppt_duty": _num(summary.duty),
        "efficiency_pct": "" if summary.zero_power else _num(100.0 * summary.efficiency),
        "error": "",
    }
    for j in range(2):
        tag = f"pmu{j + 1}"
        if j < len(summary.pmu_v):
            row[f"{tag}_v"] = _num(summary.pmu_v[j])
            row[f"{tag}_i"] = _num(summary.pmu_i[j])
            row[f"{tag}_p"] = _num(summary.pmu_p[j])
        else:
            row[f"{tag}_v"] = row[f"{tag}_i"] = row[f"{tag}_p"] = ""
    return row


def error_row(label: str, message: str) -> dict:
    row = {col: "" for col in LOOKUP_COLUMNS}
    row["label"] = label
    row["error"] = message
    return row


def write_lookup_csv(rows: list[dict], path: Path):
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=LOOKUP_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)


def write_timeseries_csv(result: SimResult, path: Path):
    n_pmu = result.pmu_v.shape[0]
    header = ["t", "g", "pv_v", "pv_i", "pv_p", "duty", "v_bus", "i_dc"]
    for j in range(n_pmu):
        header += [f"pmu{j + 1}_v", f"pmu{j + 1}_i", f"pmu{j + 1}_p",
                   f"pmu{j + 1}_soc"]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for k in range(result.t.size):
            row = [_num(result.t[k]), _num(result.g[k]), _num(result.pv_v[k]),
                   _num(result.pv_i[k]), _num(result.pv_p[k]),
                   _num(result.duty[k]), _num(result.v_bus[k]),
                   _num(result.i_dc[k])]
            for j in range(n_pmu):
                row += [_num(result.pmu_v[j, k]), _num(result.pmu_i[j, k]),
                        _num(result.pmu_p[j, k]), _num(result.pmu_soc[j, k])]
            writer.writerow(row)


def _format_row(row: dict) -> str:
    return ", ".join(f"{k}={row[k]}" for k in LOOKUP_COLUMNS if row[k] != "")


def _resolve_out_dir(arg: str | None) -> Path:
    if arg:
        return Path(arg)
    env = os.environ.get(OUT_DIR_ENV)
    return Path(env) if env else Path("out")


def cmd_simulate(args) -> int:
    scenario = parse_scenario(args.config)
    scenario = with_overrides(scenario, dt=args.dt, duration=args.duration)
    if args.dry_run:
        print(dump_scenario(scenario), end="")
        return 0
    result = simulate(scenario)
    out_dir = _resolve_out_dir(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    row = lookup_row(scenario, result.summary)
    write_timeseries_csv(result, out_dir / "timeseries.csv")
    write_lookup_csv([row], out_dir / "summary.csv")
    print(_format_row(row))
    return 0


def _sweep_worker(task):
    """Run one sweep entry; returns (index, row_dict)."""
    index, path, dt, duration = task
    scenario = parse_scenario(path)
    scenario = with_overrides(scenario, dt=dt, duration=duration)
    result = simulate(scenario)
    return index, lookup_row(scenario, result.summary)


def read_manifest(path: Path) -> list[Path]:
    entries = []
    for line in path.read_text().splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            entries.append((path.parent / line).resolve())
    return entries


def cmd_sweep(args) -> int:
    manifest = Path(args.manifest)
    if not manifest.is_file():
        raise OSError(f"manifest not found: {manifest}")
    entries = read_manifest(manifest)
    if not entries:
        raise ConfigError(f"{manifest}: manifest lists no scenarios")

    tasks = [(i, p, args.dt, args.duration) for i, p in enumerate(entries)]
    rows: list[dict | None] = [None] * len(entries)
    jobs = args.jobs or min(4, os.cpu_count() or 1, len(entries))

    def record(task, outcome, err=None):
        index = task[0]
        if err is None:
            rows[index] = outcome
        else:
            rows[index] = error_row(entries[index].stem, str(err))

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = {pool.submit(_sweep_worker, t): t for t in tasks}
            for fut, task in futures.items():
                try:
                    _, row = fut.result()
                    record(task, row)
                except MicrogridError as exc:
                    record(task, None, err=exc)
    else:
        for task in tasks:
            try:
                _, row = _sweep_worker(task)
                record(task, row)
            except MicrogridError as exc:
                record(task, None, err=exc)

    out_dir = _resolve_out_dir(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_lookup_csv(rows, out_dir / "lookup_table.csv")
    for row in rows:
        print(_format_row(row))
    return 0


def cmd_mpp(args) -> int:
    scenario = parse_scenario(args.config)
    t_cell = args.t_cell if args.t_cell is not None else scenario.profile.t_cell
    point = pv_mpp(scenario.pv, args.irradiance, t_cell)
    print(f"g={_num(point.g)} W/m^2  t_cell={_num(point.t_cell)} degC  "
          f"v_mp={_num(point.v)} V  i_mp={_num(point.i)} A  p_mp={_num(point.p)} W")
    return 0


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; keep 2 reserved for
    # simulation failures and report usage problems as validation (1).
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dcmicrogrid",
                     description="Averaged-model solar DC microgrid simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run one scenario file")
    p_sim.add_argument("config", help="scenario file (TOML)")
    p_sim.add_argument("-o", "--out-dir", default=None,
                       help=f"output directory (default ${OUT_DIR_ENV} or ./out)")
    p_sim.add_argument("--dry-run", action="store_true",
                       help="validate and print the resolved config, run nothing")
    p_sim.add_argument("--dt", type=float, default=None, help="override step size [s]")
    p_sim.add_argument("--duration", type=float, default=None,
                       help="override run length [s]")
    p_sim.set_defaults(func=cmd_simulate)

    p_sweep = sub.add_parser("sweep", help="run every scenario in a manifest")
    p_sweep.add_argument("manifest", help="text file listing scenario paths")
    p_sweep.add_argument("-o", "--out-dir", default=None)
    p_sweep.add_argument("--jobs", type=int, default=None,
                         help="parallel workers (default: auto)")
    p_sweep.add_argument("--dt", type=float, default=None)
    p_sweep.add_argument("--duration", type=float, default=None)
    p_sweep.set_defaults(func=cmd_sweep)

    p_mpp = sub.add_parser("mpp", help="print the PV maximum power point")
    p_mpp.add_argument("config", help="scenario file (TOML)")
    p_mpp.add_argument("--irradiance", type=float, default=1000.0,
                       help="W/m^2 (default 1000)")
    p_mpp.add_argument("--t-cell", type=float, default=None,
                       help="degC (default: profile t_cell)")
    p_mpp.set_defaults(func=cmd_mpp)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except MicrogridError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
