"""Command line entry point.

Subcommands cover the pipeline end to end: `repdays` reduces an hourly
CSV to weighted representative days, `simulate` runs the market model,
`calibrate` fits price-curve parameters with the GA and `metrics`
scores a forecast against observations. Every run writes a manifest
(resolved configuration, input digests, seed) next to its outputs
before any work starts; all randomness flows from --seed.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from . import calibrate as cal
from . import engine, repdays
from .ingest import (
    InputError,
    bundled_cost_table,
    load_cost_table,
    load_hourly_series,
    load_plant_registry,
    load_scenario,
)

log = logging.getLogger(__name__)


class CLIError(Exception):
    """Bad invocation or bad input; exits with status 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        raise CLIError(message)


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _write_manifest(out_dir: Path, subcommand: str, args: argparse.Namespace,
                    inputs: dict[str, Path], end: bool = False,
                    started: str | None = None) -> str:
    manifest = {
        "subcommand": subcommand,
        "tool_version": __version__,
        "config": {k: v for k, v in sorted(vars(args).items())
                   if k not in ("func",) and v is not None},
        "inputs": {name: {"path": str(p), "sha256": _sha256(p)}
                   for name, p in inputs.items()},
        "seed": getattr(args, "seed", None),
        "started": started or datetime.now(timezone.utc).isoformat(),
        "finished": datetime.now(timezone.utc).isoformat() if end else None,
    }
    manifest["config"] = {k: (str(v) if isinstance(v, Path) else v)
                          for k, v in manifest["config"].items()}
    with open(out_dir / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest["started"]


def _prepare_out(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _require_file(path) -> Path:
    p = Path(path)
    if not p.is_file():
        raise CLIError(f"input file not found: {p}")
    return p


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _fmt(x) -> str:
    return repr(float(x))


# ---------------------------------------------------------------------------
# repdays


def cmd_repdays(args) -> int:
    out = _prepare_out(args)
    input_path = _require_file(args.input)
    started = _write_manifest(out, "repdays", args, {"input": input_path})

    ts = load_hourly_series(input_path)
    log.info("loaded %d complete days (%d hours, %d dropped)",
             ts.n_days, ts.n_hours, ts.dropped_hours)

    rep = repdays.reduce_to_representative_year(ts, args.k, args.method, seed=args.seed)
    repdays.save_representative_days(rep, out / "representative_days.csv")

    k_list = sorted({int(k) for k in (args.sweep.split(",") if args.sweep else [args.k])})
    rows = repdays.evaluate_k_range(ts, k_list, args.method, seed=args.seed)
    _write_csv(
        out / "metrics.csv",
        ["k", "method", "ce_av", "nrmse_av", "ree_av"],
        [[r["k"], r["method"], _fmt(r["ce_av"]), _fmt(r["nrmse_av"]), _fmt(r["ree_av"])]
         for r in rows],
    )
    _write_manifest(out, "repdays", args, {"input": input_path}, end=True, started=started)
    return 0


# ---------------------------------------------------------------------------
# simulate


def _load_bundle_inputs(args):
    scenario = load_scenario(_require_file(args.scenario))
    cost_table = (load_cost_table(_require_file(args.costs))
                  if args.costs else bundled_cost_table())
    registry = load_plant_registry(_require_file(args.registry), cost_table)
    rep = repdays.load_representative_days(_require_file(args.repdays))
    return scenario, cost_table, registry, rep


class _DispatchLogSink:
    """Streams per-year results into the output CSVs as they complete."""

    def __init__(self, out: Path, with_dispatch: bool):
        self.mix_fh = open(out / "mix_by_year.csv", "w", newline="")
        self.mix = csv.writer(self.mix_fh)
        self.mix.writerow(["year", "type", "energy_mwh", "share"])
        self.funds_fh = open(out / "funds_by_year.csv", "w", newline="")
        self.funds = csv.writer(self.funds_fh)
        self.funds.writerow(["year", "genco_id", "funds"])
        self.invest_fh = open(out / "investments.csv", "w", newline="")
        self.invest = csv.writer(self.invest_fh)
        self.invest.writerow(["year", "genco_id", "type", "capacity_mw", "npv",
                              "committed", "online_year"])
        self.dispatch_fh = None
        self.dispatch = None
        if with_dispatch:
            self.dispatch_fh = open(out / "dispatch_log.csv", "w", newline="")
            self.dispatch = csv.writer(self.dispatch_fh)
            self.dispatch.writerow(["year", "cluster", "hour", "weight", "plant_id",
                                    "price", "dispatch_mw", "clearing_price",
                                    "unserved_mw"])

    def __call__(self, result: engine.YearResult) -> None:
        for ptype in sorted(result.energy_mwh):
            self.mix.writerow([result.year, ptype, _fmt(result.energy_mwh[ptype]),
                               _fmt(result.mix.get(ptype, 0.0))])
        for gid in sorted(result.funds):
            self.funds.writerow([result.year, gid, _fmt(result.funds[gid])])
        for ev in result.investment_log:
            self.invest.writerow([ev.year, ev.genco_id, ev.plant_type,
                                  _fmt(ev.capacity_mw), _fmt(ev.npv),
                                  int(ev.committed), ev.online_year])
        if self.dispatch is not None and result.dispatch_detail:
            for day in result.dispatch_detail:
                for hour, clearing in enumerate(day["clearings"], start=1):
                    for pid in sorted(clearing.dispatch):
                        self.dispatch.writerow([
                            result.year, day["cluster"], hour, _fmt(day["weight"]),
                            pid, _fmt(day["bid_prices"][pid]),
                            _fmt(clearing.dispatch[pid]),
                            _fmt(clearing.clearing_price), _fmt(clearing.unserved),
                        ])
        for fh in self._handles():
            fh.flush()

    def _handles(self):
        handles = [self.mix_fh, self.funds_fh, self.invest_fh]
        if self.dispatch_fh is not None:
            handles.append(self.dispatch_fh)
        return handles

    def close(self) -> None:
        for fh in self._handles():
            fh.close()


def cmd_simulate(args) -> int:
    out = _prepare_out(args)
    inputs = {"scenario": _require_file(args.scenario),
              "registry": _require_file(args.registry),
              "repdays": _require_file(args.repdays)}
    if args.costs:
        inputs["costs"] = _require_file(args.costs)
    started = _write_manifest(out, "simulate", args, inputs)

    scenario, cost_table, registry, rep = _load_bundle_inputs(args)
    world = engine.init_world(scenario, registry, rep, cost_table, seed=args.seed)
    world.keep_dispatch = args.dispatch_log
    horizon = scenario.end_year - scenario.start_year + 1
    sink = _DispatchLogSink(out, args.dispatch_log)
    try:
        engine.run(world, horizon, sink=sink)
    finally:
        sink.close()
    _write_manifest(out, "simulate", args, inputs, end=True, started=started)
    return 0


# ---------------------------------------------------------------------------
# calibrate


def _load_target(path: Path) -> dict[int, dict[str, float]]:
    target: dict[int, dict[str, float]] = {}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = [c for c in ("year", "type", "share") if c not in (reader.fieldnames or [])]
        if missing:
            raise InputError(f"{path}: missing column(s) {', '.join(missing)}")
        for row in reader:
            target.setdefault(int(row["year"]), {})[row["type"]] = float(row["share"])
    if not target:
        raise InputError(f"{path}: empty target trajectory")
    return target


def cmd_calibrate(args) -> int:
    out = _prepare_out(args)
    inputs = {"scenario": _require_file(args.scenario),
              "registry": _require_file(args.registry),
              "repdays": _require_file(args.repdays),
              "target": _require_file(args.target)}
    if args.costs:
        inputs["costs"] = _require_file(args.costs)
    started = _write_manifest(out, "calibrate", args, inputs)

    scenario, cost_table, registry, rep = _load_bundle_inputs(args)
    target = _load_target(inputs["target"])
    bundle = cal.ScenarioBundle(
        scenario=scenario, registry=registry, rep_year=rep, cost_table=cost_table,
        target=target, include_first_year=not args.exclude_first_year,
    )
    if args.mode == "validation":
        layout = cal.validation_layout()
        objective = cal.ValidationObjective(bundle, layout)
    else:
        layout = cal.longterm_layout(scenario.start_year, scenario.end_year)
        objective = cal.LongTermObjective(bundle, layout)

    cfg = cal.GAConfig(
        population_size=args.pop,
        crossover_prob=args.cxpb,
        mutation_prob=args.mutpb,
        max_generations=args.gens,
        bounds=layout.bounds,
        seed=args.seed,
        parallel_workers=args.workers,
    )
    result = cal.ga_run(cfg, objective, log_path=out / "generation_log.csv")

    _write_csv(
        out / "best.csv",
        ["fitness"] + list(layout.gene_names),
        [[_fmt(result.best.fitness)] + [_fmt(g) for g in result.best.genome]],
    )
    log.info("best fitness %.6f after %d generations",
             result.best.fitness, result.n_generations - 1)
    _write_manifest(out, "calibrate", args, inputs, end=True, started=started)
    return 0


# ---------------------------------------------------------------------------
# metrics


def cmd_metrics(args) -> int:
    out = _prepare_out(args)
    inputs = {"simulated": _require_file(args.simulated),
              "observed": _require_file(args.observed)}
    started = _write_manifest(out, "metrics", args, inputs)

    simulated = _load_target(inputs["simulated"])
    observed = _load_target(inputs["observed"])
    if args.baseline_year not in observed:
        raise CLIError(f"baseline year {args.baseline_year} not in observed trajectory")
    baseline = observed[args.baseline_year]
    forecast_years = {y: v for y, v in simulated.items() if y != args.baseline_year}
    metrics = cal.forecast_error_metrics(forecast_years, observed, baseline)
    _write_csv(
        out / "forecast_metrics.csv",
        ["type", "mae", "mase", "rmse"],
        [[t, _fmt(m["mae"]), "" if m["mase"] is None else _fmt(m["mase"]), _fmt(m["rmse"])]
         for t, m in sorted(metrics.items())],
    )
    _write_manifest(out, "metrics", args, inputs, end=True, started=started)
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> _Parser:
    parser = _Parser(prog="emsim",
                     description="electricity market simulation toolkit")
    parser.add_argument("--log-level", choices=["error", "warn", "info", "debug"],
                        default="warn")
    sub = parser.add_subparsers(dest="subcommand")

    p = sub.add_parser("repdays", help="reduce hourly data to representative days")
    p.add_argument("--input", required=True, help="hourly series CSV")
    p.add_argument("--k", type=int, default=8, help="number of clusters")
    p.add_argument("--method", choices=["medoid", "centroid"], default="medoid")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sweep", help="comma separated k values for metrics.csv")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_repdays)

    p = sub.add_parser("simulate", help="run the market simulation")
    p.add_argument("--scenario", required=True)
    p.add_argument("--registry", required=True)
    p.add_argument("--repdays", required=True)
    p.add_argument("--costs", help="cost table CSV (default: bundled tables)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dispatch-log", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("calibrate", help="fit price-curve parameters with the GA")
    p.add_argument("mode", choices=["validation", "longterm"])
    p.add_argument("--scenario", required=True)
    p.add_argument("--registry", required=True)
    p.add_argument("--repdays", required=True)
    p.add_argument("--costs")
    p.add_argument("--target", required=True, help="target mix CSV (year,type,share)")
    p.add_argument("--pop", type=int, default=120)
    p.add_argument("--cxpb", type=float, default=0.5)
    p.add_argument("--mutpb", type=float, default=0.2)
    p.add_argument("--gens", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    p.add_argument("--exclude-first-year", action="store_true",
                   help="drop the start year from the long-term objective")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("metrics", help="forecast error metrics between trajectories")
    p.add_argument("--simulated", required=True)
    p.add_argument("--observed", required=True)
    p.add_argument("--baseline-year", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_metrics)

    return parser


_LOG_LEVELS = {"error": logging.ERROR, "warn": logging.WARNING,
               "info": logging.INFO, "debug": logging.DEBUG}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "subcommand", None) is None:
            parser.print_usage(sys.stderr)
            return 1
        logging.basicConfig(level=_LOG_LEVELS[args.log_level],
                            format="%(levelname)s %(name)s: %(message)s")
        return args.func(args)
    except CLIError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (InputError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # runtime failure
        log.exception("run failed")
        print(f"runtime failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
