"""Command-line entry point.

Subcommands: validate, gen-contacts, simulate, compare, sweep-v. All output
is deterministic given identical inputs and seeds. Exit codes: 0 success,
1 validation error, 2 runtime failure. SKYGS_LOG sets the log level.
"""

from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

from skygs import engine
from skygs.model import POLICIES, ScenarioError, load_scenario
from skygs.orbit import ContactPlanError, build_contact_table, write_contact_plan

log = logging.getLogger("skygs")

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2

SUMMARY_FIELDS = ["total_cost", "avg_latency_min_per_mb", "violation_rate",
                  "final_backlog_mb", "mean_q", "max_q"]


def _setup_logging() -> None:
    level = os.environ.get("SKYGS_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


def _parse_float_list(text: str, flag: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip() != ""]
    except ValueError:
        raise ScenarioError(f"{flag}: expected a comma-separated list of numbers")


def _parse_int_list(text: str, flag: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip() != ""]
    except ValueError:
        raise ScenarioError(f"{flag}: expected a comma-separated list of integers")


def cmd_validate(args: argparse.Namespace) -> int:
    load_scenario(args.scenario)
    print("OK")
    return EXIT_OK


def cmd_gen_contacts(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario)
    table = build_contact_table(scenario)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_contact_plan(table, str(out))
    print(f"wrote {len(table.all_contacts())} contacts to {out}")
    return EXIT_OK


def _resolved_scenario(scenario, args):
    """Apply command-line overrides so every consumer sees the same world."""
    overrides = {}
    for attr, field_name in (("policy", "policy"), ("seed", "seed"),
                             ("v", "v"), ("xi", "xi")):
        value = getattr(args, attr, None)
        if value is not None:
            overrides[field_name] = value
    return replace(scenario, **overrides) if overrides else scenario


def cmd_simulate(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario)
    if args.contacts is not None:
        scenario = replace(scenario, contact_plan_path=args.contacts)
    scenario = _resolved_scenario(scenario, args)
    record, metrics = engine.run(scenario)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    records_path = out / f"records_{record.policy}_seed{record.seed}.csv"
    summary_path = out / f"summary_{record.policy}_seed{record.seed}.json"
    engine.write_records_csv(str(records_path), record)
    engine.write_summary_json(str(summary_path), record, metrics)
    if args.dump_weights is not None:
        _dump_weights(scenario, record, args.dump_weights)
    print(f"wrote {records_path} and {summary_path}")
    return EXIT_OK


def _dump_weights(base, record, out_dir: str) -> None:
    """Re-derive each slot's weight matrix for inspection (skygs only)."""
    from skygs.orbit import build_contact_table
    from skygs.queues import ArrivalModel, SatelliteState, actual_downlink, advance_backlog
    from skygs.scheduler import ScenarioArrays, build_bipartite, dump_weight_matrix
    from skygs import queues

    table = build_contact_table(base)
    arrays = ScenarioArrays.from_scenario(base)
    arrivals = ArrivalModel(base)
    states = {s.id: SatelliteState(s.id) for s in base.satellites}
    q = 0.0
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    by_slot: dict[int, list] = {}
    for r in record.records:
        by_slot.setdefault(r.slot, []).append(r)
    for t in range(base.horizon):
        graph = build_bipartite(states, q, t, base, table, arrays)
        dump_weight_matrix(graph, str(out / f"weights_slot{t:05d}.csv"))
        phi = 0.0
        for r in by_slot.get(t, []):
            rate = table.rate(t, r.satellite_id, r.ground_station_id)
            actual_downlink(states[r.satellite_id], rate * base.tau)
            phi += r.phi_s
        q = queues.update_virtual_queue(q, phi)
        for sat in base.satellites:
            advance_backlog(states[sat.id], arrivals.arrivals_for_slot(sat.id, t), t)


def _grid_row(scenario, policy: str, seed: int, v, xi) -> dict:
    row = {"policy": policy, "seed": seed, "status": "ok"}
    try:
        record, metrics = engine.run(scenario, policy=policy, seed=seed, v=v, xi=xi)
        summary = engine.summary_dict(record, metrics)
        for k in SUMMARY_FIELDS:
            row[k] = summary[k]
    except Exception as exc:  # noqa: BLE001 - a failed run must not kill the grid
        log.warning("run %s/seed %s failed: %s", policy, seed, exc)
        row["status"] = "failed"
        for k in SUMMARY_FIELDS:
            row[k] = ""
    return row


def cmd_compare(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario)
    policies = [p.strip().lower() for p in args.policies.split(",") if p.strip()]
    for p in policies:
        if p not in POLICIES:
            raise ScenarioError(f"--policies: unknown policy {p!r} (valid: {', '.join(POLICIES)})")
    seeds = _parse_int_list(args.seeds, "--seeds")
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    grid = [(policy, seed) for policy in policies for seed in seeds]
    # runs share no mutable state; rows come back in input order regardless of
    # completion order
    with ThreadPoolExecutor(max_workers=min(8, max(1, len(grid)))) as pool:
        rows = list(pool.map(
            lambda ps: _grid_row(scenario, ps[0], ps[1], args.v, args.xi), grid))
    with open(out, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=["policy", "seed", "status"] + SUMMARY_FIELDS)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: (repr(float(v)) if isinstance(v, float) else v)
                             for k, v in row.items()})
    print(f"wrote {out} ({len(rows)} rows)")
    return EXIT_OK


def cmd_sweep_v(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario)
    v_list = _parse_float_list(args.v_list, "--v-list")
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)

    def sweep_row(v: float) -> dict:
        _record, metrics = engine.run(scenario, policy="skygs", seed=args.seed,
                                      v=v, xi=args.xi)
        return {
            "v": repr(float(v)),
            "total_cost": repr(float(metrics.total_cost)),
            "avg_latency_min_per_mb": repr(float(metrics.avg_latency_min_per_mb))
            if metrics.avg_latency_min_per_mb is not None else "",
            "violation_rate": repr(float(metrics.violation_rate)),
            "mean_q": repr(float(metrics.mean_q)),
        }

    with ThreadPoolExecutor(max_workers=min(8, max(1, len(v_list)))) as pool:
        rows = list(pool.map(sweep_row, v_list))
    with open(out, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(
            fh, fieldnames=["v", "total_cost", "avg_latency_min_per_mb",
                            "violation_rate", "mean_q"])
        writer.writeheader()
        writer.writerows(rows)
    print(f"wrote {out} ({len(rows)} rows)")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="skygs",
                                     description="Federated ground-station downlink scheduling")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate a scenario file")
    p.add_argument("--scenario", required=True)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("gen-contacts", help="write a contact-plan CSV from the propagator")
    p.add_argument("--scenario", required=True)
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=cmd_gen_contacts)

    p = sub.add_parser("simulate", help="run one simulation")
    p.add_argument("--scenario", required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--policy", choices=POLICIES)
    p.add_argument("--seed", type=int)
    p.add_argument("--v", type=float)
    p.add_argument("--xi", type=float)
    p.add_argument("--contacts", help="contact-plan CSV to use instead of the propagator")
    p.add_argument("--dump-weights", help="directory for per-slot weight matrices (debug)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("compare", help="run a policies x seeds grid")
    p.add_argument("--scenario", required=True)
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--policies", default=",".join(POLICIES))
    p.add_argument("--seeds", default="1")
    p.add_argument("--v", type=float)
    p.add_argument("--xi", type=float)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("sweep-v", help="sweep the trade-off weight V")
    p.add_argument("--scenario", required=True)
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--v-list", required=True)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--xi", type=float)
    p.set_defaults(func=cmd_sweep_v)
    return parser


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ScenarioError, ContactPlanError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except engine.InfeasibleAssignmentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
