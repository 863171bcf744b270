"""Slot loop: observe, schedule, downlink, update queues, record.

Phase order within a slot is a fixed contract: the policy decides from the
state as of the start of the slot, downlinks pop backlog and produce cost and
latency records, the virtual queue absorbs this slot's threshold excess, and
only then do this slot's arrivals join the backlog (they become eligible for
downlink from the next slot on).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Any

from skygs import accounting, queues
from skygs.accounting import DownlinkRecord, RunMetrics
from skygs.baselines import make_policy
from skygs.model import Scenario
from skygs.orbit import ContactTable, build_contact_table
from skygs.queues import ArrivalModel, SatelliteState
from skygs.scheduler import Assignment, ScenarioArrays, check_assignment


class InfeasibleAssignmentError(RuntimeError):
    """A policy emitted an assignment violating the slot constraints."""

    def __init__(self, slot: int, policy: str, violations: list[str]):
        self.slot = slot
        self.violations = violations
        lines = "; ".join(violations)
        super().__init__(f"slot {slot}: policy {policy!r} infeasible: {lines}")


@dataclass
class SimState:
    slot: int
    states: dict[str, SatelliteState]
    q: float
    records: list[DownlinkRecord] = field(default_factory=list)
    q_trace: list[float] = field(default_factory=list)        # Q(t+1) per slot
    backlog_trace: list[float] = field(default_factory=list)  # total backlog after arrivals
    cost_trace: list[float] = field(default_factory=list)
    phi_trace: list[float] = field(default_factory=list)


@dataclass(frozen=True)
class RunRecord:
    """Everything a run produced; reproducible from (scenario, seed, policy)."""

    policy: str
    seed: int
    scenario_hash: str
    records: tuple[DownlinkRecord, ...]
    q_trace: tuple[float, ...]
    backlog_trace: tuple[float, ...]
    cost_trace: tuple[float, ...]
    phi_trace: tuple[float, ...]
    final_backlogs: dict[str, float]
    total_arrivals: dict[str, float]


def step(sim: SimState, policy, scenario: Scenario, table: ContactTable,
         arrivals: ArrivalModel, arrays: ScenarioArrays) -> list[DownlinkRecord]:
    """Advance one slot; returns the slot's downlink records."""
    t = sim.slot
    assignment: Assignment = policy.schedule(sim.states, sim.q, t, table)
    violations = check_assignment(assignment, scenario, table)
    if violations:
        raise InfeasibleAssignmentError(t, policy.name, violations)

    slot_records: list[DownlinkRecord] = []
    phi_total = 0.0
    for tr in assignment.triples:
        state = sim.states[tr.satellite_id]
        rate = table.rate(t, tr.satellite_id, tr.ground_station_id)
        capacity = queues.downlink_capacity(rate, scenario.tau)
        moved, popped = queues.actual_downlink(state, capacity)
        gi = arrays.gs_index[tr.ground_station_id]
        di = arrays.dc_index[tr.data_center_id]
        lq = accounting.queuing_latency(popped, t, scenario.tau)
        lt1 = accounting.transmission_latency_gsl(moved, rate)
        lt2 = accounting.transmission_latency_backhaul(moved, float(arrays.backhaul[gi, di]))
        lc = accounting.computation_latency(moved, float(arrays.dc_kappa[di]))
        l_total = lq + lt1 + lt2 + lc
        cr, cc, c_total = accounting.costs(moved, float(arrays.price_slot[gi]),
                                           float(arrays.dc_price[di]),
                                           float(arrays.dc_kappa[di]))
        phi_s = accounting.excess_latency(l_total, moved, scenario.xi)
        phi_total += phi_s
        slot_records.append(DownlinkRecord(
            slot=t, satellite_id=tr.satellite_id,
            ground_station_id=tr.ground_station_id, antenna=tr.antenna,
            data_center_id=tr.data_center_id, mb=moved,
            lq=lq, lt1=lt1, lt2=lt2, lc=lc, l_total=l_total,
            cr=cr, cc=cc, c_total=c_total, phi_s=phi_s,
        ))

    sim.q = queues.update_virtual_queue(sim.q, phi_total)

    for sat in scenario.satellites:
        amount = arrivals.arrivals_for_slot(sat.id, t)
        queues.advance_backlog(sim.states[sat.id], amount, t)

    sim.records.extend(slot_records)
    sim.q_trace.append(sim.q)
    sim.backlog_trace.append(sum(s.total_mb for s in sim.states.values()))
    sim.cost_trace.append(sum(r.c_total for r in slot_records))
    sim.phi_trace.append(phi_total)
    sim.slot += 1
    return slot_records


def run(scenario: Scenario, *, policy: str | None = None, seed: int | None = None,
        v: float | None = None, xi: float | None = None,
        table: ContactTable | None = None) -> tuple[RunRecord, RunMetrics]:
    """Execute one full simulation, with optional overrides."""
    overrides: dict[str, Any] = {}
    if policy is not None:
        overrides["policy"] = policy.lower()
        overrides["policy_params"] = dict(scenario.policy_params)
    if seed is not None:
        overrides["seed"] = seed
    if v is not None:
        overrides["v"] = v
    if xi is not None:
        overrides["xi"] = xi
    if overrides:
        scenario = replace(scenario, **overrides)
    if table is None or seed is not None:
        table = build_contact_table(scenario)

    arrays = ScenarioArrays.from_scenario(scenario)
    arrivals = ArrivalModel(scenario)
    policy_obj = make_policy(scenario)
    sim = SimState(
        slot=0,
        states={s.id: SatelliteState(s.id) for s in scenario.satellites},
        q=0.0,
    )
    for _ in range(scenario.horizon):
        step(sim, policy_obj, scenario, table, arrivals, arrays)

    total_arrivals = {
        sat.id: float(sum(arrivals.arrivals_for_slot(sat.id, t)
                          for t in range(scenario.horizon)))
        for sat in scenario.satellites
    }
    record = RunRecord(
        policy=scenario.policy,
        seed=scenario.seed,
        scenario_hash=scenario.scenario_hash(),
        records=tuple(sim.records),
        q_trace=tuple(sim.q_trace),
        backlog_trace=tuple(sim.backlog_trace),
        cost_trace=tuple(sim.cost_trace),
        phi_trace=tuple(sim.phi_trace),
        final_backlogs={sid: st.total_mb for sid, st in sim.states.items()},
        total_arrivals=total_arrivals,
    )
    metrics = accounting.aggregate_metrics(
        list(record.records), scenario.xi,
        final_backlog_mb=float(sum(record.final_backlogs.values())),
        q_trace=record.q_trace,
    )
    return record, metrics


def summary_dict(record: RunRecord, metrics: RunMetrics) -> dict[str, Any]:
    return {
        "policy": record.policy,
        "seed": record.seed,
        "total_cost": metrics.total_cost,
        "avg_latency_min_per_mb": metrics.avg_latency_min_per_mb,
        "violation_rate": metrics.violation_rate,
        "final_backlog_mb": metrics.final_backlog_mb,
        "mean_q": metrics.mean_q,
        "max_q": metrics.max_q,
    }


def write_summary_json(path: str, record: RunRecord, metrics: RunMetrics) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(summary_dict(record, metrics), fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_records_csv(path: str, record: RunRecord) -> None:
    accounting.write_run_csv(path, record.policy, list(record.records),
                             record.q_trace, record.backlog_trace)
