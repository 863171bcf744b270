"""Per-slot broker: drift-plus-penalty edge weights, bipartite matching, oracle.

Each slot builds a weighted bipartite graph with one left node per satellite
and right nodes for every real antenna plus one private virtual antenna per
satellite (weight 0, meaning "do not downlink"). A real edge's weight is

    V * cost  -  backlog * dtil  +  Q * (latency - xi * dtil)

with dtil = min(rate * tau, backlog) previewed under the candidate link, and
the data center chosen per edge to minimize the weight. The backlog * arrivals
term that would complete the per-slot bound is independent of the decision and
is dropped from every edge of a satellite, which leaves the argmin matching
unchanged. A min-cost left-perfect matching then yields the slot's assignment.

brute_force_schedule enumerates every feasible assignment on small instances
and is the test oracle for the matching path.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from skygs import accounting, hungarian
from skygs.model import Scenario
from skygs.orbit import ContactTable
from skygs.queues import SatelliteState

BRUTE_FORCE_MAX_VISIBLE = 6
BRUTE_FORCE_MAX_ANTENNAS = 6
BRUTE_FORCE_MAX_DCS = 4


class InstanceTooLargeError(ValueError):
    """brute_force_schedule refuses instances above its enumeration guard."""


@dataclass(frozen=True)
class ScenarioArrays:
    """Index maps and flat arrays for one scenario, shared by all policies.

    Satellites, stations, and data centers are ordered by id so every
    downstream tie-break is deterministic regardless of input order.
    """

    sat_ids: tuple[str, ...]
    gs_ids: tuple[str, ...]
    dc_ids: tuple[str, ...]
    sat_index: dict[str, int]
    gs_index: dict[str, int]
    dc_index: dict[str, int]
    price_slot: np.ndarray          # [n_g] $ per antenna-slot
    antenna_counts: np.ndarray      # [n_g]
    antenna_station: np.ndarray     # [n_real] station index per antenna column
    antenna_no: np.ndarray          # [n_real] antenna index within its station
    station_col0: np.ndarray        # [n_g] first antenna column of each station
    dc_price: np.ndarray            # [n_d] $ per processing-minute
    dc_kappa: np.ndarray            # [n_d] processing min per MB
    backhaul: np.ndarray            # [n_g, n_d] MB per min
    inv_backhaul: np.ndarray        # [n_g, n_d] 1 / (MB per min)
    dc_cost_per_mb: np.ndarray      # [n_d] price * kappa
    dc_lat_per_mb: np.ndarray       # [n_g, n_d] kappa + 1/backhaul
    provider_gs: tuple[str, ...]
    provider_dc: tuple[str, ...]

    @classmethod
    def from_scenario(cls, scenario: Scenario) -> "ScenarioArrays":
        sats = sorted(scenario.satellites, key=lambda s: s.id)
        stations = sorted(scenario.ground_stations, key=lambda g: g.id)
        dcs = sorted(scenario.data_centers, key=lambda d: d.id)
        n_g, n_d = len(stations), len(dcs)
        price_slot = np.array([g.price_per_slot for g in stations], dtype=float)
        counts = np.array([g.antennas for g in stations], dtype=np.int64)
        ant_station = np.repeat(np.arange(n_g), counts) if n_g else np.empty(0, np.int64)
        ant_no = (np.concatenate([np.arange(c) for c in counts]) if n_g
                  else np.empty(0, np.int64))
        col0 = np.concatenate([[0], np.cumsum(counts)[:-1]]) if n_g else np.empty(0, np.int64)
        dc_price = np.array([d.price_per_min for d in dcs], dtype=float)
        dc_kappa = np.array([d.intensity_min_per_mb for d in dcs], dtype=float)
        backhaul = np.array([[g.backhaul_mb_per_min[d.id] for d in dcs] for g in stations],
                            dtype=float) if n_g and n_d else np.zeros((n_g, n_d))
        inv_backhaul = np.where(backhaul > 0, 1.0 / np.where(backhaul > 0, backhaul, 1.0), np.inf)
        return cls(
            sat_ids=tuple(s.id for s in sats),
            gs_ids=tuple(g.id for g in stations),
            dc_ids=tuple(d.id for d in dcs),
            sat_index={s.id: i for i, s in enumerate(sats)},
            gs_index={g.id: i for i, g in enumerate(stations)},
            dc_index={d.id: i for i, d in enumerate(dcs)},
            price_slot=price_slot,
            antenna_counts=counts,
            antenna_station=ant_station.astype(np.int64),
            antenna_no=ant_no.astype(np.int64),
            station_col0=col0.astype(np.int64),
            dc_price=dc_price,
            dc_kappa=dc_kappa,
            backhaul=backhaul,
            inv_backhaul=inv_backhaul,
            dc_cost_per_mb=dc_price * dc_kappa,
            dc_lat_per_mb=dc_kappa[None, :] + inv_backhaul,
            provider_gs=tuple(g.provider for g in stations),
            provider_dc=tuple(d.provider for d in dcs),
        )

    @property
    def n_real_antennas(self) -> int:
        return len(self.antenna_station)

    def best_dc_per_station(self, v: float, q: float) -> np.ndarray:
        """Weight-minimizing data center per station; ties go to the lowest id."""
        coef = v * self.dc_cost_per_mb[None, :] + q * self.dc_lat_per_mb
        return np.argmin(coef, axis=1)


@dataclass(frozen=True)
class EdgeCandidate:
    satellite_id: str
    ground_station_id: str
    data_center_id: str
    weight: float
    dtil_mb: float
    lq: float
    lt1: float
    lt2: float
    lc: float
    cost_rental: float
    cost_compute: float
    phi_s: float


@dataclass(frozen=True)
class AssignmentTriple:
    satellite_id: str
    ground_station_id: str
    antenna: int
    data_center_id: str
    dtil_mb: float


@dataclass(frozen=True)
class Assignment:
    slot: int
    triples: tuple[AssignmentTriple, ...]
    unassigned: tuple[str, ...] = ()


@dataclass
class SlotGraph:
    slot: int
    arrays: ScenarioArrays
    weights: np.ndarray                   # [n_s, n_real + n_s]
    candidates: dict[tuple[int, int], EdgeCandidate] = field(default_factory=dict)

    @property
    def n_real(self) -> int:
        return self.arrays.n_real_antennas


def _queue_prefixes(state: SatelliteState, slot: int, tau: float):
    """Cumulative sizes and age-weighted sizes over the FIFO backlog."""
    n = len(state.chunks)
    sizes = np.empty(n)
    agew = np.empty(n)
    for k, chunk in enumerate(state.chunks):
        sizes[k] = chunk.size_mb
        agew[k] = chunk.size_mb * (slot - chunk.arrival_slot) * tau
    return np.cumsum(sizes), np.cumsum(agew)


def _lq_preview(cum_sizes, cum_agew, dtil, slot, tau, state):
    """Queuing latency of the oldest `dtil` MB, vectorized over dtil."""
    dtil = np.asarray(dtil, dtype=float)
    if cum_sizes.size == 0:
        return np.zeros_like(dtil)
    k = np.searchsorted(cum_sizes, dtil, side="left")
    k = np.minimum(k, cum_sizes.size - 1)
    prev = np.where(k > 0, cum_sizes[np.maximum(k - 1, 0)], 0.0)
    prev_agew = np.where(k > 0, cum_agew[np.maximum(k - 1, 0)], 0.0)
    ages = np.array([(slot - c.arrival_slot) * tau for c in state.chunks])
    return prev_agew + (dtil - prev) * ages[k]


def edge_weight(state: SatelliteState, station_id: str, slot: int, q: float,
                scenario: Scenario, table: ContactTable,
                arrays: ScenarioArrays | None = None) -> EdgeCandidate:
    """Weight of the (satellite, station) edge with its best data center."""
    arrays = arrays or ScenarioArrays.from_scenario(scenario)
    rate = table.rate(slot, state.satellite_id, station_id)
    if rate is None:
        raise ValueError(
            f"no contact between {state.satellite_id!r} and {station_id!r} at slot {slot}")
    gi = arrays.gs_index[station_id]
    v, xi, tau = scenario.v, scenario.xi, scenario.tau
    backlog = state.total_mb
    dtil = min(rate * tau, backlog)

    coef = v * arrays.dc_cost_per_mb + q * arrays.dc_lat_per_mb[gi]
    di = int(np.argmin(coef))

    cum_sizes, cum_agew = _queue_prefixes(state, slot, tau)
    lq = float(_lq_preview(cum_sizes, cum_agew, dtil, slot, tau, state)) if dtil > 0 else 0.0
    lt1 = dtil / rate
    lt2 = dtil * arrays.inv_backhaul[gi, di]
    lc = arrays.dc_kappa[di] * dtil
    l_total = lq + lt1 + lt2 + lc
    cr, cc, c_total = accounting.costs(dtil, arrays.price_slot[gi],
                                       arrays.dc_price[di], arrays.dc_kappa[di])
    phi = accounting.excess_latency(l_total, dtil, xi)
    weight = v * c_total - backlog * dtil + q * phi
    return EdgeCandidate(
        satellite_id=state.satellite_id,
        ground_station_id=station_id,
        data_center_id=arrays.dc_ids[di],
        weight=weight,
        dtil_mb=dtil,
        lq=lq, lt1=lt1, lt2=lt2, lc=lc,
        cost_rental=cr, cost_compute=cc,
        phi_s=phi,
    )


def build_bipartite(states: dict[str, SatelliteState], q: float, slot: int,
                    scenario: Scenario, table: ContactTable,
                    arrays: ScenarioArrays | None = None) -> SlotGraph:
    """Weight matrix over satellites x (real antennas + private virtuals).

    Pairs without a contact carry a large finite penalty so the matcher never
    uses them; each satellite's private virtual column carries weight zero.
    """
    arrays = arrays or ScenarioArrays.from_scenario(scenario)
    n_s = len(arrays.sat_ids)
    n_real = arrays.n_real_antennas
    v, xi, tau = scenario.v, scenario.xi, scenario.tau

    contacts = table.contacts_at(slot)
    candidates: dict[tuple[int, int], EdgeCandidate] = {}
    rows: list[tuple[int, int, float]] = []  # (sat pos, station pos, weight)
    if contacts:
        best_dc = arrays.best_dc_per_station(v, q)
        by_sat: dict[str, list] = {}
        for c in contacts:
            by_sat.setdefault(c.satellite_id, []).append(c)
        for sat_id, sat_contacts in by_sat.items():
            state = states[sat_id]
            si = arrays.sat_index[sat_id]
            backlog = state.total_mb
            gi = np.array([arrays.gs_index[c.ground_station_id] for c in sat_contacts])
            rate = np.array([c.rate_mb_per_min for c in sat_contacts])
            dtil = np.minimum(rate * tau, backlog)
            cum_sizes, cum_agew = _queue_prefixes(state, slot, tau)
            lq = _lq_preview(cum_sizes, cum_agew, dtil, slot, tau, state)
            di = best_dc[gi]
            lt1 = dtil / rate
            lt2 = dtil * arrays.inv_backhaul[gi, di]
            lc = arrays.dc_kappa[di] * dtil
            l_total = lq + lt1 + lt2 + lc
            cc = arrays.dc_cost_per_mb[di] * dtil
            c_total = arrays.price_slot[gi] + cc
            phi = l_total - xi * dtil
            weight = v * c_total - backlog * dtil + q * phi
            for k in range(len(sat_contacts)):
                g_pos = int(gi[k])
                rows.append((si, g_pos, float(weight[k])))
                candidates[(si, g_pos)] = EdgeCandidate(
                    satellite_id=sat_id,
                    ground_station_id=arrays.gs_ids[g_pos],
                    data_center_id=arrays.dc_ids[int(di[k])],
                    weight=float(weight[k]),
                    dtil_mb=float(dtil[k]),
                    lq=float(lq[k]), lt1=float(lt1[k]), lt2=float(lt2[k]), lc=float(lc[k]),
                    cost_rental=float(arrays.price_slot[g_pos]),
                    cost_compute=float(cc[k]),
                    phi_s=float(phi[k]),
                )

    big = 4.0 * (1.0 + sum(abs(w) for _, _, w in rows))
    weights = np.full((n_s, n_real + n_s), big)
    for i in range(n_s):
        weights[i, n_real + i] = 0.0
    for si, g_pos, w in rows:
        c0 = arrays.station_col0[g_pos]
        weights[si, c0:c0 + arrays.antenna_counts[g_pos]] = w
    return SlotGraph(slot=slot, arrays=arrays, weights=weights, candidates=candidates)


def hungarian_min_matching(graph: SlotGraph) -> tuple[Assignment, float]:
    """Minimum-weight left-perfect matching on the slot graph."""
    arrays = graph.arrays
    n_real = graph.n_real
    col4row = hungarian.min_cost_assignment(graph.weights)
    triples: list[AssignmentTriple] = []
    unassigned: list[str] = []
    objective = 0.0
    for si, col in enumerate(col4row.tolist()):
        if col >= n_real:
            if col - n_real != si:
                raise RuntimeError("matching used another satellite's virtual antenna")
            unassigned.append(arrays.sat_ids[si])
            continue
        g_pos = int(arrays.antenna_station[col])
        cand = graph.candidates.get((si, g_pos))
        if cand is None:
            raise RuntimeError("matching used a non-contact edge")
        objective += cand.weight
        triples.append(AssignmentTriple(
            satellite_id=arrays.sat_ids[si],
            ground_station_id=arrays.gs_ids[g_pos],
            antenna=int(arrays.antenna_no[col]),
            data_center_id=cand.data_center_id,
            dtil_mb=cand.dtil_mb,
        ))
    triples.sort(key=lambda tr: tr.satellite_id)
    return (Assignment(slot=graph.slot, triples=tuple(triples), unassigned=tuple(sorted(unassigned))),
            objective)


def schedule_slot(states: dict[str, SatelliteState], q: float, slot: int,
                  scenario: Scenario, table: ContactTable,
                  arrays: ScenarioArrays | None = None,
                  return_objective: bool = False):
    """One slot of the drift-plus-penalty policy."""
    graph = build_bipartite(states, q, slot, scenario, table, arrays)
    assignment, objective = hungarian_min_matching(graph)
    if return_objective:
        return assignment, objective
    return assignment


def dump_weight_matrix(graph: SlotGraph, path: str) -> None:
    """Debug CSV of the slot's weight matrix (satellites x antenna columns)."""
    import csv

    arrays = graph.arrays
    cols = [f"{arrays.gs_ids[arrays.antenna_station[c]]}#{arrays.antenna_no[c]}"
            for c in range(graph.n_real)]
    cols += [f"virtual:{sid}" for sid in arrays.sat_ids]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["satellite"] + cols)
        for si, sid in enumerate(arrays.sat_ids):
            writer.writerow([sid] + [repr(float(w)) for w in graph.weights[si]])


# ---------------------------------------------------------------------------
# independent feasibility validator


def check_assignment(assignment: Assignment, scenario: Scenario,
                     table: ContactTable) -> list[str]:
    """Violations of the per-slot constraints; empty when feasible.

    Checks: at most one (station, data center) per satellite; only stations
    within view; per-station use bounded by its antenna count; antenna and
    data-center references valid and antennas not double-booked.
    """
    violations: list[str] = []
    slot = assignment.slot
    sat_ids = {s.id for s in scenario.satellites}
    stations = {g.id: g for g in scenario.ground_stations}
    dc_ids = {d.id for d in scenario.data_centers}

    seen_sats: set[str] = set()
    used_antennas: set[tuple[str, int]] = set()
    per_station: dict[str, int] = {}
    for tr in assignment.triples:
        if tr.satellite_id not in sat_ids:
            violations.append(f"unknown satellite {tr.satellite_id!r}")
            continue
        if tr.satellite_id in seen_sats:
            violations.append(
                f"constraint(single-selection): satellite {tr.satellite_id!r} assigned twice")
        seen_sats.add(tr.satellite_id)
        gs = stations.get(tr.ground_station_id)
        if gs is None:
            violations.append(f"unknown ground station {tr.ground_station_id!r}")
            continue
        if tr.data_center_id not in dc_ids:
            violations.append(f"unknown data center {tr.data_center_id!r}")
        if table.rate(slot, tr.satellite_id, tr.ground_station_id) is None:
            violations.append(
                f"constraint(visibility): satellite {tr.satellite_id!r} cannot see "
                f"station {tr.ground_station_id!r} at slot {slot}")
        if not 0 <= tr.antenna < gs.antennas:
            violations.append(
                f"constraint(antenna-count): station {tr.ground_station_id!r} has no "
                f"antenna {tr.antenna}")
        key = (tr.ground_station_id, tr.antenna)
        if key in used_antennas:
            violations.append(
                f"constraint(antenna-count): antenna {key} double-booked")
        used_antennas.add(key)
        per_station[tr.ground_station_id] = per_station.get(tr.ground_station_id, 0) + 1
    for gs_id, n_used in per_station.items():
        if gs_id in stations and n_used > stations[gs_id].antennas:
            violations.append(
                f"constraint(antenna-count): station {gs_id!r} used {n_used} times, "
                f"has {stations[gs_id].antennas} antennas")
    return violations


# ---------------------------------------------------------------------------
# brute-force oracle


def _triple_contribution(state: SatelliteState, rate: float, gi: int, di: int,
                         slot: int, q: float, scenario: Scenario,
                         arrays: ScenarioArrays) -> float:
    """Objective contribution of one assigned satellite, evaluated directly."""
    backlog = state.total_mb
    dtil = min(rate * scenario.tau, backlog)
    lq = 0.0
    remaining = dtil
    for chunk in state.chunks:
        take = min(chunk.size_mb, remaining)
        lq += take * (slot - chunk.arrival_slot) * scenario.tau
        remaining -= take
        if remaining <= 0:
            break
    latency = (lq + dtil / rate + dtil * arrays.inv_backhaul[gi, di]
               + arrays.dc_kappa[di] * dtil)
    cost = arrays.price_slot[gi] + arrays.dc_price[di] * arrays.dc_kappa[di] * dtil
    phi = latency - scenario.xi * dtil
    return scenario.v * cost - backlog * dtil + q * phi


def brute_force_schedule(states: dict[str, SatelliteState], q: float, slot: int,
                         scenario: Scenario, table: ContactTable) -> tuple[Assignment, float]:
    """Exhaustive minimizer over all feasible assignments (test oracle only)."""
    arrays = ScenarioArrays.from_scenario(scenario)
    visible = table.visible_satellites(slot)
    n_real = arrays.n_real_antennas
    if len(visible) > BRUTE_FORCE_MAX_VISIBLE:
        raise InstanceTooLargeError(f"{len(visible)} visible satellites > "
                                    f"{BRUTE_FORCE_MAX_VISIBLE}")
    if n_real > BRUTE_FORCE_MAX_ANTENNAS:
        raise InstanceTooLargeError(f"{n_real} antennas > {BRUTE_FORCE_MAX_ANTENNAS}")
    if len(arrays.dc_ids) > BRUTE_FORCE_MAX_DCS:
        raise InstanceTooLargeError(f"{len(arrays.dc_ids)} data centers > "
                                    f"{BRUTE_FORCE_MAX_DCS}")

    options: dict[str, list[tuple[int, int, float]]] = {}  # sat -> [(ant col, dc pos, rate)]
    for sat_id in visible:
        opts = []
        for gs_id in table.stations_for(slot, sat_id):
            g_pos = arrays.gs_index[gs_id]
            rate = table.rate(slot, sat_id, gs_id)
            c0 = int(arrays.station_col0[g_pos])
            for a in range(int(arrays.antenna_counts[g_pos])):
                for d_pos in range(len(arrays.dc_ids)):
                    opts.append((c0 + a, d_pos, rate))
        options[sat_id] = opts

    best_obj = np.inf
    best_choice: dict[str, tuple[int, int, float]] = {}
    order = list(visible)

    def recurse(idx: int, used: set[int], obj: float, choice: dict):
        nonlocal best_obj, best_choice
        if idx == len(order):
            if obj < best_obj:
                best_obj = obj
                best_choice = dict(choice)
            return
        sat_id = order[idx]
        recurse(idx + 1, used, obj, choice)  # virtual: contributes 0
        state = states[sat_id]
        for ant_col, d_pos, rate in options[sat_id]:
            if ant_col in used:
                continue
            gi = int(arrays.antenna_station[ant_col])
            contrib = _triple_contribution(state, rate, gi, d_pos, slot, q, scenario, arrays)
            used.add(ant_col)
            choice[sat_id] = (ant_col, d_pos, rate)
            recurse(idx + 1, used, obj + contrib, choice)
            used.discard(ant_col)
            del choice[sat_id]

    recurse(0, set(), 0.0, {})

    triples = []
    for sat_id, (ant_col, d_pos, rate) in sorted(best_choice.items()):
        gi = int(arrays.antenna_station[ant_col])
        dtil = min(rate * scenario.tau, states[sat_id].total_mb)
        triples.append(AssignmentTriple(
            satellite_id=sat_id,
            ground_station_id=arrays.gs_ids[gi],
            antenna=int(arrays.antenna_no[ant_col]),
            data_center_id=arrays.dc_ids[d_pos],
            dtil_mb=dtil,
        ))
    unassigned = tuple(sorted(set(arrays.sat_ids) - {tr.satellite_id for tr in triples}))
    return Assignment(slot=slot, triples=tuple(triples), unassigned=unassigned), float(best_obj)
