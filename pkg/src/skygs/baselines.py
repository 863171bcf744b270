"""Comparison policies behind the same per-slot interface as the broker.

SG restricts the greedy broker to a single provider's stations and data
centers; BG greedily downlinks whatever is backlogged via the cheapest pair
per MB; BR picks uniformly at random; BWG adds withholding until a full slot
of link capacity can be used; ILP-HPQ downlinks only satellites whose oldest
data approaches the latency threshold, via a forced min-cost matching.
None of the baselines rents an antenna for an empty downlink.
"""

from __future__ import annotations

from enum import Enum

import numpy as np

from skygs import rng
from skygs.model import Scenario, ScenarioError
from skygs.orbit import ContactTable
from skygs.queues import SatelliteState
from skygs.scheduler import (Assignment, AssignmentTriple, ScenarioArrays,
                             schedule_slot)


class PolicyKind(str, Enum):
    SKYGS = "skygs"
    SG = "sg"
    BG = "bg"
    BR = "br"
    BWG = "bwg"
    ILP_HPQ = "ilp_hpq"


def _best_dc_by_cost(arrays: ScenarioArrays, dc_positions: list[int]) -> int:
    """Cheapest data center per MB among the allowed ones; ties to lowest id."""
    best = dc_positions[0]
    for d in dc_positions[1:]:
        if arrays.dc_cost_per_mb[d] < arrays.dc_cost_per_mb[best]:
            best = d
    return best


class _GreedyCore:
    """Shared machinery for SG/BG/BWG: cost-effective pair selection.

    Satellites with data are served in descending backlog order; each takes
    the free antenna and data center minimizing the configured metric
    (cost per MB by default), tie-broken by lowest ids.
    """

    def __init__(self, scenario: Scenario, *, providers: set[str] | None = None,
                 require_full_slot: bool = False):
        self.arrays = ScenarioArrays.from_scenario(scenario)
        self.scenario = scenario
        self.require_full_slot = require_full_slot
        self.metric = scenario.policy_params.get("metric", "cost_per_mb")
        if self.metric not in ("cost_per_mb", "cost"):
            raise ScenarioError(f"unknown greedy metric {self.metric!r}")
        if providers is None:
            self.gs_allowed = set(range(len(self.arrays.gs_ids)))
            dc_positions = list(range(len(self.arrays.dc_ids)))
        else:
            self.gs_allowed = {i for i, p in enumerate(self.arrays.provider_gs)
                               if p in providers}
            dc_positions = [i for i, p in enumerate(self.arrays.provider_dc)
                            if p in providers]
        if not dc_positions:
            raise ScenarioError(f"providers {sorted(providers or set())} own no data centers")
        self.best_dc = _best_dc_by_cost(self.arrays, dc_positions)

    def schedule(self, states: dict[str, SatelliteState], q: float, slot: int,
                 table: ContactTable) -> Assignment:
        arrays = self.arrays
        tau = self.scenario.tau
        free: dict[int, list[int]] = {}
        for g_pos in range(len(arrays.gs_ids)):
            free[g_pos] = list(range(int(arrays.antenna_counts[g_pos])))
        ordered = sorted((s for s in states.values() if s.total_mb > 0),
                         key=lambda s: (-s.total_mb, s.satellite_id))
        triples: list[AssignmentTriple] = []
        for state in ordered:
            best = None  # (metric, gs_id, g_pos, dtil)
            for gs_id in table.stations_for(slot, state.satellite_id):
                g_pos = arrays.gs_index[gs_id]
                if g_pos not in self.gs_allowed or not free[g_pos]:
                    continue
                rate = table.rate(slot, state.satellite_id, gs_id)
                capacity = rate * tau
                if self.require_full_slot and state.total_mb < capacity:
                    continue
                dtil = min(capacity, state.total_mb)
                cost = (arrays.price_slot[g_pos]
                        + arrays.dc_cost_per_mb[self.best_dc] * dtil)
                value = cost / dtil if self.metric == "cost_per_mb" else cost
                key = (value, gs_id)
                if best is None or key < (best[0], best[1]):
                    best = (value, gs_id, g_pos, dtil)
            if best is None:
                continue
            _, gs_id, g_pos, dtil = best
            antenna = free[g_pos].pop(0)
            triples.append(AssignmentTriple(
                satellite_id=state.satellite_id,
                ground_station_id=gs_id,
                antenna=antenna,
                data_center_id=arrays.dc_ids[self.best_dc],
                dtil_mb=dtil,
            ))
        triples.sort(key=lambda tr: tr.satellite_id)
        assigned = {tr.satellite_id for tr in triples}
        unassigned = tuple(sorted(set(arrays.sat_ids) - assigned))
        return Assignment(slot=slot, triples=tuple(triples), unassigned=unassigned)


class BGPolicy:
    name = "bg"

    def __init__(self, scenario: Scenario):
        self._core = _GreedyCore(scenario)

    def schedule(self, states, q, slot, table):
        return self._core.schedule(states, q, slot, table)


class BWGPolicy:
    name = "bwg"

    def __init__(self, scenario: Scenario):
        self._core = _GreedyCore(scenario, require_full_slot=True)

    def schedule(self, states, q, slot, table):
        return self._core.schedule(states, q, slot, table)


class SGPolicy:
    name = "sg"

    def __init__(self, scenario: Scenario):
        provider = scenario.policy_params.get("provider")
        if provider is None:
            providers = sorted({g.provider for g in scenario.ground_stations})
            if not providers:
                raise ScenarioError("sg policy: scenario has no ground stations")
            provider = providers[0]
        owned = [g for g in scenario.ground_stations if g.provider == provider]
        if not owned:
            raise ScenarioError(f"sg policy: provider {provider!r} owns no ground stations")
        self.provider = provider
        self._core = _GreedyCore(scenario, providers={provider})

    def schedule(self, states, q, slot, table):
        return self._core.schedule(states, q, slot, table)


class BRPolicy:
    name = "br"

    def __init__(self, scenario: Scenario):
        self.arrays = ScenarioArrays.from_scenario(scenario)
        self.scenario = scenario

    def schedule(self, states, q, slot, table):
        arrays = self.arrays
        tau = self.scenario.tau
        gen = rng.stream(self.scenario.seed, rng.TAG_BR_POLICY, slot)
        eligible = sorted(s.satellite_id for s in states.values() if s.total_mb > 0)
        order = [eligible[i] for i in gen.permutation(len(eligible))]
        free: dict[int, list[int]] = {
            g_pos: list(range(int(arrays.antenna_counts[g_pos])))
            for g_pos in range(len(arrays.gs_ids))
        }
        triples: list[AssignmentTriple] = []
        for sat_id in order:
            choices = []  # one entry per free compatible antenna
            for gs_id in table.stations_for(slot, sat_id):
                g_pos = arrays.gs_index[gs_id]
                for antenna in free[g_pos]:
                    choices.append((gs_id, g_pos, antenna))
            if not choices:
                continue
            gs_id, g_pos, antenna = choices[int(gen.integers(len(choices)))]
            free[g_pos].remove(antenna)
            d_pos = int(gen.integers(len(arrays.dc_ids)))
            rate = table.rate(slot, sat_id, gs_id)
            dtil = min(rate * tau, states[sat_id].total_mb)
            triples.append(AssignmentTriple(
                satellite_id=sat_id,
                ground_station_id=gs_id,
                antenna=antenna,
                data_center_id=arrays.dc_ids[d_pos],
                dtil_mb=dtil,
            ))
        triples.sort(key=lambda tr: tr.satellite_id)
        assigned = {tr.satellite_id for tr in triples}
        unassigned = tuple(sorted(set(arrays.sat_ids) - assigned))
        return Assignment(slot=slot, triples=tuple(triples), unassigned=unassigned)


class IlpHpqPolicy:
    """Per-slot cost minimizer with a forced high-priority downlink queue.

    A satellite whose oldest backlogged data has waited at least rho * xi
    minutes becomes high priority: its do-nothing option is priced above any
    achievable real cost, so the min-cost matching downlinks it whenever an
    antenna is in view. The per-slot feasible region is an assignment
    polytope, so matching solves the slot problem exactly without an external
    programming solver.
    """

    name = "ilp_hpq"

    def __init__(self, scenario: Scenario):
        self.arrays = ScenarioArrays.from_scenario(scenario)
        self.scenario = scenario
        self.rho = float(scenario.policy_params.get("rho", 0.8))
        if not 0 < self.rho <= 1:
            raise ScenarioError("ilp_hpq policy: rho must be in (0, 1]")
        self.best_dc = _best_dc_by_cost(self.arrays, list(range(len(self.arrays.dc_ids))))

    def schedule(self, states, q, slot, table):
        from skygs import hungarian

        arrays = self.arrays
        scenario = self.scenario
        n_s = len(arrays.sat_ids)
        n_real = arrays.n_real_antennas
        tau, xi = scenario.tau, scenario.xi

        high_priority = np.zeros(n_s, dtype=bool)
        for si, sat_id in enumerate(arrays.sat_ids):
            oldest = states[sat_id].oldest_arrival_slot()
            if oldest is not None and (slot - oldest) * tau >= self.rho * xi:
                high_priority[si] = True

        entries = []  # (si, g_pos, cost, dtil)
        for c in table.contacts_at(slot):
            si = arrays.sat_index[c.satellite_id]
            state = states[c.satellite_id]
            if state.total_mb <= 0:
                continue
            g_pos = arrays.gs_index[c.ground_station_id]
            dtil = min(c.rate_mb_per_min * tau, state.total_mb)
            cost = float(arrays.price_slot[g_pos]
                         + arrays.dc_cost_per_mb[self.best_dc] * dtil)
            entries.append((si, g_pos, cost, dtil))

        m_forced = sum(abs(cost) for _, _, cost, _ in entries) + 1.0
        big = 4.0 * (m_forced + 1.0)
        weights = np.full((n_s, n_real + n_s), big)
        for si in range(n_s):
            weights[si, n_real + si] = m_forced if high_priority[si] else 0.0
        info: dict[tuple[int, int], tuple[float, float]] = {}
        for si, g_pos, cost, dtil in entries:
            c0 = arrays.station_col0[g_pos]
            weights[si, c0:c0 + arrays.antenna_counts[g_pos]] = cost
            info[(si, g_pos)] = (cost, dtil)

        col4row = hungarian.min_cost_assignment(weights)
        triples = []
        for si, col in enumerate(col4row.tolist()):
            if col >= n_real:
                continue
            g_pos = int(arrays.antenna_station[col])
            if (si, g_pos) not in info:
                continue  # matcher can only land here if no feasible option existed
            _, dtil = info[(si, g_pos)]
            triples.append(AssignmentTriple(
                satellite_id=arrays.sat_ids[si],
                ground_station_id=arrays.gs_ids[g_pos],
                antenna=int(arrays.antenna_no[col]),
                data_center_id=arrays.dc_ids[self.best_dc],
                dtil_mb=dtil,
            ))
        triples.sort(key=lambda tr: tr.satellite_id)
        assigned = {tr.satellite_id for tr in triples}
        unassigned = tuple(sorted(set(arrays.sat_ids) - assigned))
        return Assignment(slot=slot, triples=tuple(triples), unassigned=unassigned)


class SkyGSPolicy:
    name = "skygs"

    def __init__(self, scenario: Scenario):
        self.arrays = ScenarioArrays.from_scenario(scenario)
        self.scenario = scenario

    def schedule(self, states, q, slot, table):
        return schedule_slot(states, q, slot, self.scenario, table, arrays=self.arrays)


_POLICY_CLASSES = {
    PolicyKind.SKYGS: SkyGSPolicy,
    PolicyKind.SG: SGPolicy,
    PolicyKind.BG: BGPolicy,
    PolicyKind.BR: BRPolicy,
    PolicyKind.BWG: BWGPolicy,
    PolicyKind.ILP_HPQ: IlpHpqPolicy,
}


def make_policy(scenario: Scenario):
    """Instantiate the policy the scenario selects (validating its params)."""
    if scenario.satellites and not scenario.data_centers:
        raise ScenarioError("scheduling requires at least one data center")
    kind = PolicyKind(scenario.policy)
    return _POLICY_CLASSES[kind](scenario)
