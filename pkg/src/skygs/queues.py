"""Onboard backlog dynamics and the latency virtual queue.

Backlogs are FIFO sequences of chunks, each chunk aggregating the data that
arrived in one slot. Aggregation is exact for latency accounting because every
MB in a chunk shares the same arrival slot; splitting a chunk on a partial
downlink keeps the remainder at the head with its original arrival slot.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from skygs import rng
from skygs.model import Satellite, Scenario

MINUTES_PER_DAY = 1440.0


@dataclass(frozen=True)
class DataChunk:
    arrival_slot: int
    size_mb: float


class SatelliteState:
    """FIFO backlog for one satellite."""

    def __init__(self, satellite_id: str):
        self.satellite_id = satellite_id
        self.chunks: deque[DataChunk] = deque()
        self.total_mb = 0.0

    def __repr__(self) -> str:
        return f"SatelliteState({self.satellite_id!r}, total={self.total_mb:.1f} MB)"

    def oldest_arrival_slot(self) -> int | None:
        return self.chunks[0].arrival_slot if self.chunks else None


def downlink_capacity(rate_mb_per_min: float, tau: float) -> float:
    """Maximum MB movable over one slot at the given link rate."""
    if rate_mb_per_min <= 0 or tau <= 0:
        raise ValueError("downlink_capacity needs positive rate and tau")
    return rate_mb_per_min * tau


def actual_downlink(state: SatelliteState, capacity_mb: float) -> tuple[float, list[DataChunk]]:
    """Pop min(capacity, backlog) from the FIFO head.

    Returns the amount moved and the popped chunks (with their arrival slots,
    for latency accounting). A partially-consumed chunk is split; the
    remainder stays at the head.
    """
    if capacity_mb < 0:
        raise ValueError("capacity must be >= 0")
    moved = 0.0
    popped: list[DataChunk] = []
    remaining = min(capacity_mb, state.total_mb)
    while remaining > 0 and state.chunks:
        head = state.chunks[0]
        if head.size_mb <= remaining:
            state.chunks.popleft()
            popped.append(head)
            moved += head.size_mb
            remaining -= head.size_mb
        else:
            popped.append(DataChunk(head.arrival_slot, remaining))
            state.chunks[0] = DataChunk(head.arrival_slot, head.size_mb - remaining)
            moved += remaining
            remaining = 0.0
    state.total_mb = max(state.total_mb - moved, 0.0)
    if not state.chunks:
        state.total_mb = 0.0
    return moved, popped


def advance_backlog(state: SatelliteState, arrivals_mb: float, slot: int) -> None:
    """Append this slot's arrivals after the downlink step."""
    if arrivals_mb < 0:
        raise ValueError("arrivals must be >= 0")
    if arrivals_mb > 0:
        state.chunks.append(DataChunk(slot, arrivals_mb))
        state.total_mb += arrivals_mb


def update_virtual_queue(q: float, phi: float) -> float:
    """Q(t+1) = max(Q(t) + phi(t), 0)."""
    if q < 0:
        raise ValueError("virtual queue must be >= 0")
    return max(q + phi, 0.0)


class ArrivalModel:
    """Deterministic per-run arrival process.

    Each satellite draws its daily volume once from its configured range, and
    collects during "on" slots of a duty-cycle mask; both derive from the
    master seed, so arrivals are identical across policies on the same seed.
    On slots carry daily_volume / (1440 * duty_cycle) MB, off slots zero.
    """

    def __init__(self, scenario: Scenario, seed: int | None = None):
        seed = scenario.seed if seed is None else seed
        self._per_slot: dict[str, float] = {}
        self._mask: dict[str, np.ndarray] = {}
        self.daily_volume_mb: dict[str, float] = {}
        for si, sat in enumerate(scenario.satellites):
            lo, hi = sat.daily_volume_mb
            volume = float(rng.uniform(seed, rng.TAG_DAILY_VOLUME, (si,), 1, lo, hi)[0])
            self.daily_volume_mb[sat.id] = volume
            self._per_slot[sat.id] = volume * scenario.tau / (MINUTES_PER_DAY * sat.duty_cycle)
            if sat.duty_cycle >= 1.0:
                mask = np.ones(scenario.horizon, dtype=bool)
            else:
                draws = rng.uniform(seed, rng.TAG_ARRIVAL_MASK, (si,), scenario.horizon, 0.0, 1.0)
                mask = draws < sat.duty_cycle
            self._mask[sat.id] = mask

    def arrivals_for_slot(self, satellite_id: str, slot: int) -> float:
        if self._mask[satellite_id][slot]:
            return self._per_slot[satellite_id]
        return 0.0


def arrivals_for_slot(satellite: Satellite, slot: int, model: ArrivalModel) -> float:
    """Arrival MB for one satellite-slot under a run's arrival model."""
    return model.arrivals_for_slot(satellite.id, slot)
