"""Per-slot visibility and link rates.

Two sources: an analytic circular-orbit propagator (period from the orbit
altitude, sub-satellite track over a rotating spherical Earth) or an external
contact-plan CSV. Either way the result is an immutable ContactTable holding,
for every slot, which satellites see which stations and at what link rate.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from skygs import rng
from skygs.model import Scenario

EARTH_RADIUS_KM = 6371.0
MU_KM3_S2 = 398600.4418
EARTH_ROT_DEG_PER_MIN = 360.0 / 1436.0

CONTACT_PLAN_HEADER = ["slot", "satellite_id", "ground_station_id", "elevation_deg",
                       "rate_mb_per_min"]


class ContactPlanError(ValueError):
    """A contact-plan file failed to parse or validate."""


def orbital_period_minutes(altitude_km: float) -> float:
    """Circular-orbit period from the semi-major axis (Earth radius + altitude)."""
    a_m = (EARTH_RADIUS_KM + altitude_km) * 1e3
    return 2.0 * math.pi * math.sqrt(a_m ** 3 / (MU_KM3_S2 * 1e9)) / 60.0


def subsatellite_point(satellite, t_minutes, *, rotate_earth: bool = True):
    """Geodetic sub-satellite point(s) at the given elapsed time(s) in minutes.

    Accepts a scalar or an ndarray of times; returns (lat_deg, lon_deg) with
    longitudes normalized to [-180, 180).
    """
    t = np.asarray(t_minutes, dtype=float)
    period = orbital_period_minutes(satellite.altitude_km)
    u = np.radians(satellite.phase_deg + 360.0 * t / period)  # argument of latitude
    inc = math.radians(satellite.inclination_deg)
    lat = np.degrees(np.arcsin(np.sin(inc) * np.sin(u)))
    lon_inertial = satellite.raan_deg + np.degrees(np.arctan2(math.cos(inc) * np.sin(u), np.cos(u)))
    lon = lon_inertial - (EARTH_ROT_DEG_PER_MIN * t if rotate_earth else 0.0)
    lon = (lon + 180.0) % 360.0 - 180.0
    if np.ndim(t_minutes) == 0:
        return float(lat), float(lon)
    return lat, lon


def propagate(satellite, slot: int, tau: float, *, rotate_earth: bool = True):
    """Sub-satellite point at the slot midpoint."""
    return subsatellite_point(satellite, (slot + 0.5) * tau, rotate_earth=rotate_earth)


def elevation_deg(sub_lat, sub_lon, altitude_km, station_lat, station_lon):
    """Elevation of the satellite above the station's local horizon (spherical Earth).

    Negative when the satellite is below the horizon. Vectorizes over the
    sub-satellite point arguments.
    """
    lat1 = np.radians(np.asarray(sub_lat, dtype=float))
    lon1 = np.radians(np.asarray(sub_lon, dtype=float))
    lat2 = math.radians(station_lat)
    lon2 = math.radians(station_lon)
    cos_gamma = np.clip(
        np.sin(lat1) * math.sin(lat2) + np.cos(lat1) * math.cos(lat2) * np.cos(lon1 - lon2),
        -1.0, 1.0)
    sin_gamma = np.sqrt(1.0 - cos_gamma ** 2)
    k = EARTH_RADIUS_KM / (EARTH_RADIUS_KM + altitude_km)
    el = np.degrees(np.arctan2(cos_gamma - k, sin_gamma))
    if np.ndim(sub_lat) == 0 and np.ndim(sub_lon) == 0:
        return float(el)
    return el


def gsl_rate(elevation: float, noise_factor: float, r_max: float) -> float:
    """Ground-satellite link rate in MB/min: r_max * sin(elevation) * noise.

    Callers must only ask for rates above the elevation mask; a non-positive
    elevation is a caller bug.
    """
    if elevation <= 0:
        raise ValueError(f"gsl_rate called below the horizon (elevation {elevation})")
    return r_max * math.sin(math.radians(elevation)) * noise_factor


def rate_noise_factors(seed: int, sat_idx: int, gs_idx: int, n_slots: int,
                       noise: tuple[float, float]) -> np.ndarray:
    """Per-slot multiplicative noise for one (satellite, station) pair.

    Keyed by (seed, sat, station); position t in the stream belongs to slot t,
    so draws are independent of which contacts a schedule actually uses.
    """
    return rng.uniform(seed, rng.TAG_RATE_NOISE, (sat_idx, gs_idx), n_slots,
                       noise[0], noise[1])


@dataclass(frozen=True)
class Contact:
    slot: int
    satellite_id: str
    ground_station_id: str
    elevation_deg: float
    rate_mb_per_min: float


class ContactTable:
    """Immutable per-slot visibility sets and rate lookup."""

    def __init__(self, n_slots: int, contacts: list[Contact]):
        self.n_slots = n_slots
        self._by_slot: list[list[Contact]] = [[] for _ in range(n_slots)]
        for c in contacts:
            self._by_slot[c.slot].append(c)
        for bucket in self._by_slot:
            bucket.sort(key=lambda c: (c.satellite_id, c.ground_station_id))
        self._rate = {(c.slot, c.satellite_id, c.ground_station_id): c.rate_mb_per_min
                      for c in contacts}

    def contacts_at(self, slot: int) -> tuple[Contact, ...]:
        return tuple(self._by_slot[slot])

    def visible_satellites(self, slot: int) -> tuple[str, ...]:
        return tuple(sorted({c.satellite_id for c in self._by_slot[slot]}))

    def stations_for(self, slot: int, satellite_id: str) -> tuple[str, ...]:
        return tuple(c.ground_station_id for c in self._by_slot[slot]
                     if c.satellite_id == satellite_id)

    def rate(self, slot: int, satellite_id: str, ground_station_id: str) -> float | None:
        return self._rate.get((slot, satellite_id, ground_station_id))

    def all_contacts(self) -> list[Contact]:
        return [c for bucket in self._by_slot for c in bucket]

    def __eq__(self, other) -> bool:
        return (isinstance(other, ContactTable)
                and self.n_slots == other.n_slots
                and self.all_contacts() == other.all_contacts())


def build_contact_table(scenario: Scenario) -> ContactTable:
    """Contact table for t in [0, horizon), from file or propagator."""
    if scenario.contact_plan_path is not None:
        return read_contact_plan(scenario.contact_plan_path, scenario)
    return _propagate_contacts(scenario)


def _propagate_contacts(scenario: Scenario) -> ContactTable:
    T = scenario.horizon
    t_mid = (np.arange(T) + 0.5) * scenario.tau
    contacts: list[Contact] = []
    for si, sat in enumerate(scenario.satellites):
        lat, lon = subsatellite_point(sat, t_mid)
        for gi, gs in enumerate(scenario.ground_stations):
            el = elevation_deg(lat, lon, sat.altitude_km, gs.lat_deg, gs.lon_deg)
            visible = np.nonzero(el >= scenario.elevation_mask_deg)[0]
            if visible.size == 0:
                continue
            noise = rate_noise_factors(scenario.seed, si, gi, T, scenario.noise)
            rate = scenario.r_max * np.sin(np.radians(el[visible])) * noise[visible]
            for t, e, r in zip(visible.tolist(), el[visible].tolist(), rate.tolist()):
                contacts.append(Contact(t, sat.id, gs.id, e, r))
    return ContactTable(T, contacts)


def write_contact_plan(table: ContactTable, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CONTACT_PLAN_HEADER)
        for c in table.all_contacts():
            writer.writerow([c.slot, c.satellite_id, c.ground_station_id,
                             repr(c.elevation_deg), repr(c.rate_mb_per_min)])


def read_contact_plan(path: str, scenario: Scenario) -> ContactTable:
    """Load and validate a contact-plan CSV against the scenario."""
    sat_ids = {s.id for s in scenario.satellites}
    gs_ids = {g.id for g in scenario.ground_stations}
    rate_cap = scenario.r_max * scenario.noise[1]
    contacts: list[Contact] = []
    try:
        fh = open(path, "r", encoding="utf-8", newline="")
    except OSError as exc:
        raise ContactPlanError(f"{path}: {exc}") from None
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != CONTACT_PLAN_HEADER:
            raise ContactPlanError(
                f"{path}: line 1: expected header {','.join(CONTACT_PLAN_HEADER)}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 5:
                raise ContactPlanError(f"{path}: line {lineno}: expected 5 fields, got {len(row)}")
            try:
                slot = int(row[0])
                el = float(row[3])
                rate = float(row[4])
            except ValueError as exc:
                raise ContactPlanError(f"{path}: line {lineno}: {exc}") from None
            sat_id, gs_id = row[1], row[2]
            if sat_id not in sat_ids:
                raise ContactPlanError(f"{path}: line {lineno}: unknown satellite {sat_id!r}")
            if gs_id not in gs_ids:
                raise ContactPlanError(f"{path}: line {lineno}: unknown ground station {gs_id!r}")
            if not 0 <= slot < scenario.horizon:
                raise ContactPlanError(
                    f"{path}: line {lineno}: slot {slot} outside [0, {scenario.horizon})")
            if el < scenario.elevation_mask_deg:
                raise ContactPlanError(
                    f"{path}: line {lineno}: elevation {el} below mask "
                    f"{scenario.elevation_mask_deg}")
            if not 0 < rate <= rate_cap:
                raise ContactPlanError(
                    f"{path}: line {lineno}: rate {rate} outside (0, {rate_cap}]")
            contacts.append(Contact(slot, sat_id, gs_id, el, rate))
    seen = set()
    for c in contacts:
        key = (c.slot, c.satellite_id, c.ground_station_id)
        if key in seen:
            raise ContactPlanError(f"{path}: duplicate contact {key}")
        seen.add(key)
    return ContactTable(scenario.horizon, contacts)
