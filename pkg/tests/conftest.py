import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from skygs import engine  # noqa: E402
from skygs.model import validate_scenario  # noqa: E402
from skygs.orbit import build_contact_table  # noqa: E402
from skygs.scenarios import desk_scenario  # noqa: E402

DESK_SEEDS = (1, 2, 3, 4, 5)


class DeskRuns:
    """Session cache of desk-scenario runs keyed by (policy, seed, v)."""

    def __init__(self):
        self._scenarios = {}
        self._tables = {}
        self._runs = {}

    def scenario(self, seed):
        if seed not in self._scenarios:
            self._scenarios[seed] = validate_scenario(desk_scenario(seed=seed))
        return self._scenarios[seed]

    def table(self, seed):
        if seed not in self._tables:
            self._tables[seed] = build_contact_table(self.scenario(seed))
        return self._tables[seed]

    def run(self, policy, seed, v=None):
        key = (policy, seed, v)
        if key not in self._runs:
            scenario = self.scenario(seed)
            if v is not None:
                scenario = engine.replace(scenario, v=v)
            record, metrics = engine.run(scenario, policy=policy,
                                         table=self.table(seed))
            self._runs[key] = (record, metrics)
        return self._runs[key]

    def all_runs(self):
        return dict(self._runs)


@pytest.fixture(scope="session")
def desk():
    return DeskRuns()


@pytest.fixture(scope="session")
def tuned_v(desk):
    """Largest V on the decade ladder meeting the latency constraint on all seeds.

    Starts at 5e6 and steps down a decade at a time; a V qualifies when every
    seed has non-positive time-average threshold excess and a violation rate
    under 5 percent.
    """
    for v in (5e6, 5e5, 5e4, 5e3, 5e2):
        ok = True
        for seed in DESK_SEEDS:
            record, metrics = desk.run("skygs", seed, v=v)
            avg_phi = sum(record.phi_trace) / len(record.phi_trace)
            if avg_phi > 0 or metrics.violation_rate >= 0.05:
                ok = False
                break
        if ok:
            return v
    raise AssertionError("no V on the decade ladder satisfies the latency constraint")
