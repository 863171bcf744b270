import json

import pytest

from skygs.cli import main
from skygs.scenarios import desk_scenario


@pytest.fixture()
def scenario_file(tmp_path):
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(desk_scenario(seed=1, horizon=60, v=5e4)))
    return str(path)


class TestValidate:
    def test_ok(self, scenario_file, capsys):
        assert main(["validate", "--scenario", scenario_file]) == 0
        assert "OK" in capsys.readouterr().out

    def test_missing_xi_exits_one(self, tmp_path, capsys):
        raw = desk_scenario(seed=1, horizon=60)
        del raw["sim"]["xi"]
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(raw))
        assert main(["validate", "--scenario", str(path)]) == 1
        assert "sim.xi" in capsys.readouterr().err

    def test_unknown_policy_lists_valid(self, tmp_path, capsys):
        raw = desk_scenario(seed=1, horizon=60)
        raw["sim"]["policy"] = "wat"
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(raw))
        assert main(["validate", "--scenario", str(path)]) == 1
        err = capsys.readouterr().err
        assert "skygs" in err and "bwg" in err


class TestGenContacts:
    def test_zero_satellites_header_only(self, tmp_path):
        raw = desk_scenario(seed=1, horizon=10)
        raw["satellites"] = []
        path = tmp_path / "empty.json"
        path.write_text(json.dumps(raw))
        out = tmp_path / "plan.csv"
        assert main(["gen-contacts", "--scenario", str(path), "--out", str(out)]) == 0
        assert out.read_text().splitlines() == [
            "slot,satellite_id,ground_station_id,elevation_deg,rate_mb_per_min"]

    def test_regeneration_identical_bytes(self, scenario_file, tmp_path):
        out1 = tmp_path / "a.csv"
        out2 = tmp_path / "b.csv"
        main(["gen-contacts", "--scenario", scenario_file, "--out", str(out1)])
        main(["gen-contacts", "--scenario", scenario_file, "--out", str(out2)])
        assert out1.read_bytes() == out2.read_bytes()

    def test_polar_sat_equatorial_station_has_contacts(self, tmp_path):
        raw = {
            "satellites": [{"id": "s", "altitude_km": 475.0, "inclination_deg": 97.4,
                            "raan_deg": 0.0, "phase_deg": 0.0,
                            "daily_volume_mb": [1000, 1000]}],
            "ground_stations": [{"id": "g", "provider": "p", "lat_deg": 0.0,
                                 "lon_deg": 0.0, "antennas": 1, "price": "18 $/min"}],
            "data_centers": [{"id": "d", "provider": "p", "price": "1 $/h",
                              "intensity": "0.1 h/GB"}],
            "sim": {"tau": 1.0, "horizon": 1440, "xi": 60.0, "v": 0.0, "seed": 1,
                    "policy": "skygs", "backhaul_rate": "1 Gbps"},
        }
        path = tmp_path / "one.json"
        path.write_text(json.dumps(raw))
        out = tmp_path / "plan.csv"
        assert main(["gen-contacts", "--scenario", str(path), "--out", str(out)]) == 0
        assert len(out.read_text().splitlines()) > 1


class TestSimulate:
    def test_writes_artifacts(self, scenario_file, tmp_path):
        out = tmp_path / "out"
        assert main(["simulate", "--scenario", scenario_file, "--out", str(out),
                     "--policy", "bg", "--seed", "2"]) == 0
        records = out / "records_bg_seed2.csv"
        summary = out / "summary_bg_seed2.json"
        assert records.exists() and summary.exists()
        data = json.loads(summary.read_text())
        assert data["policy"] == "bg" and data["seed"] == 2

    def test_v_and_xi_overrides(self, scenario_file, tmp_path):
        out = tmp_path / "out"
        assert main(["simulate", "--scenario", scenario_file, "--out", str(out),
                     "--v", "5000000", "--xi", "60"]) == 0
        assert (out / "summary_skygs_seed1.json").exists()

    def test_contact_plan_flag(self, scenario_file, tmp_path):
        plan = tmp_path / "plan.csv"
        main(["gen-contacts", "--scenario", scenario_file, "--out", str(plan)])
        out = tmp_path / "out"
        assert main(["simulate", "--scenario", scenario_file, "--out", str(out),
                     "--contacts", str(plan)]) == 0

    def test_dump_weights(self, tmp_path):
        raw = desk_scenario(seed=1, horizon=3, v=5e4)
        path = tmp_path / "s.json"
        path.write_text(json.dumps(raw))
        out = tmp_path / "out"
        dump = tmp_path / "weights"
        assert main(["simulate", "--scenario", str(path), "--out", str(out),
                     "--dump-weights", str(dump)]) == 0
        files = sorted(dump.glob("weights_slot*.csv"))
        assert len(files) == 3
        header = files[0].read_text().splitlines()[0]
        assert header.startswith("satellite,")

    def test_dump_weights_respects_v_override(self, tmp_path):
        # the replayed matrices must reflect the overridden V, not the file's
        raw = desk_scenario(seed=1, horizon=2, v=5e4)
        path = tmp_path / "s.json"
        path.write_text(json.dumps(raw))
        dumps = {}
        for v in ("50000", "5000000"):
            dump = tmp_path / f"weights_{v}"
            assert main(["simulate", "--scenario", str(path),
                         "--out", str(tmp_path / f"out_{v}"),
                         "--v", v, "--dump-weights", str(dump)]) == 0
            dumps[v] = (dump / "weights_slot00001.csv").read_text()
        assert dumps["50000"] != dumps["5000000"]


class TestCompare:
    def test_grid_rows_and_determinism(self, scenario_file, tmp_path):
        out1 = tmp_path / "cmp1.csv"
        out2 = tmp_path / "cmp2.csv"
        args = ["compare", "--scenario", scenario_file,
                "--policies", "skygs,sg,bg,br,bwg,ilp_hpq", "--seeds", "1"]
        assert main(args + ["--out", str(out1)]) == 0
        assert main(args + ["--out", str(out2)]) == 0
        lines = out1.read_text().splitlines()
        assert lines[0] == ("policy,seed,status,total_cost,avg_latency_min_per_mb,"
                            "violation_rate,final_backlog_mb,mean_q,max_q")
        assert len(lines) == 7
        assert out1.read_bytes() == out2.read_bytes()

    def test_unknown_policy_rejected(self, scenario_file, tmp_path):
        assert main(["compare", "--scenario", scenario_file, "--policies", "zzz",
                     "--out", str(tmp_path / "c.csv")]) == 1

    def test_failed_run_marked_others_proceed(self, tmp_path):
        # provider p1 owns stations but no data centers, so the sg row cannot
        # be scheduled; bg must still produce a valid row
        raw = desk_scenario(seed=1, horizon=20)
        for dc in raw["data_centers"]:
            dc["provider"] = "provider-b"
        raw["sim"]["policy_params"] = {"provider": "provider-a"}
        path = tmp_path / "s.json"
        path.write_text(json.dumps(raw))
        out = tmp_path / "cmp.csv"
        assert main(["compare", "--scenario", str(path), "--policies", "sg,bg",
                     "--seeds", "1", "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[1].startswith("sg,1,failed,")
        assert lines[2].startswith("bg,1,ok,")


class TestExitCodes:
    def test_unwritable_out_is_runtime_failure(self, scenario_file, tmp_path):
        blocker = tmp_path / "blocked"
        blocker.write_text("file, not a directory")
        assert main(["simulate", "--scenario", scenario_file,
                     "--out", str(blocker)]) == 2


class TestSweepV:
    def test_rows_and_zero_v(self, scenario_file, tmp_path):
        out = tmp_path / "sweep.csv"
        assert main(["sweep-v", "--scenario", scenario_file,
                     "--v-list", "0,1000,100000", "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "v,total_cost,avg_latency_min_per_mb,violation_rate,mean_q"
        assert len(lines) == 4
        assert lines[1].startswith("0.0,")
