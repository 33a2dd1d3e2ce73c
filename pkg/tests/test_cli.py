import json
import math

import numpy as np
import pytest

from kacbgk.cli import main


def read_csv(path):
    lines = path.read_text().splitlines()
    header = lines[0].split(",")
    rows = [[float(x) for x in line.split(",")] for line in lines[1:]]
    return header, rows


class TestSimulate:
    def test_minimal_smoke(self, tmp_path):
        out = tmp_path / "run"
        assert main(["simulate", "--output", str(out)]) == 0
        header, rows = read_csv(out / "moments.csv")
        assert header == ["t", "eta", "eta_se", "psi", "psi_se",
                          "zeta", "zeta_se", "xi", "xi_se"]
        assert len(rows) == 11  # t_end 1.0, sample_dt 0.1
        assert rows[0][0] == 0.0 and rows[-1][0] == 1.0
        cfg = json.loads((out / "config.json").read_text())
        assert cfg["n"] == 20 and cfg["m"] == 5 and cfg["lambda"] == 1.0

    def test_byte_identical_reruns(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            assert main(["simulate", "--output", str(out), "--seed", "7",
                         "--record-snapshots"]) == 0
        assert (a / "moments.csv").read_bytes() == (b / "moments.csv").read_bytes()
        assert (a / "histogram_0000.csv").read_bytes() == (b / "histogram_0000.csv").read_bytes()

    def test_rejects_n1(self, tmp_path):
        assert main(["simulate", "--n", "1", "--output", str(tmp_path / "x")]) == 2

    def test_rejects_both_dynamics_disabled(self, tmp_path):
        assert main(["simulate", "--disable-exchange", "--disable-kac",
                     "--output", str(tmp_path / "x")]) == 2

    def test_rejects_single_replica(self, tmp_path):
        assert main(["simulate", "--replicas", "1", "--output", str(tmp_path / "x")]) == 2

    def test_histogram_files(self, tmp_path):
        out = tmp_path / "h"
        assert main(["simulate", "--output", str(out), "--record-snapshots",
                     "--t-end", "0.5", "--sample-dt", "0.25"]) == 0
        for i in range(3):
            header, rows = read_csv(out / f"histogram_{i:04d}.csv")
            assert header == ["bin_lo", "bin_hi", "count"]
            assert len(rows) == 120
            assert sum(r[2] for r in rows) <= 20 * 10  # N x replicas

    def test_csv_roundtrip_17_digits(self, tmp_path):
        out = tmp_path / "r"
        assert main(["simulate", "--output", str(out), "--seed", "3"]) == 0
        lines = (out / "moments.csv").read_text().splitlines()[1:]
        for line in lines:
            for field in line.split(","):
                assert format(float(field), ".17g") == field

    def test_json_config_with_flag_override(self, tmp_path):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps({
            "n": 30, "m": 6, "lambda": 2.0, "seed": 5, "replicas": 4,
            "t_end": 0.5, "sample_dt": 0.25,
            "init": {"kind": "two_temperature", "sigma_passive": 1.0, "sigma_active": 2.0},
        }))
        out = tmp_path / "cfgout"
        assert main(["simulate", "--config", str(cfg_path), "--seed", "9",
                     "--output", str(out)]) == 0
        effective = json.loads((out / "config.json").read_text())
        assert effective["seed"] == 9  # flag wins
        assert effective["n"] == 30

    def test_unknown_config_key(self, tmp_path):
        cfg_path = tmp_path / "bad.json"
        cfg_path.write_text(json.dumps({"banana": 1}))
        assert main(["simulate", "--config", str(cfg_path),
                     "--output", str(tmp_path / "x")]) == 2


class TestMoments:
    def test_uniform_fixed_point_rows_constant(self, tmp_path):
        out = tmp_path / "m"
        assert main(["moments", "--n", "100", "--m", "10", "--t-end", "2.0",
                     "--sample-dt", "0.5", "--output", str(out)]) == 0
        header, rows = read_csv(out / "moments.csv")
        assert header == ["t", "eta", "psi", "zeta", "xi"]
        first = rows[0]
        assert first[2] == pytest.approx(0.17857142857142858, rel=1e-12)
        for row in rows[1:]:
            for j in range(1, 5):
                assert row[j] == pytest.approx(first[j], rel=1e-10, abs=1e-12)

    def test_single_time_grid_echoes_initial(self, tmp_path):
        out = tmp_path / "m0"
        assert main(["moments", "--t-end", "0.5", "--sample-dt", "1.0",
                     "--output", str(out)]) == 0
        _, rows = read_csv(out / "moments.csv")
        assert len(rows) == 1 and rows[0][0] == 0.0

    def test_seed_independent(self, tmp_path):
        outs = []
        for seed in ("1", "999"):
            out = tmp_path / f"s{seed}"
            assert main(["moments", "--seed", seed, "--output", str(out)]) == 0
            outs.append((out / "moments.csv").read_bytes())
        assert outs[0] == outs[1]

    def test_two_temperature_requires_initial_moments(self, tmp_path):
        assert main(["moments", "--init", "two_temperature",
                     "--output", str(tmp_path / "x")]) == 2
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps({
            "init": "two_temperature",
            "initial_moments": {"eta0": 2.0, "psi0": 4.5, "xi0": 1.0, "zeta0": 0.0},
        }))
        out = tmp_path / "tt"
        assert main(["moments", "--config", str(cfg_path), "--output", str(out)]) == 0
        _, rows = read_csv(out / "moments.csv")
        assert rows[0][1] == 2.0  # eta0 echoed at t=0

    def test_passive_spike_closed_form(self, tmp_path):
        out = tmp_path / "ps"
        assert main(["moments", "--init", "passive_spike", "--n", "25", "--m", "5",
                     "--output", str(out)]) == 0
        _, rows = read_csv(out / "moments.csv")
        assert rows[0][1] == pytest.approx(-1.0, abs=1e-10)          # eta0 ~ -1
        assert rows[0][4] == pytest.approx((30.0 / 25.0) ** 2, rel=1e-9)  # xi0


class TestVerify:
    def test_marginal_suite_reports_known_defect(self, tmp_path):
        # the 0.002 bound at m=100 is unattainable (exact sup 0.0030), so
        # the suite exits 1 with exactly that check failing
        out = tmp_path / "v"
        code = main(["verify", "--suite", "marginal", "--output", str(out)])
        assert code == 1
        verdict = json.loads((out / "verdict.json").read_text())
        failed = [c["name"] for c in verdict["checks"] if not c["passed"]]
        assert failed == ["sup_at_m100"]
        assert verdict["passed"] is False

    def test_gap_suite_refuses_enabled_exchange(self, tmp_path):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps({"disable_exchange": False}))
        assert main(["verify", "--suite", "gap", "--config", str(cfg_path),
                     "--output", str(tmp_path / "x")]) == 2

    def test_energy_suite_passes_on_small_config(self, tmp_path):
        out = tmp_path / "e"
        code = main(["verify", "--suite", "energy", "--n", "30", "--m", "5",
                     "--seed", "4", "--output", str(out)])
        assert code == 0
        verdict = json.loads((out / "verdict.json").read_text())
        assert verdict["passed"] is True
        assert {c["name"] for c in verdict["checks"]} == {
            "energy_drift_renorm_off", "energy_drift_renorm_on"}

    def test_unknown_suite(self, tmp_path):
        with pytest.raises(SystemExit):
            main(["verify", "--suite", "nonsense", "--output", str(tmp_path / "x")])
