import json

import numpy as np
import pytest

from sectorlab import cli, serialization as ser

FAST_RING = {
    "n_points": 256,
    "thetas": [0.0, 1.1],
    "times": [0.05, 0.2],
    "winding_cutoff": 20,
    "convergence_scan": True,
    "write_packets": True,
}

FAST_SECTORS = {
    "n_points": 128,
    "t": 0.1,
    "weights_t": 0.1,
    "winding_cutoff": 10,
    "n_angles": 32,
    "ident_range": 3,
}

FAST_CRYSTAL = {
    "grid": 32,
    "M": 32,
    "R_cells": [0, 1],
    "n_line_cells": 64,
    "split_steps": 512,
    "t": 0.3,
}


def write_config(tmp_path, payload, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


class TestGroupCheck:
    def test_default_suite_passes(self, tmp_path):
        code = cli.main(["group-check", "--out", str(tmp_path), "--seed", "7"])
        assert code == 0
        report = json.loads((tmp_path / "group_report.json").read_text())
        assert report["pass"] is True
        assert {c["suite"] for c in report["checks"]} >= {"s3", "f2s3", "bloch", "braid"}

    def test_corrupted_rep_exits_one_with_witness(self, tmp_path):
        cfg = write_config(tmp_path, {"suites": ["s3"], "n_samples": 300, "corrupt_generator": 0})
        code = cli.main(["group-check", "--config", cfg, "--out", str(tmp_path)])
        assert code == 1
        report = json.loads((tmp_path / "group_report.json").read_text())
        failing = [c for c in report["checks"] if not c["pass"]]
        assert failing and any(c["witnesses"] for c in failing)

    def test_malformed_json_exits_two(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert cli.main(["group-check", "--config", str(bad), "--out", str(tmp_path)]) == 2

    def test_unknown_key_exits_two(self, tmp_path):
        cfg = write_config(tmp_path, {"not_a_key": 1})
        assert cli.main(["group-check", "--config", cfg, "--out", str(tmp_path)]) == 2

    def test_rep_file_round_trip(self, tmp_path):
        from sectorlab import groups

        rep_path = tmp_path / "rep.json"
        rep_path.write_text(groups.rep_to_json(groups.s3_standard_rep()))
        cfg = write_config(tmp_path, {"suites": [], "rep_file": str(rep_path), "n_samples": 200})
        assert cli.main(["group-check", "--config", cfg, "--out", str(tmp_path)]) == 0


class TestRingEvolve:
    def test_default_fast_config_passes(self, tmp_path):
        cfg = write_config(tmp_path, FAST_RING)
        code = cli.main(["ring-evolve", "--config", cfg, "--out", str(tmp_path)])
        assert code == 0
        rows = (tmp_path / "ring_defects.csv").read_text().splitlines()
        assert rows[0].startswith("theta,t,")
        assert len(rows) == 1 + 4
        data = np.array([[float(v) for v in r.split(",")] for r in rows[1:]])
        assert np.all(np.isfinite(data))
        conv = (tmp_path / "ring_convergence.csv").read_text().splitlines()
        assert conv[0] == "cutoff,defect"
        assert (tmp_path / "packet_initial.csv").exists()

    def test_forced_small_cutoff_exits_one(self, tmp_path):
        cfg = write_config(
            tmp_path,
            {"winding_cutoff": 1, "force_cutoff": True, "times": [0.2], "thetas": [1.1],
             "n_points": 256, "convergence_scan": False},
        )
        assert cli.main(["ring-evolve", "--config", cfg, "--out", str(tmp_path)]) == 1

    def test_theta_sweep_as_integer(self, tmp_path):
        cfg = write_config(
            tmp_path,
            {"thetas": 8, "times": [0.1], "n_points": 256, "convergence_scan": False},
        )
        assert cli.main(["ring-evolve", "--config", cfg, "--out", str(tmp_path)]) == 0
        rows = (tmp_path / "ring_defects.csv").read_text().splitlines()
        assert len(rows) == 1 + 8

    def test_workers_bit_identical(self, tmp_path):
        cfg = write_config(tmp_path, FAST_RING)
        out1, out2 = tmp_path / "w1", tmp_path / "w2"
        assert cli.main(["ring-evolve", "--config", cfg, "--out", str(out1), "--workers", "1"]) == 0
        assert cli.main(["ring-evolve", "--config", cfg, "--out", str(out2), "--workers", "4"]) == 0
        assert (out1 / "ring_summary.json").read_bytes() == (out2 / "ring_summary.json").read_bytes()
        assert (out1 / "ring_defects.csv").read_bytes() == (out2 / "ring_defects.csv").read_bytes()


class TestSectorExtract:
    def test_fast_config_passes_and_writes_kernels(self, tmp_path):
        cfg = write_config(tmp_path, FAST_SECTORS)
        assert cli.main(["sector-extract", "--config", cfg, "--out", str(tmp_path)]) == 0
        kernel, meta = ser.read_kernel(tmp_path / "sector_kernels" / "k_+00.bin")
        assert meta["n_points"] == 128
        report = json.loads((tmp_path / "sector_report.json").read_text())
        assert report["pass"] is True

    def test_aliasing_exits_three(self, tmp_path):
        cfg = write_config(tmp_path, {"n_angles": 20, "winding_cutoff": 15})
        assert cli.main(["sector-extract", "--config", cfg, "--out", str(tmp_path)]) == 3
        assert (tmp_path / "error.json").exists()


class TestBands:
    def test_free_bands(self, tmp_path):
        cfg = write_config(tmp_path, {"V_coeffs": {}, "n_k": 16, "n_bands": 5, "G_max": 8})
        assert cli.main(["bands", "--config", cfg, "--out", str(tmp_path)]) == 0
        report = json.loads((tmp_path / "bands_report.json").read_text())
        names = {c["name"] for c in report["checks"]}
        assert "free_band_exactness" in names
        lines = (tmp_path / "bands.csv").read_text().splitlines()
        assert lines[0] == "k,E_1,E_2,E_3,E_4,E_5"
        assert len(lines) == 17

    def test_gap_report(self, tmp_path):
        cfg = write_config(tmp_path, {"n_k": 8, "n_bands": 4})
        assert cli.main(["bands", "--config", cfg, "--out", str(tmp_path)]) == 0
        report = json.loads((tmp_path / "bands_report.json").read_text())
        gap = [c for c in report["checks"] if c["name"] == "weak_coupling_gap"]
        assert gap and gap[0]["pass"]
        assert abs(gap[0]["gap"] - 0.1) / 0.1 < 0.05


class TestCrystalPropagator:
    def test_fast_config(self, tmp_path):
        cfg = write_config(tmp_path, FAST_CRYSTAL)
        assert cli.main(["crystal-propagator", "--config", cfg, "--out", str(tmp_path)]) == 0
        report = json.loads((tmp_path / "crystal_report.json").read_text())
        names = {c["name"] for c in report["checks"]}
        assert {"kk_twist_boundary", "kr_shift_relation", "fourier_pair_consistency"} <= names
        kernel, meta = ser.read_kernel(tmp_path / "kk_kernel.bin")
        assert meta["n_points"] == 32 and meta["t_f"] == 0.3

    def test_winding_report_json(self):
        import json as _json

        from sectorlab import covering as cov

        model = cov.TorusCoveringModel((1.0,))
        samples = (np.linspace(0, 1, 33) % 1.0)[:, None]
        samples[-1] = samples[0]
        loop = cov.DiscretePath(samples, np.linspace(0, 1, 33), 0.1)
        doc = _json.loads(cov.winding_report_json(loop, model))
        assert doc["winding"] == [1]
        assert doc["cell_lengths"] == [1.0]


class TestHelp:
    def test_exit_codes_documented(self, capsys):
        with pytest.raises(SystemExit):
            cli.main(["--help"])
        text = capsys.readouterr().out
        assert "exit codes" in text
        for token in ("0", "1", "2", "3"):
            assert token in text
