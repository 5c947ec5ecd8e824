"""Renders every figure kind from real harness outputs (produced by invoking
the sectorlab CLI, the only interface this package knows about)."""

import json
import subprocess
import sys

import numpy as np
import pytest

from sectorlab_plots import SchemaError, render
from sectorlab_plots.cli import main as plot_main
from sectorlab_plots.formats import read_bands

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"

RING_CFG = {
    "n_points": 256,
    "thetas": 8,
    "times": [0.1, 0.2],
    "winding_cutoff": 15,
    "convergence_scan": True,
}
FREE_BANDS_CFG = {"V_coeffs": {}, "n_k": 24, "n_bands": 6, "G_max": 8}
CRYSTAL_CFG = {
    "grid": 32,
    "M": 32,
    "R_cells": [0, 1],
    "n_line_cells": 64,
    "split_steps": 256,
    "t": 0.3,
}


def run_harness(subcommand, out_dir, config=None):
    cmd = [sys.executable, "-m", "sectorlab.cli", subcommand, "--out", str(out_dir)]
    if config is not None:
        cfg_path = out_dir / "cfg.json"
        cfg_path.parent.mkdir(parents=True, exist_ok=True)
        cfg_path.write_text(json.dumps(config))
        cmd += ["--config", str(cfg_path)]
    proc = subprocess.run(cmd, capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    return out_dir


@pytest.fixture(scope="session")
def artifacts(tmp_path_factory):
    root = tmp_path_factory.mktemp("harness")
    run_harness("ring-evolve", root / "ring", RING_CFG)
    run_harness("bands", root / "bands", FREE_BANDS_CFG)
    run_harness("crystal-propagator", root / "crystal", CRYSTAL_CFG)
    return root


class TestKinds:
    def test_bands_renders(self, artifacts, tmp_path):
        out = tmp_path / "bands.png"
        assert plot_main(["--kind", "bands", "--in", str(artifacts / "bands" / "bands.csv"),
                          "--out", str(out)]) == 0
        assert out.read_bytes()[:8] == PNG_MAGIC

    def test_bands_data_is_folded_free_parabolas(self, artifacts):
        k, bands, _ = read_bands(artifacts / "bands" / "bands.csv")
        gs = np.arange(-8, 9)
        for row_k, row_e in zip(k, bands):
            folded = np.sort((row_k + 2 * np.pi * gs) ** 2 / 2)[: len(row_e)]
            assert np.max(np.abs(row_e - folded)) < 1e-9

    def test_kernel_heatmap_renders(self, artifacts, tmp_path):
        out = tmp_path / "kernel.png"
        code = plot_main(["--kind", "kernel_heatmap",
                          "--in", str(artifacts / "crystal" / "kk_kernel.bin"),
                          "--out", str(out)])
        assert code == 0 and out.read_bytes()[:8] == PNG_MAGIC

    def test_convergence_renders(self, artifacts, tmp_path):
        out = tmp_path / "conv.png"
        code = plot_main(["--kind", "convergence",
                          "--in", str(artifacts / "ring" / "ring_convergence.csv"),
                          "--out", str(out)])
        assert code == 0 and out.read_bytes()[:8] == PNG_MAGIC

    def test_theta_sweep_renders(self, artifacts, tmp_path):
        out = tmp_path / "sweep.png"
        code = plot_main(["--kind", "theta_sweep",
                          "--in", str(artifacts / "ring" / "ring_defects.csv"),
                          "--out", str(out)])
        assert code == 0 and out.read_bytes()[:8] == PNG_MAGIC


class TestSchemaValidation:
    def test_missing_columns_rejected(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("a,b\n1,2\n")
        out = tmp_path / "x.png"
        assert plot_main(["--kind", "bands", "--in", str(bad), "--out", str(out)]) == 2
        assert not out.exists()

    def test_empty_data_rejected(self, tmp_path):
        bad = tmp_path / "empty.csv"
        bad.write_text("k,E_1\n")
        assert plot_main(["--kind", "bands", "--in", str(bad), "--out", str(tmp_path / "y.png")]) == 2

    def test_missing_file(self, tmp_path):
        assert plot_main(["--kind", "bands", "--in", str(tmp_path / "nope.csv"),
                          "--out", str(tmp_path / "z.png")]) == 2

    def test_wrong_kernel_magic(self, tmp_path):
        bad = tmp_path / "bad.bin"
        bad.write_bytes(b"JUNK" + b"\0" * 60)
        assert plot_main(["--kind", "kernel_heatmap", "--in", str(bad),
                          "--out", str(tmp_path / "k.png")]) == 2

    def test_unknown_kind_rejected_by_library(self, tmp_path):
        with pytest.raises(SchemaError):
            render("pie", tmp_path / "a.csv", tmp_path / "b.png")


class TestDeterminism:
    def test_same_inputs_same_dimensions(self, artifacts, tmp_path):
        from PIL import Image

        a, b = tmp_path / "a.png", tmp_path / "b.png"
        src = str(artifacts / "ring" / "ring_convergence.csv")
        assert plot_main(["--kind", "convergence", "--in", src, "--out", str(a)]) == 0
        assert plot_main(["--kind", "convergence", "--in", src, "--out", str(b)]) == 0
        assert Image.open(a).size == Image.open(b).size
