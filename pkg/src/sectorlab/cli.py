"""Batch harness: every experiment is a subcommand reading a JSON config and
writing CSV/JSON (and binary kernel) artifacts into --out.

Exit codes: 0 all checks passed, 1 physics-check failure, 2 config error,
3 numerical-certification error (uncertifiable truncation, aliasing,
eigensolver non-convergence, oracle edge contamination).

Identical config + seed produce byte-identical JSON reports; worker fan-out
only parallelizes independent cells and reduces them in a fixed order.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import crystal, groups, ring, sectors, serialization
from .errors import (
    AliasingError,
    ConfigError,
    CutoffTooSmallError,
    JacobiConvergenceError,
    ReflectionContaminationError,
    SectorLabError,
)

EXIT_OK = 0
EXIT_PHYSICS = 1
EXIT_CONFIG = 2
EXIT_CERTIFICATION = 3

CERTIFICATION_ERRORS = (
    CutoffTooSmallError,
    AliasingError,
    JacobiConvergenceError,
    ReflectionContaminationError,
)

TOLERANCES = {
    "default": {
        "group": 1e-12,
        "three_way": 1e-7,
        "composition_spectral": 1e-12,
        "composition_dense": 1e-6,
        "norm_drift": 1e-9,
        "sector": 1e-8,
        "weights": 1e-10,
        "bands_free": 1e-10,
        "band_periodicity": 1e-10,
        "gap_rel": 0.05,
        "twist": 1e-10,
        "shift": 1e-8,
        "fourier_pair": 1e-8,
        "kbar": 1e-6,
    },
    "strict": {
        "group": 1e-13,
        "three_way": 1e-8,
        "composition_spectral": 1e-13,
        "composition_dense": 1e-7,
        "norm_drift": 1e-10,
        "sector": 5e-9,
        "weights": 1e-11,
        "bands_free": 1e-11,
        "band_periodicity": 1e-11,
        "gap_rel": 0.02,
        "twist": 1e-11,
        "shift": 1e-9,
        "fourier_pair": 1e-9,
        "kbar": 1e-7,
    },
}

DEFAULT_CONFIGS = {
    "group-check": {
        "suites": ["s3", "f2s3", "bloch", "braid"],
        "n_samples": 1000,
        "bloch_theta": [1.0471975511965976],  # pi/3
        "braid_strands": 4,
        "braid_alpha": 0.7,
        "rep_file": None,
        "corrupt_generator": None,
    },
    "ring-evolve": {
        "length": 1.0,
        "n_points": 1024,
        "sigma": 0.08,
        "center": 0.5,
        "momentum": 0.0,
        "thetas": [0.0, 1.0471975511965976, 3.141592653589793],
        "times": [0.05, 0.2, 1.0],
        "winding_cutoff": 25,
        "force_cutoff": False,
        "split_steps": 8,
        "convergence_scan": True,
        "write_packets": False,
    },
    "sector-extract": {
        "n_points": 256,
        "t": 0.2,
        "weights_t": 0.15,
        "winding_cutoff": 15,
        "n_angles": 64,
        "offsets": [0.0, 0.37],
        "heldout_theta": 1.2345,
        "weight_theta": 0.8765,
        "ident_range": 5,
        "write_kernels": True,
    },
    "bands": {
        "a": 1.0,
        "V_coeffs": {"1": 0.05},
        "G_max": 12,
        "n_k": 64,
        "n_bands": 8,
    },
    "crystal-propagator": {
        "a": 1.0,
        "V_coeffs": {"1": 0.05},
        "G_max": 12,
        "grid": 32,  # cell points
        "M": 64,  # Brillouin-cell quadrature nodes
        "t": 0.5,
        "R_cells": [0, 1, 2],
        "n_line_cells": 128,
        "split_steps": 2048,
        "sigma": 0.10,
        "twist_k": 0.9,
        "fourier_m_max": 2,
    },
}


def load_config(subcommand: str, path: str | None) -> dict:
    cfg = {k: (list(v) if isinstance(v, list) else v) for k, v in DEFAULT_CONFIGS[subcommand].items()}
    if path is not None:
        try:
            with open(path) as fh:
                user = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        if not isinstance(user, dict):
            raise ConfigError("config root must be a JSON object")
        for key, value in user.items():
            if key not in cfg:
                raise ConfigError(f"unknown config key {key!r} for {subcommand}")
            cfg[key] = value
    return cfg


def _as_potential(cfg: dict) -> crystal.PeriodicPotential:
    coeffs = {}
    raw = cfg["V_coeffs"]
    if not isinstance(raw, dict):
        raise ConfigError("V_coeffs must be an object {g: value}")
    for key, value in raw.items():
        try:
            g = int(key)
        except ValueError as exc:
            raise ConfigError(f"V_coeffs key {key!r} is not an integer harmonic") from exc
        if isinstance(value, (list, tuple)):
            coeffs[g] = complex(value[0], value[1])
        else:
            coeffs[g] = complex(value)
        if -g not in raw and g != 0:
            coeffs[-g] = np.conj(coeffs[g])
    return crystal.PeriodicPotential(cfg["a"], coeffs)


def _write_report(out_dir: Path, name: str, payload: dict) -> None:
    serialization.write_json(out_dir / name, payload)


# ---------------------------------------------------------------------------
# Subcommand implementations


def run_group_check(cfg: dict, out_dir: Path, seed: int, workers: int, tol: dict) -> int:
    reports = []

    def corrupted(rep: groups.UnitaryRep, gen: int) -> groups.UnitaryRep:
        images = [m.copy() for m in rep.images]
        images[gen] = images[gen].copy()
        images[gen][0, 0] = -images[gen][0, 0] if images[gen][0, 0] != 0 else 1
        return groups.UnitaryRep(rep.presentation, rep.dimension, tuple(images))

    n = int(cfg["n_samples"])
    suite_reps = []
    if cfg["rep_file"] is not None:
        with open(cfg["rep_file"]) as fh:
            suite_reps.append(("file", groups.rep_from_json(fh.read())))
    for name in cfg["suites"]:
        if name == "s3":
            suite_reps.append(("s3", groups.s3_standard_rep()))
        elif name == "f2s3":
            suite_reps.append(("f2s3", groups.f2_to_s3_rep()))
        elif name == "bloch":
            suite_reps.append(("bloch", groups.bloch_scalar_rep(cfg["bloch_theta"])))
        elif name == "braid":
            suite_reps.append(
                ("braid", groups.braid_scalar_rep(int(cfg["braid_strands"]), float(cfg["braid_alpha"])))
            )
        else:
            raise ConfigError(f"unknown suite {name!r}")
    if cfg["corrupt_generator"] is not None:
        target = suite_reps[0]
        suite_reps.append((target[0] + "_corrupted", corrupted(target[1], int(cfg["corrupt_generator"]))))

    for label, rep in suite_reps:
        hom = groups.check_rep_homomorphism(rep, n, seed)
        uni = groups.check_rep_unitary(rep, min(n, 100), seed + 1)
        for r in (hom, uni):
            reports.append((label, r))
        if rep.presentation.kind == groups.BRAID and rep.presentation.param >= 3:
            reports.append((label, groups.check_yang_baxter(rep)))

    payload = {
        "subcommand": "group-check",
        "pass": all(r.passed for _, r in reports),
        "checks": [dict(suite=label, **r.to_dict()) for label, r in reports],
        "seed": seed,
    }
    _write_report(out_dir, "group_report.json", payload)
    return EXIT_OK if payload["pass"] else EXIT_PHYSICS


def run_ring_evolve(cfg: dict, out_dir: Path, seed: int, workers: int, tol: dict) -> int:
    grid = ring.Grid1D(int(cfg["n_points"]), float(cfg["length"]))
    thetas = cfg["thetas"]
    if isinstance(thetas, int):
        thetas = list(np.linspace(0, 2 * np.pi, thetas, endpoint=False))
    times = [float(t) for t in cfg["times"]]
    cells = [(float(th), float(t)) for th in thetas for t in times]

    def run_cell(cell):
        th, t = cell
        return ring.three_way_defects(
            grid,
            th,
            t,
            sigma=float(cfg["sigma"]) * grid.length,
            center=float(cfg["center"]) * grid.length,
            momentum=float(cfg["momentum"]) / grid.length,
            winding_cutoff=int(cfg["winding_cutoff"]),
            force_cutoff=bool(cfg["force_cutoff"]),
            split_steps=int(cfg["split_steps"]),
        )

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_cell, cells))
    else:
        results = [run_cell(c) for c in cells]

    with open(out_dir / "ring_defects.csv", "w") as fh:
        fh.write("theta,t,spectral_vs_image,spectral_vs_split,image_vs_split,used_cutoff,tail_ratio\n")
        for (th, t), d in zip(cells, results):
            fh.write(
                f"{float(th)!r},{float(t)!r},{float(d['spectral_vs_image'])!r},"
                f"{float(d['spectral_vs_split'])!r},{float(d['image_vs_split'])!r},"
                f"{int(d['used_cutoff'])},{float(d['tail_ratio'])!r}\n"
            )

    if cfg["convergence_scan"]:
        th, t = float(thetas[min(1, len(thetas) - 1)]), times[min(1, len(times) - 1)]
        psi = ring.gaussian_ring_packet(
            grid, float(cfg["center"]) * grid.length, float(cfg["sigma"]) * grid.length
        )
        spectral = ring.spectral_propagate_ring(psi, th, t)
        with open(out_dir / "ring_convergence.csv", "w") as fh:
            fh.write("cutoff,defect\n")
            for cutoff in range(0, int(cfg["winding_cutoff"]) + 1):
                image = ring.image_sum_propagate_ring(psi, th, t, cutoff, force_cutoff=True)
                fh.write(f"{cutoff},{float(ring.l2_distance(spectral, image))!r}\n")

    if cfg["write_packets"]:
        th, t = cells[0]
        psi = ring.gaussian_ring_packet(
            grid, float(cfg["center"]) * grid.length, float(cfg["sigma"]) * grid.length
        )
        serialization.write_packet_csv(out_dir / "packet_initial.csv", psi)
        serialization.write_packet_csv(
            out_dir / "packet_spectral.csv", ring.spectral_propagate_ring(psi, th, t)
        )

    worst = max(
        max(d["spectral_vs_image"], d["spectral_vs_split"], d["image_vs_split"]) for d in results
    )
    payload = {
        "subcommand": "ring-evolve",
        "pass": worst <= tol["three_way"],
        "worst_defect": worst,
        "tolerance": tol["three_way"],
        "cells": [
            {
                "theta": th,
                "t": t,
                "defects": {
                    "spectral_vs_image": d["spectral_vs_image"],
                    "spectral_vs_split": d["spectral_vs_split"],
                    "image_vs_split": d["image_vs_split"],
                },
                "used_cutoff": d["used_cutoff"],
            }
            for (th, t), d in zip(cells, results)
        ],
        "seed": seed,
    }
    _write_report(out_dir, "ring_summary.json", payload)
    return EXIT_OK if payload["pass"] else EXIT_PHYSICS


def run_sector_extract(cfg: dict, out_dir: Path, seed: int, workers: int, tol: dict) -> int:
    grid = ring.Grid1D(int(cfg["n_points"]), 1.0)
    t = float(cfg["t"])
    n_max = int(cfg["winding_cutoff"])
    m_angles = int(cfg["n_angles"])
    offsets = [float(o) for o in cfg["offsets"]]

    family = sectors.extract_sector_kernels(grid, t, n_max, m_angles, offsets[0])
    if cfg["write_kernels"]:
        kdir = out_dir / "sector_kernels"
        kdir.mkdir(exist_ok=True)
        for n, kernel in sorted(family.kernels.items()):
            serialization.write_kernel(kdir / f"k_{n:+03d}.bin", kernel, 0.0, t, 0.0)

    checks = [
        sectors.check_offset_independence(grid, t, n_max, m_angles, offsets, tolerance=tol["sector"]),
        sectors.check_heldout_reconstruction(family, float(cfg["heldout_theta"]), tolerance=tol["sector"]),
        sectors.check_free_identification(family, int(cfg["ident_range"]), tolerance=tol["sector"]),
    ]
    weights_family = sectors.extract_sector_kernels(grid, float(cfg["weights_t"]), n_max, m_angles)
    checks.append(
        sectors.recover_weights(
            weights_family, float(cfg["weight_theta"]), int(cfg["ident_range"]), tolerance=tol["weights"]
        )
    )
    payload = {
        "subcommand": "sector-extract",
        "pass": all(r.passed for r in checks),
        "checks": [r.to_dict() for r in checks],
        "seed": seed,
    }
    _write_report(out_dir, "sector_report.json", payload)
    return EXIT_OK if payload["pass"] else EXIT_PHYSICS


def run_bands(cfg: dict, out_dir: Path, seed: int, workers: int, tol: dict) -> int:
    pot = _as_potential(cfg)
    g_max = int(cfg["G_max"])
    n_bands = int(cfg["n_bands"])
    n_k = int(cfg["n_k"])
    ks = np.linspace(-np.pi / pot.period, np.pi / pot.period, n_k, endpoint=False)

    def solve(k):
        return crystal.band_structure(pot, [k], g_max, n_bands)[0]

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = np.array(list(pool.map(solve, ks)))
    else:
        rows = crystal.band_structure(pot, ks, g_max, n_bands)
    serialization.write_bands_csv(out_dir / "bands.csv", rows)

    checks = []
    if not pot.fourier_coeffs:
        gs = np.arange(-g_max, g_max + 1)
        defect = 0.0
        for row in rows:
            exact = np.sort((row[0] + 2 * np.pi * gs / pot.period) ** 2 / 2)[:n_bands]
            defect = max(defect, float(np.max(np.abs(row[1:] - exact))))
        checks.append(
            {"name": "free_band_exactness", "pass": defect <= tol["bands_free"], "max_defect": defect,
             "tolerance": tol["bands_free"]}
        )
    v1 = abs(pot.fourier_coeffs.get(1, 0.0))
    if v1 > 0 and pot.max_harmonic == 1:
        energies, _ = crystal.solve_bands(
            crystal.build_hk_matrix(pot, np.pi / pot.period, g_max)
        )
        gap = float(energies[1] - energies[0])
        rel = abs(gap - 2 * v1) / (2 * v1)
        checks.append(
            {"name": "weak_coupling_gap", "pass": rel <= tol["gap_rel"], "max_defect": rel,
             "tolerance": tol["gap_rel"], "gap": gap, "expected": 2 * v1}
        )
    k0 = 0.3 / pot.period
    e_shift, _ = crystal.solve_bands(crystal.build_hk_matrix(pot, k0 + 2 * np.pi / pot.period, g_max))
    e_base, _ = crystal.solve_bands(crystal.build_hk_matrix(pot, k0, g_max))
    half = n_bands
    defect = float(np.max(np.abs(e_shift[:half] - e_base[:half])))
    checks.append(
        {"name": "band_periodicity", "pass": defect <= tol["band_periodicity"], "max_defect": defect,
         "tolerance": tol["band_periodicity"]}
    )

    payload = {
        "subcommand": "bands",
        "pass": all(c["pass"] for c in checks),
        "checks": checks,
        "seed": seed,
    }
    _write_report(out_dir, "bands_report.json", payload)
    return EXIT_OK if payload["pass"] else EXIT_PHYSICS


def run_crystal_propagator(cfg: dict, out_dir: Path, seed: int, workers: int, tol: dict) -> int:
    pot = _as_potential(cfg)
    grid = ring.Grid1D(int(cfg["grid"]), pot.period)
    quad = crystal.BZQuadrature(int(cfg["M"]), pot.period)
    g_max = int(cfg["G_max"])
    t = float(cfg["t"])
    k0 = float(cfg["twist_k"])
    checks = []

    kk = crystal.kk_kernel(pot, k0, t, grid, g_max=g_max)
    serialization.write_kernel(out_dir / "kk_kernel.bin", kk, 0.0, t, k0 * pot.period)
    ext = crystal.kk_extended_rows(pot, k0, t, grid, 1, g_max)
    twist_defect = float(np.max(np.abs(ext - np.exp(1j * k0 * pot.period) * kk)))
    checks.append(
        {"name": "kk_twist_boundary", "pass": twist_defect <= tol["twist"], "max_defect": twist_defect,
         "tolerance": tol["twist"]}
    )

    m_list = [int(m) for m in cfg["R_cells"]]
    for m in m_list:
        k_r = crystal.kr_kernel_bz(pot, m, t, grid, quad, g_max)
        serialization.write_kernel(out_dir / f"kr_m{m}.bin", k_r, 0.0, t, 0.0)
    shifted_rows = crystal.kr_kernel_bz(pot, 0, t, grid, quad, g_max, shift_cells=1)
    k_r1 = crystal.kr_kernel_bz(pot, 1, t, grid, quad, g_max)
    shift_defect = float(np.max(np.abs(shifted_rows - k_r1)))
    checks.append(
        {"name": "kr_shift_relation", "pass": shift_defect <= tol["shift"], "max_defect": shift_defect,
         "tolerance": tol["shift"]}
    )

    m_max = int(cfg["fourier_m_max"])
    quad_exact = crystal.BZQuadrature(2 * m_max + 1, pot.period)
    kernels_by_m = {
        m: crystal.kr_kernel_bz(pot, m, t, grid, quad_exact, g_max) for m in range(-m_max, m_max + 1)
    }
    pair_defect = 0.0
    for k in quad_exact.nodes:
        back = crystal.forward_sector_sum(kernels_by_m, k, pot.period)
        kk_node = crystal.kk_kernel(pot, k, t, grid, g_max=g_max)
        pair_defect = max(pair_defect, float(np.max(np.abs(back - kk_node))))
    checks.append(
        {"name": "fourier_pair_consistency", "pass": pair_defect <= tol["fourier_pair"],
         "max_defect": pair_defect, "tolerance": tol["fourier_pair"]}
    )

    for report in crystal.verify_kbar_suite(
        pot,
        m_list,
        t,
        grid,
        quad,
        g_max,
        n_line_cells=int(cfg["n_line_cells"]),
        split_steps=int(cfg["split_steps"]),
        sigma=float(cfg["sigma"]),
        tolerance=tol["kbar"],
    ):
        checks.append(report.to_dict() | {"name": report.name})

    payload = {
        "subcommand": "crystal-propagator",
        "pass": all(c["pass"] for c in checks),
        "checks": checks,
        "seed": seed,
    }
    _write_report(out_dir, "crystal_report.json", payload)
    return EXIT_OK if payload["pass"] else EXIT_PHYSICS


RUNNERS = {
    "group-check": run_group_check,
    "ring-evolve": run_ring_evolve,
    "sector-extract": run_sector_extract,
    "bands": run_bands,
    "crystal-propagator": run_crystal_propagator,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sectorlab",
        description="Homotopy-sector propagator laboratory: batch experiments.",
        epilog=(
            "exit codes: 0 all checks passed; 1 physics-check failure; "
            "2 config error; 3 numerical-certification error"
        ),
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in [*RUNNERS, "all"]:
        p = sub.add_parser(name, help=f"run the {name} experiment" if name != "all" else "run every experiment")
        p.add_argument("--config", default=None, help="JSON config path (defaults are built in)")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--seed", type=int, default=0, help="seed for randomized checks")
        p.add_argument("--workers", type=int, default=1, help="worker threads for independent cells")
        p.add_argument(
            "--tolerance-profile",
            choices=sorted(TOLERANCES),
            default="default",
            help="tolerance table used for pass/fail decisions",
        )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    tol = TOLERANCES[args.tolerance_profile]
    out_root = Path(args.out)

    names = list(RUNNERS) if args.subcommand == "all" else [args.subcommand]
    worst = EXIT_OK
    for name in names:
        out_dir = out_root / name if args.subcommand == "all" else out_root
        try:
            cfg = load_config(name, args.config if args.subcommand != "all" else None)
        except ConfigError as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        out_dir.mkdir(parents=True, exist_ok=True)
        try:
            code = RUNNERS[name](cfg, out_dir, args.seed, args.workers, tol)
        except CERTIFICATION_ERRORS as exc:
            print(f"certification error in {name}: {exc}", file=sys.stderr)
            serialization.write_json(
                out_dir / "error.json",
                {"subcommand": name, "error": type(exc).__name__, "message": str(exc)},
            )
            code = EXIT_CERTIFICATION
        except ConfigError as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        except SectorLabError as exc:
            print(f"error in {name}: {exc}", file=sys.stderr)
            code = EXIT_CERTIFICATION
        status = {EXIT_OK: "pass", EXIT_PHYSICS: "FAIL", EXIT_CERTIFICATION: "CERTIFICATION-FAIL"}[code]
        print(f"{name}: {status}")
        worst = max(worst, code)
    return worst


if __name__ == "__main__":
    sys.exit(main())
