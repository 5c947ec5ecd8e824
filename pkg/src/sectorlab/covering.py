"""Concrete d-torus covering model: folding, path lifting, winding classes.

The base cell is [0, L_1) x ... x [0, L_d); the cover is R^d with the integer
lattice acting by translations on sheets. Discrete paths must move less than
half the smallest cell length per step so the minimal-image lift is the unique
continuous one. Punctured-plane (forbidden-region) models have no torus
analogue and are not implemented here.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np

from .errors import AmbiguousLiftError, MalformedWordError, NonLoopError


@dataclass(frozen=True)
class TorusCoveringModel:
    cell_lengths: tuple

    def __post_init__(self):
        lengths = tuple(float(L) for L in np.atleast_1d(np.asarray(self.cell_lengths, dtype=float)))
        if not lengths or any(L <= 0 for L in lengths):
            raise MalformedWordError("cell lengths must be positive")
        object.__setattr__(self, "cell_lengths", lengths)

    @property
    def d(self) -> int:
        return len(self.cell_lengths)

    @property
    def lengths(self) -> np.ndarray:
        return np.asarray(self.cell_lengths, dtype=float)


@dataclass(frozen=True)
class CoveringPoint:
    base: tuple
    sheet: tuple

    def unfolded(self, model: TorusCoveringModel) -> np.ndarray:
        return np.asarray(self.base) + np.asarray(self.sheet) * model.lengths


@dataclass(frozen=True)
class DiscretePath:
    """Base-cell samples at strictly monotone times.

    Ordinary paths carry increasing times; a time-reversed path carries the
    same samples in reverse order with decreasing times, which is what makes
    its action the exact negative (signed dt).
    """

    samples: np.ndarray  # (n, d) base points
    times: np.ndarray  # (n,)
    continuity_bound: float

    def __post_init__(self):
        samples = np.atleast_2d(np.asarray(self.samples, dtype=float))
        times = np.asarray(self.times, dtype=float)
        if samples.shape[0] != times.shape[0]:
            raise MalformedWordError("sample and time counts differ")
        if samples.shape[0] < 1:
            raise MalformedWordError("a path needs at least one sample")
        dt = np.diff(times)
        if dt.size and not (np.all(dt > 0) or np.all(dt < 0)):
            raise MalformedWordError("times must be strictly monotone")
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "continuity_bound", float(self.continuity_bound))

    @property
    def n_steps(self) -> int:
        return self.samples.shape[0] - 1

    def reversed(self) -> "DiscretePath":
        return DiscretePath(self.samples[::-1].copy(), self.times[::-1].copy(), self.continuity_bound)


def fold(x, model: TorusCoveringModel) -> CoveringPoint:
    """Project a cover point to (base in the cell, floor sheet)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape != (model.d,):
        raise MalformedWordError(f"point dimension {x.shape} does not match model d={model.d}")
    if not np.all(np.isfinite(x)):
        raise MalformedWordError("coordinates must be finite")
    L = model.lengths
    sheet = np.floor(x / L).astype(np.int64)
    base = x - sheet * L
    # guard the half-open convention against roundoff at the upper edge
    on_edge = base >= L
    sheet[on_edge] += 1
    base[on_edge] -= L[on_edge]
    return CoveringPoint(tuple(base), tuple(int(s) for s in sheet))


def minimal_image_displacement(b_from, b_to, model: TorusCoveringModel) -> np.ndarray:
    """Per-component displacement wrapped into [-L/2, L/2)."""
    L = model.lengths
    raw = np.asarray(b_to, dtype=float) - np.asarray(b_from, dtype=float)
    return raw - L * np.round(raw / L)


def _step_displacements(path: DiscretePath, model: TorusCoveringModel) -> np.ndarray:
    """Minimal-image displacements for every step, after validating the bound."""
    bound = path.continuity_bound
    if not (0 < bound < min(model.cell_lengths) / 2):
        raise AmbiguousLiftError(
            f"continuity bound {bound} must sit in (0, min L / 2) for unambiguous lifting"
        )
    L = model.lengths
    raw = np.diff(path.samples, axis=0)
    disp = raw - L * np.round(raw / L)
    if disp.size and np.max(np.abs(disp)) > bound:
        step = int(np.argmax(np.max(np.abs(disp), axis=1)))
        raise AmbiguousLiftError(
            f"step {step} moves {np.max(np.abs(disp)):.6g}, beyond the bound {bound:.6g}"
        )
    return disp


def validate_continuity(path: DiscretePath, model: TorusCoveringModel) -> None:
    _step_displacements(path, model)


def lift_path(path: DiscretePath, start_sheet, model: TorusCoveringModel) -> list:
    """Unique continuous lift starting on start_sheet (minimal-image steps)."""
    L = model.lengths
    start_sheet = np.asarray(start_sheet, dtype=np.int64)
    if start_sheet.shape != (model.d,):
        raise MalformedWordError("start sheet dimension mismatch")
    disp = _step_displacements(path, model)
    positions = path.samples[0] + start_sheet * L + np.vstack(
        [np.zeros(model.d), np.cumsum(disp, axis=0)]
    )
    # every lifted point projects exactly onto its base sample
    sheets = np.round((positions - path.samples) / L).astype(np.int64)
    return [
        CoveringPoint(tuple(base), tuple(int(s) for s in sheet))
        for base, sheet in zip(path.samples, sheets)
    ]


def winding_class(path: DiscretePath, model: TorusCoveringModel) -> np.ndarray:
    """Final minus initial sheet of the lift; additive under loop concatenation."""
    if not np.array_equal(path.samples[0], path.samples[-1]):
        raise NonLoopError("winding classes are defined for loops only")
    disp = _step_displacements(path, model)
    total = np.sum(disp, axis=0) if disp.size else np.zeros(path.samples.shape[1])
    return np.round(total / model.lengths).astype(np.int64)


def deck_transform(g, cp: CoveringPoint) -> CoveringPoint:
    """Sheet translation by the lattice element g; base untouched."""
    g = np.asarray(g, dtype=np.int64)
    return CoveringPoint(cp.base, tuple(int(s) for s in np.asarray(cp.sheet, dtype=np.int64) + g))


def concat_paths(p1: DiscretePath, p2: DiscretePath) -> DiscretePath:
    """Join p2 after p1; endpoints and junction times must match."""
    if not np.array_equal(p1.samples[-1], p2.samples[0]):
        raise MalformedWordError("paths do not share the junction point")
    if p1.times[-1] != p2.times[0]:
        raise MalformedWordError("paths do not share the junction time")
    return DiscretePath(
        np.vstack([p1.samples, p2.samples[1:]]),
        np.concatenate([p1.times, p2.times[1:]]),
        max(p1.continuity_bound, p2.continuity_bound),
    )


def resample_loop(path: DiscretePath, factor: int, model: TorusCoveringModel) -> DiscretePath:
    """Refine the time grid by an integer factor using minimal-image interpolation."""
    if factor < 1:
        raise MalformedWordError("refinement factor must be >= 1")
    samples = [path.samples[0]]
    times = [path.times[0]]
    L = model.lengths
    for i in range(path.n_steps):
        disp = minimal_image_displacement(path.samples[i], path.samples[i + 1], model)
        for j in range(1, factor + 1):
            frac = j / factor
            point = np.asarray(path.samples[i]) + frac * disp
            samples.append(point - L * np.floor(point / L))
            times.append(path.times[i] + frac * (path.times[i + 1] - path.times[i]))
    samples = np.array(samples)
    samples[-1] = path.samples[-1]  # keep loops exactly closed
    return DiscretePath(samples, np.array(times), path.continuity_bound)


def winding_report_json(path: DiscretePath, model: TorusCoveringModel) -> str:
    """JSON winding report for a loop: class, cell geometry, sample count."""
    winding = winding_class(path, model)
    doc = {
        "winding": [int(w) for w in winding],
        "cell_lengths": list(model.cell_lengths),
        "n_samples": int(path.samples.shape[0]),
        "continuity_bound": path.continuity_bound,
    }
    return json.dumps(doc, sort_keys=True)


def read_path_csv(path_file, model: TorusCoveringModel, continuity_bound: float) -> DiscretePath:
    """Rows (t, x_1..x_d) with cover coordinates; samples are folded to the cell."""
    times = []
    samples = []
    with open(path_file, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].lstrip().startswith("#") or row[0] in ("t", "time"):
                continue
            values = [float(v) for v in row]
            if len(values) != model.d + 1:
                raise MalformedWordError(
                    f"expected {model.d + 1} columns (t, x_1..x_d), got {len(values)}"
                )
            times.append(values[0])
            samples.append(fold(values[1:], model).base)
    return DiscretePath(np.array(samples), np.array(times), continuity_bound)
