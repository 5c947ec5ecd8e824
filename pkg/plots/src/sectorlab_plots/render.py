"""The four figure kinds, one function each plus a dispatching ``render``."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from . import formats

KINDS = ("bands", "kernel_heatmap", "convergence", "theta_sweep")


def render_bands(in_path, out_path, title=None):
    k, bands, names = formats.read_bands(in_path)
    order = np.argsort(k)
    fig, ax = plt.subplots(figsize=(6, 4.5))
    for j, name in enumerate(names):
        ax.plot(k[order], bands[order, j], lw=1.3, label=name)
    ax.set_xlabel("quasimomentum k")
    ax.set_ylabel("band energy")
    ax.set_title(title or "band structure")
    if len(names) <= 8:
        ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out_path, dpi=130)
    plt.close(fig)


def render_kernel_heatmap(in_path, out_path, title=None):
    kernel, meta = formats.read_kernel(in_path)
    scale = float(np.max(np.abs(kernel))) or 1.0
    fig, axes = plt.subplots(1, 3, figsize=(11, 3.6))
    panels = [("Re K", kernel.real), ("Im K", kernel.imag), ("|K|", np.abs(kernel))]
    for ax, (label, values) in zip(axes, panels):
        if label == "|K|":
            im = ax.imshow(values, origin="lower", cmap="magma", vmin=0, vmax=scale)
        else:
            im = ax.imshow(values, origin="lower", cmap="RdBu_r", vmin=-scale, vmax=scale)
        ax.set_title(label)
        ax.set_xlabel("x_i index")
        ax.set_ylabel("x_f index")
        fig.colorbar(im, ax=ax, shrink=0.85)
    fig.suptitle(title or f"kernel, t = {meta['t_f'] - meta['t_i']:g}, theta = {meta['theta']:g}")
    fig.tight_layout()
    fig.savefig(out_path, dpi=130)
    plt.close(fig)


def render_convergence(in_path, out_path, title=None):
    cutoff, defect = formats.read_convergence(in_path)
    fig, ax = plt.subplots(figsize=(6, 4.5))
    positive = defect > 0
    ax.semilogy(cutoff[positive], defect[positive], "o-", ms=4)
    ax.set_xlabel("winding cutoff")
    ax.set_ylabel("L2 defect vs spectral")
    ax.set_title(title or "winding-sum convergence")
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(out_path, dpi=130)
    plt.close(fig)


def render_theta_sweep(in_path, out_path, title=None):
    theta, t, defects, names = formats.read_theta_sweep(in_path)
    fig, ax = plt.subplots(figsize=(6.5, 4.5))
    for t_value in sorted(set(t.tolist())):
        sel = t == t_value
        order = np.argsort(theta[sel])
        for j, name in enumerate(names):
            ax.semilogy(
                theta[sel][order],
                np.maximum(defects[sel][:, j][order], 1e-18),
                marker="o",
                ms=3,
                lw=1.0,
                label=f"{name}, t={t_value:g}",
            )
    ax.set_xlabel("twist angle theta")
    ax.set_ylabel("L2 defect")
    ax.set_title(title or "defects over the twist sweep")
    ax.legend(fontsize=7)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(out_path, dpi=130)
    plt.close(fig)


_RENDERERS = {
    "bands": render_bands,
    "kernel_heatmap": render_kernel_heatmap,
    "convergence": render_convergence,
    "theta_sweep": render_theta_sweep,
}


def render(kind: str, in_path, out_path, title=None):
    if kind not in _RENDERERS:
        raise formats.SchemaError(f"unknown figure kind {kind!r}; choose from {KINDS}")
    _RENDERERS[kind](in_path, out_path, title)
