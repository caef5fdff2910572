"""PNG figures for scenario outputs.

Rendering uses the non-interactive Agg backend, so it works headless.  The
figures are a convenience view of the CSV data; the CSV files remain the
primary output.
"""

import csv
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

GOLDEN = (np.sqrt(5) - 1.0) / 2.0

STYLE = {
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 7,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "lines.linewidth": 1.2,
    "lines.markersize": 3,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "savefig.dpi": 150,
}

LABELS = {
    "mean_photon": r"$\langle n \rangle$",
    "entropy": r"$S$ (bits)",
    "entropy_diff": r"$\Delta S$ (bits)",
    "offdiag": r"$\sum_{m\neq n}|\rho_{mn}|$",
}


def figure(ncols=1, width=3.4):
    """Figure with ``ncols`` panels side by side at golden aspect."""
    fig, axes = plt.subplots(1, ncols, figsize=(width * ncols, width * GOLDEN + 0.3),
                             squeeze=False)
    return fig, axes[0]


def save(fig, path):
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def _phase_label(phase):
    return r"$\phi=%.3g\pi$" % (phase / np.pi)


def plot_trajectories(trajs, columns, path, title=None):
    """One panel per column, one line per trajectory, against pass index j."""
    with plt.rc_context(STYLE):
        fig, axes = figure(len(columns))
        for ax, col in zip(axes, columns):
            for t in trajs:
                j = [r.j for r in t.records]
                y = [getattr(r, col) for r in t.records]
                label = _phase_label(t.phase) if t.phase is not None else t.label.replace("_", " ")
                ax.plot(j, y, marker="o", label=label)
            ax.set_xlabel(r"$j$")
            ax.set_ylabel(LABELS.get(col, col))
            if col == "entropy_diff":
                ax.axhline(0.0, color="0.6", lw=0.6)
        axes[0].legend(frameon=False)
        if title:
            fig.suptitle(title, fontsize=9)
        return save(fig, path)


def _read_table(path):
    with open(path) as fh:
        rows = [line for line in fh if not line.startswith("#")]
    return list(csv.DictReader(rows))


def plot_steady_table(csv_path, path):
    rows = _read_table(csv_path)
    with plt.rc_context(STYLE):
        fig, axes = figure(1, width=5.0)
        ax = axes[0]
        x = np.arange(len(rows))
        ax.bar(x - 0.2, [float(r["closed_form"]) for r in rows], 0.4, label="closed form")
        ax.bar(x + 0.2, [float(r["iterated"]) for r in rows], 0.4, label="iterated")
        ax.set_xticks(x)
        ax.set_xticklabels([r["label"] for r in rows], rotation=60, ha="right", fontsize=6)
        ax.set_ylabel(r"steady $\langle n \rangle$")
        ax.legend(frameon=False)
        return save(fig, path)


def plot_sweep(csv_path, path, column="mean_photon"):
    rows = _read_table(csv_path)
    phases = sorted({float(r["phase"]) for r in rows})
    xis = sorted({float(r["xi"]) for r in rows})
    grid = np.full((len(phases), len(xis)), np.nan)
    for r in rows:
        grid[phases.index(float(r["phase"])), xis.index(float(r["xi"]))] = float(r[column])
    with plt.rc_context(STYLE):
        fig, axes = figure(1)
        ax = axes[0]
        for k, xi in enumerate(xis):
            ax.plot(np.array(phases) / np.pi, grid[:, k], marker="o", label=r"$\xi=%g$" % xi)
        ax.set_xlabel(r"$\phi/\pi$")
        ax.set_ylabel(LABELS.get(column, column))
        ax.legend(frameon=False)
        return save(fig, path)


def render(cfg, out_dir, trajs, paths):
    """Figures for one scenario run; returns the PNG paths."""
    name = cfg.scenario
    out = []
    if name == "fig2":
        out.append(plot_trajectories(trajs, ("mean_photon", "entropy"),
                                     os.path.join(out_dir, "fig2.png")))
    elif name == "fig3":
        out.append(plot_trajectories(trajs, ("entropy",), os.path.join(out_dir, "fig3.png")))
    elif name == "fig4":
        out.append(plot_trajectories(trajs, ("entropy_diff",), os.path.join(out_dir, "fig4.png")))
    elif name == "steady_table":
        out.append(plot_steady_table(paths[0], os.path.join(out_dir, "steady_table.png")))
    else:
        out.append(plot_sweep(paths[0], os.path.join(out_dir, "sweep_mean_photon.png")))
        out.append(plot_sweep(paths[0], os.path.join(out_dir, "sweep_entropy.png"), "entropy"))
    return out
