"""Figure rendering for the CLI report paths (written next to the CSV/JSON)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["trajectory_figure", "depth_figure", "sweep_figure", "ode_figure",
           "conditions_figure"]


def trajectory_figure(record, path, comparison=None):
    """psi, energy drift and the Nehari functional along a simulation."""
    t = record.times
    fig, axes = plt.subplots(3, 1, figsize=(7, 8), sharex=True)

    ax = axes[0]
    psi = record.column("psi")
    ax.plot(t, psi, label="psi = |u|^2")
    if comparison is not None:
        ax.plot(t, comparison(t), "--", label="closed-form lower bound")
    if psi.max() > 0 and psi.max() / max(psi.min(), 1e-300) > 1e3:
        ax.set_yscale("log")
    ax.set_ylabel("psi")
    ax.legend(loc="best")
    title = record.verdict
    if record.T_blowup_est is not None:
        title += f" (T_est = {record.T_blowup_est:.6g})"
    ax.set_title(title)

    ax = axes[1]
    energies = record.column("E")
    ax.plot(t, energies - energies[0])
    ax.set_ylabel("E(t) - E(0)")
    ax.axvline(record.last_trusted_time, color="gray", ls=":", label="last trusted t")
    ax.legend(loc="best")

    ax = axes[2]
    ax.plot(t, record.column("I"))
    ax.axhline(0.0, color="gray", lw=0.8)
    ax.set_ylabel("I(u(t))")
    ax.set_xlabel("t")

    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def depth_figure(report, path):
    """Per-direction manifold minima against the certified bracket."""
    fig, ax = plt.subplots(figsize=(7, 4))
    vals = np.asarray(report.per_direction)
    ax.plot(np.arange(vals.size), vals, ".", ms=4, label="J at projected direction")
    ax.axhline(report.d_upper, color="C1", label=f"d_upper = {report.d_upper:.6g}")
    ax.axhline(report.d_lower, color="C3", ls="--", label=f"d_lower = {report.d_lower:.6g}")
    ax.set_xlabel("direction index")
    ax.set_ylabel("J")
    ax.set_yscale("log")
    ax.legend(loc="best")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def sweep_figure(rows, param_names, path):
    """Outcome overview across the sweep grid (first parameter on the axis)."""
    fig, ax = plt.subplots(figsize=(7, 4))
    if rows and len(param_names) >= 1:
        xs = [row[param_names[0]] for row in rows]
        numeric = all(isinstance(x, (int, float)) for x in xs)
        xs = xs if numeric else list(range(len(rows)))
        blew = [row["verdict"] == "blowup_detected" for row in rows]
        ax.scatter([x for x, b in zip(xs, blew) if b],
                   [1] * sum(blew), color="C3", label="blowup_detected")
        ax.scatter([x for x, b in zip(xs, blew) if not b],
                   [0] * (len(xs) - sum(blew)), color="C0", label="no blow-up")
        ax.set_xlabel(param_names[0] if numeric else "grid index")
    ax.set_yticks([0, 1])
    ax.set_yticklabels(["global/fault", "blow-up"])
    ax.legend(loc="center right")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def ode_figure(result, gamma, path):
    """psi(t) and the transformed variable z = psi^{1-gamma}."""
    fig, axes = plt.subplots(2, 1, figsize=(7, 6), sharex=True)
    finite = np.isfinite(result.psi)
    axes[0].plot(result.times[finite], result.psi[finite])
    axes[0].set_ylabel("psi")
    if finite.any() and result.psi[finite].max() > 1e3:
        axes[0].set_yscale("log")
    title = ("blow-up at t = %.6g" % result.blowup_time
             if result.blowup_time is not None else "no blow-up in window")
    axes[0].set_title(title)
    with np.errstate(over="ignore", invalid="ignore"):
        z = np.where(result.psi > 0, result.psi ** (1.0 - gamma), np.nan)
    axes[1].plot(result.times, z)
    axes[1].axhline(0.0, color="gray", lw=0.8)
    axes[1].set_ylabel("z = psi^(1-gamma)")
    axes[1].set_xlabel("t")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def conditions_figure(report, path):
    """Margins of the super-critical sufficient conditions."""
    fig, ax = plt.subplots(figsize=(7, 4))
    names = list(report.conditions)
    margins = [report.conditions[n].margin for n in names]
    colors = ["C2" if report.conditions[n].holds else "C3" for n in names]
    ax.barh(names, margins, color=colors)
    ax.axvline(0.0, color="gray", lw=0.8)
    ax.set_xlabel("margin (right side - left side)")
    ax.set_title(f"E0 = {report.E0:.6g}, class: {report.energy_class}")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
