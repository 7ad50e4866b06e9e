"""Figure rendering for run and report directories.

Figures are rendered headless to PNG files that sit next to the CSV
series they were drawn from; nothing here is interactive.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def _finish(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=140)
    plt.close(fig)


def plot_run_overview(log, path, title: str = "") -> None:
    """Six-panel trace: coordinates, velocities, errors, surface, torque, V."""
    fig, axes = plt.subplots(2, 3, figsize=(13, 7))
    t = log.t
    qr = log.q - log.e
    wr = log.qd - log.ed
    ax = axes[0, 0]
    for i in range(log.n):
        ax.plot(t, log.q[:, i], label=f"q{i + 1}")
        ax.plot(t, qr[:, i], "--", color="gray", linewidth=0.8)
    ax.set_ylabel("coordinates")
    ax.legend(fontsize="small")
    ax = axes[0, 1]
    for i in range(log.n):
        ax.plot(t, log.qd[:, i], label=f"qd{i + 1}")
        ax.plot(t, wr[:, i], "--", color="gray", linewidth=0.8)
    ax.set_ylabel("velocities")
    ax = axes[0, 2]
    for i in range(log.n):
        ax.plot(t, log.e[:, i], label=f"e{i + 1}")
    ax.set_ylabel("tracking error")
    ax.legend(fontsize="small")
    ax = axes[1, 0]
    for i in range(log.n):
        ax.plot(t, log.s[:, i], label=f"s{i + 1}")
    ax.set_ylabel("sliding vector")
    ax.set_xlabel("t [s]")
    ax = axes[1, 1]
    for i in range(log.n):
        ax.plot(t, log.tau[:, i], label=f"tau{i + 1}", linewidth=0.7)
    ax.set_ylabel("torque")
    ax.set_xlabel("t [s]")
    ax = axes[1, 2]
    pos = log.V > 0
    if pos.any():
        ax.semilogy(t[pos], log.V[pos], color="tab:red")
    ax.set_ylabel("V")
    ax.set_xlabel("t [s]")
    if title:
        fig.suptitle(title)
    _finish(fig, path)


def plot_phase(log, path) -> None:
    """Position-velocity portrait, one curve per coordinate."""
    fig, ax = plt.subplots(figsize=(5.5, 5))
    for i in range(log.n):
        ax.plot(log.q[:, i], log.qd[:, i], linewidth=0.9, label=f"coordinate {i + 1}")
        ax.plot(log.q[0, i], log.qd[0, i], "o", markersize=4, color="black")
    ax.plot(0, 0, "*", markersize=10, color="tab:red")
    ax.set_xlabel("position")
    ax.set_ylabel("velocity")
    ax.legend(fontsize="small")
    ax.grid(alpha=0.3)
    _finish(fig, path)


def plot_error_overlay(logs, path, title: str = "") -> None:
    """Max-norm error of every seeded run on one log-scale axis."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for log in logs:
        err = np.max(np.abs(log.e), axis=1)
        ax.semilogy(log.t, np.maximum(err, 1e-16),
                    linewidth=0.9, label=f"seed {log.meta.get('seed', '?')}")
    ax.set_xlabel("t [s]")
    ax.set_ylabel("max |e_i|")
    ax.grid(alpha=0.3)
    ax.legend(fontsize="x-small", ncol=2)
    if title:
        ax.set_title(title)
    _finish(fig, path)


def plot_energy_bars(rows, path) -> None:
    """Grouped bars of the [0, 10] s torque-norm integral per controller and seed."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    variants = ("ptsm", "tbg", "fixed")
    x = np.arange(len(rows))
    width = 0.25
    for k, v in enumerate(variants):
        ax.bar(x + (k - 1) * width, [r[v] for r in rows], width, label=v)
    ax.set_xticks(x, [f"seed {r['seed']}" for r in rows])
    ax.set_ylabel("energy  (integral of ||tau||)")
    ax.legend()
    ax.grid(alpha=0.3, axis="y")
    _finish(fig, path)
