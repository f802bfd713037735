"""Report figures rendered with matplotlib (Agg, file output only)."""

from __future__ import annotations

import math
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .clocking import ClockProgram
from .energy import BOLTZMANN, DragModel, drag_energy_per_joint
from .kinematics import LockGeometry, lock_connecting_vector


def plot_clock_program(program: ClockProgram, path: str | Path) -> Path:
    """Four-phase waveform plot over one cycle."""
    t = np.linspace(0.0, 1.0, 801)
    fig, ax = plt.subplots(figsize=(7, 3))
    for p in range(4):
        ax.plot(t, [program.value(p, x) for x in t], label=f"phase {p}")
    ax.set_xlabel("cycle time")
    ax.set_ylabel("amplitude")
    ax.set_ylim(-0.05, 1.1)
    ax.legend(loc="upper right", ncol=4, fontsize=8)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_spring_energy(geom: LockGeometry, path: str | Path,
                       samples: int = 121) -> Path:
    """Level sets of the lock spring energy over the two input angles.

    The zero-energy axes are the two single-input branches; the steep walls
    off-axis are what locks the inactive input.
    """
    half = math.pi / 2
    thetas = np.linspace(-half, half, samples)
    V = np.empty((samples, samples))
    for i, t1 in enumerate(thetas):
        for j, t0 in enumerate(thetas):
            d = lock_connecting_vector(t0, t1, geom.L).norm()
            V[i, j] = 0.5 * geom.k * (d - geom.r) ** 2
    fig, ax = plt.subplots(figsize=(5, 4.2))
    levels = np.linspace(0.0, V.max(), 21)[1:]
    cs = ax.contour(np.degrees(thetas), np.degrees(thetas), V, levels=levels,
                    cmap="viridis", linewidths=0.9)
    ax.axhline(0, color="#999999", lw=0.6)
    ax.axvline(0, color="#999999", lw=0.6)
    ax.set_xlabel("input 0 angle [deg]")
    ax.set_ylabel("input 1 angle [deg]")
    ax.set_title("lock spring energy")
    fig.colorbar(cs, ax=ax, shrink=0.85)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_drag_energy(model: DragModel, path: str | Path,
                     temperature: float = 300.0) -> Path:
    """Per-joint dissipation versus operating frequency, with kT for scale."""
    f = np.logspace(3, 12, 200)
    e = [drag_energy_per_joint(model, x) for x in f]
    fig, ax = plt.subplots(figsize=(6, 3.6))
    ax.loglog(f, e, label="per joint")
    ax.loglog(f, [v * model.joints_per_op for v in e],
              label=f"per operation ({model.joints_per_op} joints)")
    kt = BOLTZMANN * temperature
    ax.axhline(kt, color="#b04030", ls="--", lw=1.0,
               label=f"kT at {temperature:g} K")
    ax.axhline(kt * math.log(2), color="#b04030", ls=":", lw=1.0,
               label="kT ln 2")
    ax.set_xlabel("frequency [Hz]")
    ax.set_ylabel("energy [J]")
    ax.legend(fontsize=8)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
