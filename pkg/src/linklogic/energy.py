"""Closed-form estimators for molecular- and MEMS-scale implementations.

Rotary-joint friction is velocity-proportional, so the energy dissipated by
a fixed rotation scales with speed and the energy-time product is a
constant of the joint.  These estimators parameterize that behaviour plus
the inertial loads of a sinusoidally moving lock and the transistor
equivalence of a flexure-based die layout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

BOLTZMANN = 1.380649e-23  # J/K


@dataclass(frozen=True)
class DragModel:
    """Rotary-joint drag: coefficient, joints per operation, stroke angle.

    The default coefficient reproduces 2.4e-27 J per joint at 100 MHz for a
    one-radian stroke; it is a configuration parameter, not a constant of
    nature.
    """

    k_rd: float = 2.4e-35        # J*s/rad^2
    joints_per_op: int = 10
    phi: float = 1.0             # rad per operation

    def __post_init__(self):
        if self.k_rd <= 0 or self.joints_per_op <= 0 or self.phi <= 0:
            raise ValueError("drag model parameters must be positive")


@dataclass(frozen=True)
class InertialModel:
    """Sinusoidally moving mass: p(t) = A sin(2 pi f t)."""

    m: float = 9e-22             # kg
    A: float = 10e-9             # m
    f: float = 100e6             # Hz
    k_lateral: float = 13.0      # N/m

    def __post_init__(self):
        if self.m <= 0 or self.A < 0 or self.f <= 0 or self.k_lateral <= 0:
            raise ValueError("inertial model parameters must be positive")


def drag_energy_per_joint(model: DragModel, f: float) -> float:
    """Energy dissipated per joint per operation at frequency ``f``.

    One stroke of ``phi`` radians performed in one period 1/f:
    E = k_rd * phi^2 * f.
    """
    if f <= 0:
        raise ValueError("frequency must be positive")
    return model.k_rd * model.phi ** 2 * f


def energy_time_product(model: DragModel) -> float:
    """Joules-seconds per operation; frequency cancels out."""
    return model.joints_per_op * model.k_rd * model.phi ** 2


@dataclass(frozen=True)
class InertialAnalysis:
    v_max: float       # m/s
    a_max: float       # m/s^2
    f_max: float       # N
    deflection: float  # m


def inertial_analysis(model: InertialModel) -> InertialAnalysis:
    """Peak speed, acceleration, force and lateral joint deflection."""
    v = 2 * math.pi * model.f * model.A
    a = 4 * math.pi ** 2 * model.f ** 2 * model.A
    force = model.m * a
    return InertialAnalysis(v_max=v, a_max=a, f_max=force,
                            deflection=force / model.k_lateral)


def landauer_context(temperature: float) -> tuple[float, float]:
    """(kT, kT ln 2) at the given temperature, in joules."""
    if temperature <= 0:
        raise ValueError("temperature must be positive")
    kt = BOLTZMANN * temperature
    return kt, kt * math.log(2)


def mems_density(die_side: float, cell_w: float, cell_h: float,
                 transistors_per_cell: int) -> int:
    """Transistor equivalents on a square die tiled with logic cells."""
    if min(die_side, cell_w, cell_h) <= 0 or transistors_per_cell <= 0:
        raise ValueError("dimensions must be positive")
    cells = math.floor(die_side ** 2 / (cell_w * cell_h))
    return cells * transistors_per_cell
