"""Planar rigid-link kinematics: constraint solving, mobility, lock energetics."""

from .builders import (
    LOWER_INPUT,
    UPPER_INPUT,
    FourBarRig,
    LockRig,
    five_link,
    forced_parallel_guess,
    forced_parallel_infeasible,
    four_bar,
    lock_mechanism,
)
from .engine import (
    Configuration,
    DriveCoord,
    Joint,
    Mechanism,
    Pose,
    RigidLink,
    assemble,
    constraint_jacobian,
    drive,
    mobility,
    residual_vector,
)
from .lock import (
    LockGeometry,
    holding_advantage,
    lock_connecting_vector,
    spring_energy,
    spring_gradient,
)
from .vec import Vec2

__all__ = [
    "Configuration", "DriveCoord", "FourBarRig", "Joint", "LockGeometry",
    "LockRig", "LOWER_INPUT", "Mechanism", "Pose", "RigidLink", "UPPER_INPUT",
    "Vec2", "assemble", "constraint_jacobian", "drive", "five_link",
    "forced_parallel_guess", "forced_parallel_infeasible", "four_bar",
    "holding_advantage", "lock_connecting_vector", "lock_mechanism",
    "mobility", "residual_vector", "spring_energy", "spring_gradient",
]
