"""Mechanism builders for the standard constructions.

Each builder returns a rig: the mechanism, its exact home configuration,
and the driven-coordinate bookkeeping needed to translate input angles
(measured from vertical, positive = rightward lean) into link orientation
angles.  Side links are modeled with their local axis pointing from the
anchor toward the coupler, so an input angle theta maps to an orientation
of -theta for upward links and +theta for downward links.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .engine import Configuration, DriveCoord, Joint, Mechanism, Pose, RigidLink
from .lock import LockGeometry
from .vec import Vec2


@dataclass(frozen=True)
class FourBarRig:
    mechanism: Mechanism
    home: Configuration
    input_coord: DriveCoord
    length: float
    span: float

    def targets(self, theta: float) -> dict[DriveCoord, float]:
        return {self.input_coord: -theta}

    def input_angle(self, config: Configuration) -> float:
        return -self.mechanism.pose_of(config, self.input_coord.link).angle


def four_bar(length: float = 1.0, span: float = 1.0) -> FourBarRig:
    """Parallelogram four-bar linkage: two side links plus a coupler."""
    L, w = length, span
    up = (Vec2(0.0, 0.0), Vec2(0.0, L))
    links = (
        RigidLink("left", up),
        RigidLink("right", up),
        RigidLink("coupler", (Vec2(0.0, 0.0), Vec2(w, 0.0))),
    )
    joints = (
        Joint("left", 0, anchor=Vec2(0.0, 0.0)),
        Joint("right", 0, anchor=Vec2(w, 0.0)),
        Joint("left", 1, "coupler", 0),
        Joint("right", 1, "coupler", 1),
    )
    mech = Mechanism(links, joints, driven=(DriveCoord("left"),))
    home = Configuration(
        poses=(Pose(0.0, 0.0, 0.0), Pose(w, 0.0, 0.0), Pose(0.0, L, 0.0)),
        residual=0.0,
    )
    return FourBarRig(mech, home, DriveCoord("left"), L, w)


def five_link(center_angle: float = 0.0, length: float = 1.0,
              span: float = 1.0) -> FourBarRig:
    """Parallelogram with a third, center link added between ground and coupler.

    With ``center_angle`` zero the extra link matches the side links and the
    linkage stays mobile; any other angle makes the legs fight over the
    coupler and the mechanism binds.
    """
    L, w = length, span
    a = center_angle
    up = (Vec2(0.0, 0.0), Vec2(0.0, L))
    links = (
        RigidLink("left", up),
        RigidLink("center", up),
        RigidLink("right", up),
        RigidLink("coupler", (Vec2(0.0, 0.0), Vec2(w / 2, 0.0), Vec2(w, 0.0))),
    )
    # Center anchor placed so the tilted link still reaches (w/2, L) at home.
    center_anchor = Vec2(w / 2 - L * math.sin(a), L - L * math.cos(a))
    joints = (
        Joint("left", 0, anchor=Vec2(0.0, 0.0)),
        Joint("center", 0, anchor=center_anchor),
        Joint("right", 0, anchor=Vec2(w, 0.0)),
        Joint("left", 1, "coupler", 0),
        Joint("center", 1, "coupler", 1),
        Joint("right", 1, "coupler", 2),
    )
    mech = Mechanism(links, joints, driven=(DriveCoord("left"),))
    home = Configuration(
        poses=(
            Pose(0.0, 0.0, 0.0),
            Pose(center_anchor.x, center_anchor.y, -a),
            Pose(w, 0.0, 0.0),
            Pose(0.0, L, 0.0),
        ),
        residual=0.0,
    )
    return FourBarRig(mech, home, DriveCoord("left"), L, w)


def forced_parallel_infeasible() -> Mechanism:
    """A chain that cannot assemble: legs 1.0, 1.0 and 1.2 on a rigid coupler.

    The two equal legs force the coupler to translate, which pins the third
    attachment point to a circle of radius 1.0 around its anchor; a 1.2 leg
    can never close the loop.
    """
    links = (
        RigidLink("leg_a", (Vec2(0.0, 0.0), Vec2(0.0, 1.0))),
        RigidLink("leg_c", (Vec2(0.0, 0.0), Vec2(0.0, 1.0))),
        RigidLink("leg_b", (Vec2(0.0, 0.0), Vec2(0.0, 1.2))),
        RigidLink("coupler", (Vec2(0.0, 0.0), Vec2(0.5, 0.0), Vec2(1.0, 0.0))),
    )
    joints = (
        Joint("leg_a", 0, anchor=Vec2(0.0, 0.0)),
        Joint("leg_c", 0, anchor=Vec2(0.5, 0.0)),
        Joint("leg_b", 0, anchor=Vec2(1.0, 0.0)),
        Joint("leg_a", 1, "coupler", 0),
        Joint("leg_c", 1, "coupler", 1),
        Joint("leg_b", 1, "coupler", 2),
    )
    return Mechanism(links, joints, driven=(DriveCoord("leg_a"),))


def forced_parallel_guess() -> Configuration:
    return Configuration(
        poses=(
            Pose(0.0, 0.0, 0.0),
            Pose(0.5, 0.0, 0.0),
            Pose(1.0, 0.0, 0.0),
            Pose(0.0, 1.0, 0.0),
        ),
        residual=float("nan"),
    )


UPPER_INPUT = DriveCoord("upper_left")
LOWER_INPUT = DriveCoord("lower_left")


@dataclass(frozen=True)
class LockRig:
    """Canonical lock mechanism: two facing four-bars, optional connecting link.

    The upper linkage's couplers sit above its anchors (anchor-to-coupler
    vector +(0, L) at home), the lower linkage is mirrored, and triangular
    projections bring the two spring-attachment points within (0, L) of
    each other at home.
    """

    mechanism: Mechanism
    home: Configuration
    geom: LockGeometry
    connected: bool
    p0: tuple[str, int]  # upper spring attachment (link, point index)
    p1: tuple[str, int]

    def targets(self, theta0: float | None = None,
                theta1: float | None = None) -> dict[DriveCoord, float]:
        out: dict[DriveCoord, float] = {}
        if theta0 is not None:
            out[UPPER_INPUT] = -theta0
        if theta1 is not None:
            out[LOWER_INPUT] = theta1
        return out

    def input_angles(self, config: Configuration) -> tuple[float, float]:
        t0 = -self.mechanism.pose_of(config, UPPER_INPUT.link).angle
        t1 = self.mechanism.pose_of(config, LOWER_INPUT.link).angle
        return (t0, t1)

    def spring_endpoints(self, config: Configuration) -> tuple[Vec2, Vec2]:
        a = self.mechanism.world_point(config, *self.p0)
        b = self.mechanism.world_point(config, *self.p1)
        return (a, b)


def lock_mechanism(geom: LockGeometry | None = None, *,
                   connected: bool = True) -> LockRig:
    """Build the canonical lock.

    With ``connected=False`` the connecting link is omitted so both inputs
    can be driven independently; this open variant is the kinematic oracle
    for the closed-form connecting-vector formula.
    """
    geom = geom or LockGeometry()
    L = geom.L
    w = L  # anchor spacing; any positive value works for a parallelogram
    up = (Vec2(0.0, 0.0), Vec2(0.0, L))
    down = (Vec2(0.0, 0.0), Vec2(0.0, -L))
    links = [
        RigidLink("upper_left", up),
        RigidLink("upper_right", up),
        RigidLink("upper_coupler", (Vec2(0.0, 0.0), Vec2(w, 0.0), Vec2(w / 2, -L))),
        RigidLink("lower_left", down),
        RigidLink("lower_right", down),
        RigidLink("lower_coupler", (Vec2(0.0, 0.0), Vec2(w, 0.0), Vec2(w / 2, L))),
    ]
    joints = [
        Joint("upper_left", 0, anchor=Vec2(0.0, L / 2)),
        Joint("upper_right", 0, anchor=Vec2(w, L / 2)),
        Joint("upper_left", 1, "upper_coupler", 0),
        Joint("upper_right", 1, "upper_coupler", 1),
        Joint("lower_left", 0, anchor=Vec2(0.0, -L / 2)),
        Joint("lower_right", 0, anchor=Vec2(w, -L / 2)),
        Joint("lower_left", 1, "lower_coupler", 0),
        Joint("lower_right", 1, "lower_coupler", 1),
    ]
    poses = [
        Pose(0.0, L / 2, 0.0),
        Pose(w, L / 2, 0.0),
        Pose(0.0, 1.5 * L, 0.0),
        Pose(0.0, -L / 2, 0.0),
        Pose(w, -L / 2, 0.0),
        Pose(0.0, -1.5 * L, 0.0),
    ]
    if connected:
        links.append(RigidLink("connector", (Vec2(0.0, 0.0), Vec2(0.0, -geom.r))))
        joints.append(Joint("connector", 0, "upper_coupler", 2))
        joints.append(Joint("connector", 1, "lower_coupler", 2))
        poses.append(Pose(w / 2, L / 2, 0.0))
    mech = Mechanism(tuple(links), tuple(joints), driven=(UPPER_INPUT, LOWER_INPUT))
    home = Configuration(poses=tuple(poses), residual=0.0)
    return LockRig(mech, home, geom, connected,
                   p0=("upper_coupler", 2), p1=("lower_coupler", 2))
