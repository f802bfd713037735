"""Planar rigid-link constraint engine.

A mechanism is a set of rigid links joined by revolute joints; some joints
are anchored to the ground frame.  Every link carries three pose coordinates
(x, y, angle) and every joint contributes two coincidence residuals.  The
engine assembles configurations with a damped Newton iteration, drives
designated input coordinates quasi-statically by continuation, and measures
mobility as ``3 * n_links - rank(J)`` with a numerical SVD rank.

Grubler counting is deliberately not used anywhere: the mobile five-link
parallelogram is paradoxical (the count predicts zero degrees of freedom
while the true mobility is one), and the numeric rank handles it uniformly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

import numpy as np

from ..errors import BindingDetected, NoConvergence
from .vec import Vec2

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 100
RANK_RTOL = 1e-8

_COORD_OFFSETS = {"x": 0, "y": 1, "angle": 2}


@dataclass(frozen=True)
class RigidLink:
    """A stiff truss-like body with joint attachment points in its own frame."""

    name: str
    points: tuple[Vec2, ...]

    def __post_init__(self):
        if len(self.points) < 1:
            raise ValueError(f"link {self.name!r} needs at least one attachment point")
        for i in range(len(self.points)):
            for j in range(i + 1, len(self.points)):
                if (self.points[i] - self.points[j]).norm() == 0.0:
                    raise ValueError(
                        f"link {self.name!r} has coincident attachment points {i} and {j}"
                    )


@dataclass(frozen=True)
class Joint:
    """Revolute joint: either link-to-link or link-to-ground (anchored).

    An anchored joint pins ``(link_a, point_a)`` to the fixed world position
    ``anchor``; otherwise the joint forces coincidence of ``(link_a, point_a)``
    and ``(link_b, point_b)``.  Only relative rotation remains in both cases.
    """

    link_a: str
    point_a: int
    link_b: str | None = None
    point_b: int | None = None
    anchor: Vec2 | None = None

    def __post_init__(self):
        if self.anchored == (self.link_b is not None):
            raise ValueError("joint must have exactly one of link_b or anchor")

    @property
    def anchored(self) -> bool:
        return self.anchor is not None


@dataclass(frozen=True)
class DriveCoord:
    """One pose coordinate of one link, designated as a mechanism input."""

    link: str
    coord: str = "angle"

    def __post_init__(self):
        if self.coord not in _COORD_OFFSETS:
            raise ValueError(f"unknown drive coordinate {self.coord!r}")


@dataclass(frozen=True)
class Pose:
    x: float
    y: float
    angle: float


@dataclass(frozen=True)
class Configuration:
    """Pose per link (aligned with ``Mechanism.links``) plus the residual."""

    poses: tuple[Pose, ...]
    residual: float


@dataclass(frozen=True)
class Mechanism:
    links: tuple[RigidLink, ...]
    joints: tuple[Joint, ...]
    driven: tuple[DriveCoord, ...] = ()

    def __post_init__(self):
        names = [l.name for l in self.links]
        if len(set(names)) != len(names):
            raise ValueError("duplicate link names")
        index = {n: i for i, n in enumerate(names)}
        anchored_links: set[str] = set()
        adjacency: dict[str, set[str]] = {n: set() for n in names}
        for j in self.joints:
            self._check_ref(index, j.link_a, j.point_a)
            if j.anchored:
                anchored_links.add(j.link_a)
            else:
                assert j.link_b is not None and j.point_b is not None
                self._check_ref(index, j.link_b, j.point_b)
                adjacency[j.link_a].add(j.link_b)
                adjacency[j.link_b].add(j.link_a)
        if not anchored_links:
            raise ValueError("mechanism has no anchored joint; it would float freely")
        reached: set[str] = set()
        frontier = list(anchored_links)
        while frontier:
            n = frontier.pop()
            if n in reached:
                continue
            reached.add(n)
            frontier.extend(adjacency[n])
        missing = set(names) - reached
        if missing:
            raise ValueError(f"links not connected to ground: {sorted(missing)}")
        for d in self.driven:
            if d.link not in index:
                raise ValueError(f"driven coordinate references unknown link {d.link!r}")

    def _check_ref(self, index: dict[str, int], link: str, point: int) -> None:
        if link not in index:
            raise ValueError(f"joint references unknown link {link!r}")
        npts = len(self.links[index[link]].points)
        if not (0 <= point < npts):
            raise ValueError(f"joint references point {point} of link {link!r} (has {npts})")

    @cached_property
    def link_index(self) -> dict[str, int]:
        return {l.name: i for i, l in enumerate(self.links)}

    def coord_index(self, coord: DriveCoord) -> int:
        return 3 * self.link_index[coord.link] + _COORD_OFFSETS[coord.coord]

    def pose_of(self, config: Configuration, link: str) -> Pose:
        return config.poses[self.link_index[link]]

    def world_point(self, config: Configuration, link: str, point: int) -> Vec2:
        pose = self.pose_of(config, link)
        local = self.links[self.link_index[link]].points[point]
        return Vec2(pose.x, pose.y) + local.rotated(pose.angle)


# -- packing ---------------------------------------------------------------

def _pack(config: Configuration) -> np.ndarray:
    out = np.empty(3 * len(config.poses))
    for i, p in enumerate(config.poses):
        out[3 * i:3 * i + 3] = (p.x, p.y, p.angle)
    return out


def _unpack(mech: Mechanism, x: np.ndarray, residual: float) -> Configuration:
    poses = tuple(Pose(float(x[3 * i]), float(x[3 * i + 1]), float(x[3 * i + 2]))
                  for i in range(len(mech.links)))
    return Configuration(poses=poses, residual=residual)


def _world(mech: Mechanism, x: np.ndarray, link: str, point: int) -> tuple[float, float]:
    i = mech.link_index[link]
    px, py, a = x[3 * i], x[3 * i + 1], x[3 * i + 2]
    local = mech.links[i].points[point]
    c, s = math.cos(a), math.sin(a)
    return (px + c * local.x - s * local.y, py + s * local.x + c * local.y)


def residual_vector(mech: Mechanism, x: np.ndarray) -> np.ndarray:
    r = np.empty(2 * len(mech.joints))
    for k, j in enumerate(mech.joints):
        ax, ay = _world(mech, x, j.link_a, j.point_a)
        if j.anchored:
            bx, by = j.anchor.x, j.anchor.y
        else:
            bx, by = _world(mech, x, j.link_b, j.point_b)
        r[2 * k] = ax - bx
        r[2 * k + 1] = ay - by
    return r


def constraint_jacobian(mech: Mechanism, x: np.ndarray) -> np.ndarray:
    """Analytic Jacobian of the joint-coincidence residuals."""
    n = 3 * len(mech.links)
    J = np.zeros((2 * len(mech.joints), n))

    def fill(row: int, link: str, point: int, sign: float) -> None:
        i = mech.link_index[link]
        a = x[3 * i + 2]
        local = mech.links[i].points[point]
        c, s = math.cos(a), math.sin(a)
        J[row, 3 * i] += sign
        J[row + 1, 3 * i + 1] += sign
        # d(world)/d(angle) = dR/da . local
        J[row, 3 * i + 2] += sign * (-s * local.x - c * local.y)
        J[row + 1, 3 * i + 2] += sign * (c * local.x - s * local.y)

    for k, j in enumerate(mech.joints):
        fill(2 * k, j.link_a, j.point_a, 1.0)
        if not j.anchored:
            fill(2 * k, j.link_b, j.point_b, -1.0)
    return J


# -- solving ---------------------------------------------------------------

def _newton(mech: Mechanism, x0: np.ndarray, pinned: Mapping[int, float],
            tol: float, max_iter: int) -> np.ndarray:
    x = x0.copy()
    for idx, val in pinned.items():
        x[idx] = val
    free = np.array([i for i in range(x.size) if i not in pinned], dtype=int)

    r = residual_vector(mech, x)
    for _ in range(max_iter):
        if np.max(np.abs(r)) <= tol:
            return x
        J = constraint_jacobian(mech, x)[:, free]
        delta, *_ = np.linalg.lstsq(J, -r, rcond=None)
        # Damped step: halve on residual increase, give up below 2**-12.
        norm0 = float(np.linalg.norm(r))
        lam = 1.0
        while True:
            xt = x.copy()
            xt[free] += lam * delta
            rt = residual_vector(mech, xt)
            if float(np.linalg.norm(rt)) < norm0:
                x, r = xt, rt
                break
            lam *= 0.5
            if lam < 2.0 ** -12:
                raise NoConvergence(
                    f"residual stagnated at {norm0:.3e}", residual=norm0)
    if np.max(np.abs(r)) <= tol:
        return x
    raise NoConvergence(
        f"residual {np.max(np.abs(r)):.3e} above tol after {max_iter} iterations",
        residual=float(np.max(np.abs(r))))


def assemble(mech: Mechanism, initial_guess: Configuration, *,
             tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> Configuration:
    """Find a configuration satisfying all joint constraints near the guess.

    Damped Newton on the stacked coincidence constraints; the least-squares
    step is minimal-norm, so under-determined (mobile) mechanisms settle on
    the solution manifold closest to the guess.  Deterministic given the
    guess.  Raises :class:`NoConvergence` if the residual stagnates above
    ``tol``.
    """
    x = _newton(mech, _pack(initial_guess), {}, tol, max_iter)
    res = float(np.max(np.abs(residual_vector(mech, x))))
    return _unpack(mech, x, res)


def _resolve_targets(mech: Mechanism,
                     targets: Mapping[DriveCoord | str, float]) -> dict[DriveCoord, float]:
    resolved: dict[DriveCoord, float] = {}
    for key, val in targets.items():
        coord = DriveCoord(key) if isinstance(key, str) else key
        if coord not in mech.driven:
            raise ValueError(f"{coord} is not a driven coordinate of this mechanism")
        resolved[coord] = float(val)
    return resolved


def drive(mech: Mechanism, config: Configuration,
          targets: Mapping[DriveCoord | str, float], steps: int = 16, *,
          tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> Configuration:
    """Quasi-statically move driven coordinates to their targets.

    The targeted coordinates are linearly interpolated over ``steps``
    sub-steps; every sub-step pins all driven coordinates (targeted ones at
    the interpolated value, the rest held where they are, as physical
    actuators would) and re-solves the remaining coordinates starting from
    the previous sub-step.  A sub-step that fails to converge means the
    mechanism cannot follow the drive and raises :class:`BindingDetected`.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    goal = _resolve_targets(mech, targets)
    x = _pack(config)
    start = {c: x[mech.coord_index(c)] for c in mech.driven}
    for s in range(1, steps + 1):
        f = s / steps
        pinned: dict[int, float] = {}
        for c in mech.driven:
            if c in goal:
                pinned[mech.coord_index(c)] = start[c] + (goal[c] - start[c]) * f
            else:
                pinned[mech.coord_index(c)] = start[c]
        try:
            x = _newton(mech, x, pinned, tol, max_iter)
        except NoConvergence as exc:
            raise BindingDetected(
                f"drive bound at sub-step {s}/{steps}: {exc}",
                substep=s, fraction=f) from exc
    res = float(np.max(np.abs(residual_vector(mech, x))))
    return _unpack(mech, x, res)


def mobility(mech: Mechanism, config: Configuration, *,
             rank_rtol: float = RANK_RTOL) -> int:
    """Instantaneous degrees of freedom at a configuration.

    DOF = 3 * n_links - rank(J), with the rank taken numerically from the
    singular values of the constraint Jacobian (threshold ``rank_rtol``
    relative to the largest singular value).
    """
    x = _pack(config)
    J = constraint_jacobian(mech, x)
    if J.size == 0:
        return 3 * len(mech.links)
    sv = np.linalg.svd(J, compute_uv=False)
    smax = sv[0] if sv.size else 0.0
    rank = int(np.sum(sv > rank_rtol * smax)) if smax > 0 else 0
    return 3 * len(mech.links) - rank
