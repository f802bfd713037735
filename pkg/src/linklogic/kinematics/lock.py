"""Spring-flexibility model of the lock.

The ideal lock is two four-bar parallelogram linkages whose couplers are
tied together by a connecting link of the same length as the side links.
Replacing that link with a spring (stiffness ``k``, rest length ``r``)
turns the binding constraint into an energy landscape over the two input
angles.  Along either single-input branch the connecting vector keeps its
length exactly, so the landscape is identically zero on both axes; off the
axes it rises steeply in the direction of the locked input while staying
almost flat along the moved one, which is the mechanical-amplifier effect
that lets a small holding force resist a large applied force.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from ..errors import DegenerateAdvantage
from .vec import Vec2

THETA_ON_DEFAULT = math.pi / 4
_ZERO_PARTIAL = 1e-15


@dataclass(frozen=True)
class LockGeometry:
    """Dimensions and state of the canonical lock.

    ``L`` is the common side/connecting link length, ``k`` the spring
    stiffness, ``r`` the spring rest length, ``theta_on`` the angle that
    represents a logical one, and ``theta0``/``theta1`` the current input
    angles of the upper and lower four-bar linkage (zero = vertical,
    positive = rightward lean).
    """

    L: float = 1.0
    k: float = 1.0
    r: float = 1.0
    theta_on: float = THETA_ON_DEFAULT
    theta0: float = 0.0
    theta1: float = 0.0

    def __post_init__(self):
        if self.L <= 0 or self.k <= 0 or self.r <= 0:
            raise ValueError("L, k and r must be positive")
        half_pi = math.pi / 2 + 1e-12
        if abs(self.theta0) > half_pi or abs(self.theta1) > half_pi:
            raise ValueError("input angles limited to [-pi/2, pi/2]")

    def at(self, theta0: float, theta1: float) -> "LockGeometry":
        return replace(self, theta0=theta0, theta1=theta1)


def lock_connecting_vector(theta0: float, theta1: float, L: float = 1.0) -> Vec2:
    """Vector between the two spring endpoints of the canonical lock.

    Delta = L * (sin t0 - sin t1, cos t0 + cos t1 - 1).  Its norm equals L
    exactly whenever either input is zero, which is what makes the two
    single-input branches energy-free.
    """
    if L <= 0:
        raise ValueError("L must be positive")
    half_pi = math.pi / 2 + 1e-12
    if abs(theta0) > half_pi or abs(theta1) > half_pi:
        raise ValueError("input angles limited to [-pi/2, pi/2]")
    return Vec2(L * (math.sin(theta0) - math.sin(theta1)),
                L * (math.cos(theta0) + math.cos(theta1) - 1.0))


def spring_energy(geom: LockGeometry) -> float:
    """V = (k/2) * (|connecting vector| - r)^2 at the geometry's angles."""
    d = lock_connecting_vector(geom.theta0, geom.theta1, geom.L).norm()
    return 0.5 * geom.k * (d - geom.r) ** 2


def spring_gradient(geom: LockGeometry) -> tuple[float, float]:
    """Analytic (dV/dtheta0, dV/dtheta1).

    Using d(d^2)/dtheta0 = 2 L^2 (sin t0 - sin(t0+t1)) and the symmetric
    expression for theta1.  Matches central finite differences to a relative
    error of 1e-5 or better away from the rest manifold.
    """
    t0, t1 = geom.theta0, geom.theta1
    d = lock_connecting_vector(t0, t1, geom.L).norm()
    if d < 1e-12:
        raise ValueError("spring endpoints coincide; gradient undefined")
    common = geom.k * (d - geom.r) * geom.L ** 2 / d
    s01 = math.sin(t0 + t1)
    return (common * (math.sin(t0) - s01), common * (math.sin(t1) - s01))


def holding_advantage(geom: LockGeometry, theta_active: float, eps: float) -> float:
    """Force-amplification ratio |dV/dtheta1| / |dV/dtheta0| at (theta_active, eps).

    With the active input moved far from home and the other deflected by a
    small ``eps``, the restoring force on the deflected input dwarfs the
    reaction on the active one; the ratio grows without bound as eps -> 0.
    Querying on a branch axis (both partials zero) raises
    :class:`DegenerateAdvantage`.
    """
    if not (0.0 < eps <= 0.05):
        raise ValueError("eps must lie in (0, 0.05] rad")
    g0, g1 = spring_gradient(geom.at(theta_active, eps))
    if abs(g0) < _ZERO_PARTIAL and abs(g1) < _ZERO_PARTIAL:
        raise DegenerateAdvantage(
            f"both partials vanish at ({theta_active}, {eps}); branch-point query")
    return abs(g1) / abs(g0)
