"""Four-phase clock programs and their mechanical cam realization.

A clock program is one trapezoid waveform repeated on four phases offset by
a quarter cycle.  Two conditions make a program usable: adjacent phases
must be simultaneously at full amplitude for a positive duration (so a cell
can copy its predecessor's output before that output retracts), and each
phase must be completely inactive for a positive duration (so a cell's
holding area can be released and refilled).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

from .errors import NonPeriodicProfile

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class ClockProgram:
    """Piecewise-linear trapezoid over one cycle, as cycle fractions."""

    rise: float = 0.1
    high: float = 0.45
    fall: float = 0.1
    low: float = 0.35
    phase_count: int = 4

    def __post_init__(self):
        parts = (self.rise, self.high, self.fall, self.low)
        if any(p < 0 for p in parts):
            raise ValueError("waveform segments must be non-negative")
        if abs(sum(parts) - 1.0) > 1e-9:
            raise ValueError("rise + high + fall + low must equal 1")
        if self.high <= 0 or self.low <= 0:
            raise ValueError("high and low segments must be positive")
        if self.phase_count != 4:
            raise ValueError("only four-phase programs are supported")

    def offset(self, phase: int) -> float:
        return (phase % self.phase_count) / self.phase_count

    def value(self, phase: int, t: float) -> float:
        """Waveform amplitude in [0, 1] at cycle time ``t``."""
        tau = (t - self.offset(phase)) % 1.0
        if tau < self.rise:
            return tau / self.rise
        tau -= self.rise
        if tau < self.high:
            return 1.0
        tau -= self.high
        if tau < self.fall:
            return 1.0 - tau / self.fall
        return 0.0

    def full_on_interval(self, phase: int) -> tuple[float, float]:
        """(start, length) of the full-amplitude plateau, on the cycle circle."""
        return ((self.offset(phase) + self.rise) % 1.0, self.high)

    def off_interval(self, phase: int) -> tuple[float, float]:
        return ((self.offset(phase) + self.rise + self.high + self.fall) % 1.0,
                self.low)


DEFAULT_CLOCK = ClockProgram()


def _circular_intersection(a: tuple[float, float], b: tuple[float, float]) -> float:
    """Total overlap length of two intervals on the unit circle."""

    def segments(iv: tuple[float, float]) -> list[tuple[float, float]]:
        s, ln = iv[0] % 1.0, iv[1]
        if s + ln <= 1.0:
            return [(s, s + ln)]
        return [(s, 1.0), (0.0, s + ln - 1.0)]

    total = 0.0
    for a0, a1 in segments(a):
        for b0, b1 in segments(b):
            total += max(0.0, min(a1, b1) - max(a0, b0))
    return total


@dataclass(frozen=True)
class ClockReport:
    passed: bool
    overlap: float
    dwell: float
    messages: tuple[str, ...]

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        lines = [f"{status}  overlap={self.overlap:.4f}  dwell={self.dwell:.4f}"]
        lines.extend(f"  - {m}" for m in self.messages)
        return "\n".join(lines)


def validate_clock(program: ClockProgram) -> ClockReport:
    """Check adjacent-phase overlap and per-phase dwell.

    ``overlap`` is the time two neighbouring phases are both at full
    amplitude; ``dwell`` the time one phase is completely off.  Both must
    be positive for a PASS; the report carries the measured fractions and
    one message per violated condition.
    """
    overlap = min(
        _circular_intersection(program.full_on_interval(i),
                               program.full_on_interval((i + 1) % 4))
        for i in range(4))
    dwell = min(program.off_interval(i)[1] for i in range(4))
    messages = []
    if overlap <= 0.0:
        messages.append("adjacent phases are never simultaneously at full amplitude")
    if dwell <= 0.0:
        messages.append("phases are never completely inactive")
    return ClockReport(passed=not messages, overlap=overlap, dwell=dwell,
                       messages=tuple(messages))


# -- cams -------------------------------------------------------------------

@dataclass(frozen=True)
class CamProfile:
    """Radius-vs-angle samples over one revolution, linearly interpolated."""

    samples: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if len(self.samples) < 2:
            raise NonPeriodicProfile("a cam profile needs at least two samples")
        angles = [a for a, _ in self.samples]
        radii = [r for _, r in self.samples]
        if any(r <= 0 for r in radii):
            raise NonPeriodicProfile("cam radii must be positive")
        if any(b <= a for a, b in zip(angles, angles[1:])):
            raise NonPeriodicProfile("cam angles must be strictly increasing")
        if angles[0] < 0 or angles[-1] > TWO_PI + 1e-12:
            raise NonPeriodicProfile("cam angles must lie within one revolution")
        closes = abs(angles[-1] - TWO_PI) < 1e-12 and abs(angles[0]) < 1e-12
        if closes and abs(radii[0] - radii[-1]) > 1e-12:
            raise NonPeriodicProfile(
                "profile endpoints disagree; the cam surface would be discontinuous")

    def radius(self, angle: float) -> float:
        a = angle % TWO_PI
        pts = list(self.samples)
        # wrap the profile around the full circle
        first_a, first_r = pts[0]
        last_a, last_r = pts[-1]
        if a < first_a:
            span = first_a + TWO_PI - last_a
            f = (a + TWO_PI - last_a) / span
            return last_r + f * (first_r - last_r)
        if a >= last_a:
            span = first_a + TWO_PI - last_a
            f = (a - last_a) / span if span > 0 else 0.0
            return last_r + f * (first_r - last_r)
        for (a0, r0), (a1, r1) in zip(pts, pts[1:]):
            if a0 <= a < a1:
                f = (a - a0) / (a1 - a0)
                return r0 + f * (r1 - r0)
        return last_r


@dataclass(frozen=True)
class Waveform:
    """Normalized follower displacement of a cam, as a function of cycle time."""

    profile: CamProfile
    phase_offset: float

    def __call__(self, t: float) -> float:
        radii = [r for _, r in self.profile.samples]
        rmin, rmax = min(radii), max(radii)
        if rmax == rmin:
            return 0.0
        r = self.profile.radius(TWO_PI * t - self.phase_offset)
        return (r - rmin) / (rmax - rmin)

    def sample(self, n: int) -> list[float]:
        return [self(i / n) for i in range(n)]


def cam_waveform(profile: CamProfile | Sequence[tuple[float, float]],
                 phase_offset: float = 0.0) -> Waveform:
    """Follower displacement of a rotating cam, normalized to [0, 1].

    ``phase_offset`` is the cam's mounting angle in radians; four identical
    cams offset by pi/2 generate the four clock phases.
    """
    if not isinstance(profile, CamProfile):
        profile = CamProfile(tuple((float(a), float(r)) for a, r in profile))
    return Waveform(profile, phase_offset)


def trapezoid_cam_profile(program: ClockProgram, base_radius: float = 1.0,
                          amplitude: float = 0.5) -> CamProfile:
    """Cam whose follower reproduces one phase of the clock program exactly.

    Requires nonzero rise and fall segments; a square wave has no
    continuous cam surface.
    """
    if program.rise <= 0 or program.fall <= 0:
        raise NonPeriodicProfile("square waveforms cannot be cut into a cam")
    b, amp = base_radius, amplitude
    t1 = program.rise
    t2 = program.rise + program.high
    t3 = program.rise + program.high + program.fall
    pts = ((0.0, b), (t1, b + amp), (t2, b + amp), (t3, b), (1.0, b))
    return CamProfile(tuple((TWO_PI * t, r) for t, r in pts))
