"""Deterministic SVG rendering of mechanisms and chain traces.

Links are drawn as segments between the joint positions the constraint
engine produces; anchored joints get the circle-with-triangle ground
symbol.  All geometry is emitted with fixed two-decimal formatting at 100
pixels per length unit (origin bottom-left, y up), so identical states
produce byte-identical files.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .errors import IoFailure
from .gates import BLANK, DualRailValue
from .kinematics import (
    Configuration,
    LockGeometry,
    LockRig,
    assemble,
    drive,
    lock_mechanism,
)
from .primitives import LockState
from .sequential import ChainTrace, ShiftCell

SCALE = 100.0  # px per length unit
LINK_COLOR = "#20304a"
JOINT_COLOR = "#8090a8"
ACTIVE_COLOR = "#c03a2b"
GROUND_COLOR = "#606a78"

_config_cache: dict[tuple, Configuration] = {}


def _fmt(v: float) -> str:
    s = f"{v:.2f}"
    return "0.00" if s == "-0.00" else s


class SvgCanvas:
    """Minimal deterministic SVG writer with a y-up world frame."""

    def __init__(self, width: float, height: float, origin: tuple[float, float]):
        self.width = width
        self.height = height
        self.ox, self.oy = origin
        self.body: list[str] = []

    def to_px(self, x: float, y: float) -> tuple[float, float]:
        return (self.ox + SCALE * x, self.height - (self.oy + SCALE * y))

    def polyline(self, pts: Sequence[tuple[float, float]], color: str = LINK_COLOR,
                 width: float = 3.0, close: bool = False) -> None:
        px = [self.to_px(x, y) for x, y in pts]
        if close:
            px.append(px[0])
        coords = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in px)
        self.body.append(
            f'<polyline points="{coords}" stroke="{color}" '
            f'stroke-width="{_fmt(width)}" fill="none" stroke-linecap="round"/>')

    def circle(self, x: float, y: float, r: float, color: str = JOINT_COLOR,
               fill: str = "#ffffff") -> None:
        cx, cy = self.to_px(x, y)
        self.body.append(
            f'<circle cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="{_fmt(r)}" '
            f'stroke="{color}" stroke-width="1.50" fill="{fill}"/>')

    def ground_symbol(self, x: float, y: float) -> None:
        """Anchored joint: a circle with a triangle hanging below it."""
        cx, cy = self.to_px(x, y)
        r = 5.0
        self.body.append(
            f'<circle cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="{_fmt(r)}" '
            f'stroke="{GROUND_COLOR}" stroke-width="1.50" fill="#ffffff"/>')
        pts = [(cx - 7.0, cy + 13.0), (cx + 7.0, cy + 13.0), (cx, cy + r)]
        coords = " ".join(f"{_fmt(px)},{_fmt(py)}" for px, py in pts)
        self.body.append(
            f'<polygon points="{coords}" stroke="{GROUND_COLOR}" '
            f'stroke-width="1.50" fill="none"/>')

    def text(self) -> str:
        head = (
            '<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(self.width)}" '
            f'height="{_fmt(self.height)}" '
            f'viewBox="0 0 {_fmt(self.width)} {_fmt(self.height)}">\n'
            f'<rect width="{_fmt(self.width)}" height="{_fmt(self.height)}" '
            'fill="#ffffff"/>\n')
        return head + "\n".join(self.body) + "\n</svg>\n"


def _lock_configuration(geom: LockGeometry, theta0: float, theta1: float
                        ) -> tuple[LockRig, Configuration]:
    key = (geom.L, geom.r, geom.theta_on, round(theta0, 9), round(theta1, 9))
    rig = lock_mechanism(geom, connected=True)
    if key not in _config_cache:
        home = assemble(rig.mechanism, rig.home)
        if theta0 == 0.0 and theta1 == 0.0:
            _config_cache[key] = home
        else:
            _config_cache[key] = drive(
                rig.mechanism, home, rig.targets(theta0, theta1), steps=8)
    return rig, _config_cache[key]


def draw_mechanism(canvas: SvgCanvas, rig: LockRig, config: Configuration,
                   offset: tuple[float, float] = (0.0, 0.0),
                   scale: float = 1.0, active: bool = False) -> None:
    """Draw every link of a lock mechanism as segments between its joints."""
    mech = rig.mechanism
    color = ACTIVE_COLOR if active else LINK_COLOR

    def world(link: str, idx: int) -> tuple[float, float]:
        p = mech.world_point(config, link, idx)
        return (offset[0] + scale * p.x, offset[1] + scale * p.y)

    for link in mech.links:
        pts = [world(link.name, i) for i in range(len(link.points))]
        canvas.polyline(pts, color=color, close=len(pts) > 2)
    for joint in mech.joints:
        x, y = world(joint.link_a, joint.point_a)
        if joint.anchored:
            canvas.ground_symbol(x, y)
        else:
            canvas.circle(x, y, 3.5)


def render_lock_frame(geom: LockGeometry, theta0: float, theta1: float) -> str:
    """One SVG frame of the canonical lock at the given input angles."""
    L = geom.L
    width = SCALE * (4.0 * L) + 80
    height = SCALE * (3.6 * L) + 80
    canvas = SvgCanvas(width, height, origin=(40 + SCALE * 1.5 * L,
                                              40 + SCALE * 1.8 * L))
    rig, config = _lock_configuration(geom, theta0, theta1)
    active = theta0 != 0.0 or theta1 != 0.0
    draw_mechanism(canvas, rig, config, active=active)
    return canvas.text()


def _write_frames(frames: Iterable[str], out_dir: str | Path,
                  stem: str = "frame") -> list[Path]:
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        paths = []
        for i, text in enumerate(frames):
            path = out / f"{stem}_{i:04d}.svg"
            path.write_text(text, encoding="utf-8")
            paths.append(path)
        return paths
    except OSError as exc:
        raise IoFailure(f"cannot write frames to {out}: {exc}") from exc


def render_lock_states(geom: LockGeometry,
                       states: Sequence[tuple[int, int]],
                       out_dir: str | Path) -> list[Path]:
    """One frame per behavioral lock state, e.g. [(0,0), (1,0), (0,1)]."""
    t = geom.theta_on
    frames = (render_lock_frame(geom, t * s0, t * s1) for s0, s1 in states)
    return _write_frames(frames, out_dir)


# -- chain traces -----------------------------------------------------------------

_GLYPH_SCALE = 0.38          # lock glyph size relative to full scale
_CELL_W = 3.1                # world units per cell column
_COL_HOLD = 0.0
_COL_BAL = 1.25
_COL_OUT = 1.7


def _draw_lock_glyph(canvas: SvgCanvas, geom: LockGeometry, state: LockState,
                     offset: tuple[float, float]) -> None:
    t = geom.theta_on
    rig, config = _lock_configuration(geom, t * state.input0, t * state.input1)
    draw_mechanism(canvas, rig, config, offset=offset, scale=_GLYPH_SCALE,
                   active=state.input0 == 1 or state.input1 == 1)


def _draw_balance(canvas: SvgCanvas, state, offset: tuple[float, float]) -> None:
    x, y = offset
    tilt = 0.35 if state.output0 else (-0.35 if state.output1 else 0.0)
    half = 0.62
    dx, dy = half * math.sin(tilt), half * math.cos(tilt)
    color = ACTIVE_COLOR if state.input else LINK_COLOR
    canvas.polyline([(x - dx, y - dy), (x + dx, y + dy)], color=color, width=4.0)
    stub = 0.3 if state.input else 0.18
    canvas.polyline([(x, y), (x - stub, y)], color=color, width=3.0)
    for px, py in ((x - dx, y - dy), (x, y), (x + dx, y + dy)):
        canvas.circle(px, py, 3.5)


def render_cells_frame(cells: Sequence[ShiftCell],
                       geom: LockGeometry | None = None) -> str:
    """One SVG frame of a chain: holding locks, balance and output lock per cell."""
    geom = geom or LockGeometry()
    n = len(cells)
    width = SCALE * (_CELL_W * n + 0.8) + 80
    height = SCALE * 4.6 + 80
    canvas = SvgCanvas(width, height, origin=(40 + SCALE * 0.7, 40 + SCALE * 2.3))
    for k, cell in enumerate(cells):
        base = k * _CELL_W
        _draw_lock_glyph(canvas, geom, cell.hold0, (base + _COL_HOLD, 1.05))
        _draw_lock_glyph(canvas, geom, cell.hold1, (base + _COL_HOLD, -1.05))
        _draw_balance(canvas, cell.balance, (base + _COL_BAL, 0.0))
        _draw_lock_glyph(canvas, geom, cell.output, (base + _COL_OUT, 0.0))
    return canvas.text()


def render_chain_trace(trace: ChainTrace, out_dir: str | Path,
                       geom: LockGeometry | None = None,
                       initial: Sequence[ShiftCell] | None = None) -> list[Path]:
    """One SVG per trace event (plus an optional leading rest frame)."""
    snapshots: list[Sequence[ShiftCell]] = []
    if initial is not None:
        snapshots.append(tuple(initial))
    snapshots.extend(e.cells for e in trace.events)
    frames = (render_cells_frame(cells, geom) for cells in snapshots)
    return _write_frames(frames, out_dir)
