"""Behavioral state machines for the two higher-level structures.

A lock is two coupled four-bar linkages; once either input is raised the
other is kinematically forbidden, so the joint state (1, 1) does not exist.
A balance is a three-joint link whose center is actuated while its ends
route the motion toward whichever side is not blocked by a locked lock.
These pure transition functions are the semantic layer the gate and
shift-register simulators are built on; :func:`crosscheck_lock` ties them
back to the constraint engine.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable

from .errors import (
    BindingDetected,
    BindingViolation,
    BothSidesFree,
    BothSidesLocked,
    CrosscheckFailed,
    LinkLogicError,
)
from .kinematics import LockGeometry, assemble, drive, lock_mechanism


@dataclass(frozen=True)
class LockState:
    """Input pair of one lock; (1, 1) is unrepresentable."""

    input0: int = 0
    input1: int = 0

    def __post_init__(self):
        if self.input0 not in (0, 1) or self.input1 not in (0, 1):
            raise ValueError("lock inputs are binary")
        if self.input0 == 1 and self.input1 == 1:
            raise BindingViolation("lock state (1, 1) is not possible")

    def side(self, index: int) -> int:
        if index == 0:
            return self.input0
        if index == 1:
            return self.input1
        raise ValueError("lock side must be 0 or 1")


def lock_set(state: LockState, side: int, value: int) -> LockState:
    """Move one lock input; raising a side is only possible from (0, 0).

    Raising a side while the other is up is a :class:`BindingViolation` --
    it signals a netlist logic error, not a recoverable condition.
    Lowering is always allowed (no-op when already down).
    """
    if side not in (0, 1):
        raise ValueError("lock side must be 0 or 1")
    if value not in (0, 1):
        raise ValueError("lock input value is binary")
    other = state.side(1 - side)
    if value == 1 and other == 1:
        raise BindingViolation(
            f"cannot raise side {side}: side {1 - side} is raised")
    if side == 0:
        return replace(state, input0=value)
    return replace(state, input1=value)


def lock_is_locked(state: LockState, side: int) -> bool:
    """A side is locked exactly when the opposite input is raised."""
    return state.side(1 - side) == 1


@dataclass(frozen=True)
class BalanceState:
    """Balance with its two sides coupled to locks.

    Outputs are mutually exclusive and both zero whenever the input is zero.
    """

    input: int = 0
    side0_locked: bool = False
    side1_locked: bool = False
    output0: int = 0
    output1: int = 0

    def __post_init__(self):
        if self.output0 == 1 and self.output1 == 1:
            raise ValueError("balance outputs are mutually exclusive")
        if self.input == 0 and (self.output0 == 1 or self.output1 == 1):
            raise ValueError("outputs must be zero while the input is zero")


def balance_actuate(state: BalanceState) -> BalanceState:
    """Drive the balance input 0 -> 1; motion exits on the free side.

    Actuating with both sides free means the data was blank and the clock
    should never have been driven (:class:`BothSidesFree`); with both
    locked, the data pair was forbidden (:class:`BothSidesLocked`).
    """
    if state.input == 1:
        raise ValueError("balance input is already raised")
    if state.side0_locked and state.side1_locked:
        raise BothSidesLocked("both balance sides are locked")
    if not state.side0_locked and not state.side1_locked:
        raise BothSidesFree("neither balance side is locked")
    if state.side0_locked:
        return replace(state, input=1, output0=0, output1=1)
    return replace(state, input=1, output0=1, output1=0)


def balance_deactuate(state: BalanceState) -> BalanceState:
    """Return the input to 0; both outputs retract."""
    return replace(state, input=0, output0=0, output1=0)


# -- behavioral / kinematic crosscheck -------------------------------------

@dataclass(frozen=True)
class CrosscheckEntry:
    state: tuple[int, int]
    check: str
    passed: bool
    note: str = ""


@dataclass(frozen=True)
class CrosscheckReport:
    entries: tuple[CrosscheckEntry, ...]

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)

    def summary(self) -> str:
        lines = []
        for e in self.entries:
            flag = "PASS" if e.passed else "FAIL"
            note = f" ({e.note})" if e.note else ""
            lines.append(f"{flag}  state={e.state} {e.check}{note}")
        return "\n".join(lines)


def crosscheck_lock(geom: LockGeometry, *, steps: int = 12,
                    raise_on_divergence: bool = True) -> CrosscheckReport:
    """Validate the behavioral lock against the constraint engine.

    For each behavioral state {(0,0), (1,0), (0,1)} the canonical lock
    mechanism is driven to the matching angles and the engine must agree
    with :func:`lock_is_locked`: the state is reachable from home, and
    raising the opposite input from there binds.  Geometry problems
    (e.g. a connecting link that cannot assemble) are recorded as failed
    entries; an actual disagreement between the two levels raises
    :class:`CrosscheckFailed`.
    """
    entries: list[CrosscheckEntry] = []
    rig = lock_mechanism(geom, connected=True)
    t_on = geom.theta_on

    try:
        home = assemble(rig.mechanism, rig.home)
        a0, a1 = rig.input_angles(home)
        if abs(a0) > 1e-6 or abs(a1) > 1e-6:
            raise LinkLogicError(f"home settled at ({a0:.3g}, {a1:.3g})")
    except LinkLogicError as exc:
        entries.append(CrosscheckEntry((0, 0), "assemble home", False, str(exc)))
        return CrosscheckReport(tuple(entries))
    entries.append(CrosscheckEntry((0, 0), "assemble home", True))

    for state in ((1, 0), (0, 1)):
        raised = 0 if state[0] else 1
        opposite = 1 - raised
        target = rig.targets(theta0=t_on * state[0], theta1=t_on * state[1])
        try:
            leaned = drive(rig.mechanism, home, target, steps=steps)
        except LinkLogicError as exc:
            entries.append(CrosscheckEntry(state, "reach from home", False, str(exc)))
            continue
        entries.append(CrosscheckEntry(state, "reach from home", True))

        behavioral = lock_is_locked(LockState(*state), opposite)
        opp_target = (rig.targets(theta0=t_on) if opposite == 0
                      else rig.targets(theta1=t_on))
        try:
            drive(rig.mechanism, leaned, opp_target, steps=steps)
            kinematic_locked = False
        except BindingDetected:
            kinematic_locked = True
        agree = kinematic_locked == behavioral
        entries.append(CrosscheckEntry(
            state, f"raising side {opposite} binds", agree,
            "" if agree else
            f"behavioral locked={behavioral}, kinematic locked={kinematic_locked}"))
        if not agree and raise_on_divergence:
            raise CrosscheckFailed(
                f"lock levels diverge at state {state}", state=state)

        try:
            back = drive(rig.mechanism, leaned, rig.targets(0.0, 0.0), steps=steps)
            b0, b1 = rig.input_angles(back)
            ok = abs(b0) < 1e-6 and abs(b1) < 1e-6
        except LinkLogicError:
            ok = False
        entries.append(CrosscheckEntry(state, "return to home", ok))
        if not ok and raise_on_divergence:
            raise CrosscheckFailed(
                f"cannot return to (0, 0) from {state}", state=state)

    return CrosscheckReport(tuple(entries))
