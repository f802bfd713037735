"""Exception hierarchy shared by all linklogic subsystems."""

from __future__ import annotations


class LinkLogicError(Exception):
    """Base class for every error raised by this package."""


# -- kinematics ----------------------------------------------------------

class NoConvergence(LinkLogicError):
    """The constraint solver stagnated above tolerance."""

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


class BindingDetected(LinkLogicError):
    """A driven mechanism cannot follow its drive; it is locked."""

    def __init__(self, message: str, substep: int | None = None,
                 fraction: float | None = None):
        super().__init__(message)
        self.substep = substep
        self.fraction = fraction


class DegenerateAdvantage(LinkLogicError):
    """Holding-advantage query at the branch point; both partials vanish."""


# -- behavioral primitives -----------------------------------------------

class BindingViolation(LinkLogicError):
    """Attempt to raise one lock input while the other is raised."""


class BothSidesFree(LinkLogicError):
    """Balance actuated while neither side is locked (blank data)."""


class BothSidesLocked(LinkLogicError):
    """Balance actuated while both sides are locked (forbidden data)."""


class CrosscheckFailed(LinkLogicError):
    """Behavioral and kinematic lock models disagree."""

    def __init__(self, message: str, state: tuple[int, int] | None = None):
        super().__init__(message)
        self.state = state


# -- gates / netlists ----------------------------------------------------

class ForbiddenState(LinkLogicError):
    """A dual-rail pair is (1, 1)."""


class ScheduleViolation(LinkLogicError):
    """An actuation happened out of order (blank or forbidden data, bad clock)."""


class NotReversible(LinkLogicError):
    """Reverse evaluation requested on a netlist that is not invertible."""


# -- clocking ------------------------------------------------------------

class NonPeriodicProfile(LinkLogicError):
    """Cam profile does not describe one periodic revolution."""


# -- netlist documents / CLI ---------------------------------------------

class NetlistError(LinkLogicError):
    """Structural problem in a netlist or netlist document."""


class NetlistSyntaxError(NetlistError):
    """Malformed netlist source text."""

    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, col {column}: {message}")
        self.line = line
        self.column = column


class UnknownName(NetlistSyntaxError):
    """Reference to a name that was never declared."""


class DuplicateName(NetlistSyntaxError):
    """A name declared twice."""


class ForbiddenWiring(NetlistError):
    """A rail driven by more than one element within one clock phase."""

    def __init__(self, message: str, line: int | None = None,
                 column: int | None = None):
        if line is not None:
            message = f"line {line}, col {column}: {message}"
        super().__init__(message)
        self.line = line
        self.column = column


class IoFailure(LinkLogicError):
    """Filesystem problem while reading or writing artifacts."""
