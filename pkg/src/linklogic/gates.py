"""Dual-rail combinational logic from locks, balances and routing elements.

A netlist is a set of named binary rails connected by four element kinds:

* ``Lock`` -- two sides, each tapping one or more rails.  Raising any rail
  of one side forbids the other side (mutual exclusion) and holds every
  rail tapped there.  A lock may also drive a pair of output rails that
  mirror its side states; that is how several cascade paths merge into one
  dual-rail output.
* ``Balance`` -- center rail in, two arm rails out.  When the center moves,
  the motion exits through whichever arm is not held by a locked lock.
* ``Fanout`` -- a bell-crank copy of one rail onto several.  Data is never
  shared between elements implicitly; every reuse goes through a fanout.
* ``Wire``/``Swap`` -- straight and crossed routing.  A swap between the two
  rails of a pair is how inversion is implemented.

Gates are decision trees of balances guarded by locks: the data inputs set
guard locks, a clock rail actuates the root balance, and the motion
cascades to exactly one leaf, which raises one side of the output lock.
Evaluation is quasi-static and ordered; each evaluation starts from rest,
so dropping the clock returns every output to blank.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence, Union

from .errors import (
    BindingViolation,
    BothSidesFree,
    BothSidesLocked,
    ForbiddenState,
    ForbiddenWiring,
    NetlistError,
    NotReversible,
    ScheduleViolation,
)
from .primitives import BalanceState, LockState, balance_actuate, lock_set


class DualRailValue(enum.Enum):
    """One logical bit on two rails: blank (0,0), zero (1,0), one (0,1)."""

    BLANK = (0, 0)
    ZERO = (1, 0)
    ONE = (0, 1)

    @property
    def rail0(self) -> int:
        return self.value[0]

    @property
    def rail1(self) -> int:
        return self.value[1]

    @classmethod
    def from_rails(cls, rail0: int, rail1: int) -> "DualRailValue":
        if rail0 == 1 and rail1 == 1:
            raise ForbiddenState("rail pair (1, 1) is forbidden")
        return cls((rail0, rail1))

    @classmethod
    def from_bit(cls, bit: "int | DualRailValue | None") -> "DualRailValue":
        if isinstance(bit, cls):
            return bit
        if bit is None:
            return cls.BLANK
        if bit in (0, 1):
            return cls.ONE if bit else cls.ZERO
        raise ValueError(f"cannot interpret {bit!r} as a dual-rail value")

    @property
    def bit(self) -> int | None:
        """0, 1, or None for blank."""
        if self is DualRailValue.BLANK:
            return None
        return 1 if self is DualRailValue.ONE else 0


BLANK = DualRailValue.BLANK
ZERO = DualRailValue.ZERO
ONE = DualRailValue.ONE


class GateKind(enum.Enum):
    NAND = "nand"
    NOR = "nor"
    XOR = "xor"
    OR = "or"
    AND = "and"
    XNOR = "xnor"
    NOT = "not"
    FREDKIN = "fredkin"
    FULL_ADDER = "fulladder"


# -- elements ---------------------------------------------------------------

@dataclass(frozen=True)
class Lock:
    name: str
    side0: tuple[str, ...]
    side1: tuple[str, ...]
    out0: str | None = None
    out1: str | None = None


@dataclass(frozen=True)
class Balance:
    name: str
    center: str
    arm0: str
    arm1: str


@dataclass(frozen=True)
class Fanout:
    name: str
    src: str
    dsts: tuple[str, ...]


@dataclass(frozen=True)
class Wire:
    name: str
    src: str
    dst: str


@dataclass(frozen=True)
class Swap:
    """Crossed routing: b0 = a1 and b1 = a0."""

    name: str
    a0: str
    a1: str
    b0: str
    b1: str


Element = Union[Lock, Balance, Fanout, Wire, Swap]


@dataclass(frozen=True)
class Port:
    name: str
    rail0: str
    rail1: str
    direction: str  # "in" | "out"


def _reads(e: Element) -> tuple[str, ...]:
    if isinstance(e, Lock):
        return e.side0 + e.side1
    if isinstance(e, Balance):
        return (e.center,)
    if isinstance(e, Fanout):
        return (e.src,)
    if isinstance(e, Wire):
        return (e.src,)
    return (e.a0, e.a1)


def _writes(e: Element) -> tuple[str, ...]:
    if isinstance(e, Lock):
        return tuple(r for r in (e.out0, e.out1) if r is not None)
    if isinstance(e, Balance):
        return (e.arm0, e.arm1)
    if isinstance(e, Fanout):
        return e.dsts
    if isinstance(e, Wire):
        return (e.dst,)
    return (e.b0, e.b1)


@dataclass(frozen=True)
class Netlist:
    rails: tuple[str, ...]
    elements: tuple[Element, ...]
    ports: tuple[Port, ...]
    clock_rails: tuple[str, ...]
    phase_of: Mapping[str, int]          # element name -> clock phase index
    dual_pairs: tuple[tuple[str, str], ...]
    order: tuple[int, ...]               # evaluation order over elements
    guards: Mapping[str, tuple[tuple[int, int], ...]]  # rail -> (lock idx, side)

    @property
    def input_ports(self) -> tuple[Port, ...]:
        return tuple(p for p in self.ports if p.direction == "in")

    @property
    def output_ports(self) -> tuple[Port, ...]:
        return tuple(p for p in self.ports if p.direction == "out")


class NetlistBuilder:
    """Imperative construction of a validated, evaluation-ordered netlist."""

    def __init__(self):
        self._rails: dict[str, None] = {}
        self._elements: list[Element] = []
        self._names: set[str] = set()
        self._ports: list[Port] = []
        self._clock_rails: dict[int, str] = {}
        self._phase_of: dict[str, int] = {}
        self._dual_pairs: list[tuple[str, str]] = []

    # rails ---------------------------------------------------------------

    def rail(self, name: str) -> str:
        if name in self._rails:
            raise NetlistError(f"rail {name!r} already declared")
        self._rails[name] = None
        return name

    def dual(self, base: str) -> tuple[str, str]:
        pair = (self.rail(f"{base}.0"), self.rail(f"{base}.1"))
        self._dual_pairs.append(pair)
        return pair

    def clock_rail(self, phase: int = 0) -> str:
        if phase not in self._clock_rails:
            self._clock_rails[phase] = self.rail(f"__clk{phase}")
        return self._clock_rails[phase]

    # elements ------------------------------------------------------------

    def _add(self, e: Element, phase: int | None = None) -> None:
        if e.name in self._names:
            raise NetlistError(f"element {e.name!r} already declared")
        for r in _reads(e) + _writes(e):
            if r not in self._rails:
                raise NetlistError(f"element {e.name!r} references unknown rail {r!r}")
        self._names.add(e.name)
        self._elements.append(e)
        if phase is not None:
            self._phase_of[e.name] = phase

    def lock(self, name: str, side0: Sequence[str], side1: Sequence[str],
             out0: str | None = None, out1: str | None = None) -> None:
        if not side0 or not side1:
            raise NetlistError(f"lock {name!r} needs at least one rail per side")
        self._add(Lock(name, tuple(side0), tuple(side1), out0, out1))
        if out0 is not None and out1 is not None:
            self._dual_pairs.append((out0, out1))

    def balance(self, name: str, center: str, arm0: str, arm1: str,
                phase: int | None = None) -> None:
        self._add(Balance(name, center, arm0, arm1), phase)

    def fanout(self, name: str, src: str, dsts: Sequence[str]) -> None:
        self._add(Fanout(name, src, tuple(dsts)))

    def wire(self, name: str, src: str, dst: str) -> None:
        self._add(Wire(name, src, dst))

    def swap(self, name: str, a0: str, a1: str, b0: str, b1: str) -> None:
        self._add(Swap(name, a0, a1, b0, b1))

    def input_port(self, name: str, rail0: str, rail1: str) -> None:
        self._ports.append(Port(name, rail0, rail1, "in"))

    def output_port(self, name: str, rail0: str, rail1: str) -> None:
        self._ports.append(Port(name, rail0, rail1, "out"))

    # build ---------------------------------------------------------------

    def build(self) -> Netlist:
        elements = tuple(self._elements)
        writers: dict[str, int] = {}
        for i, e in enumerate(elements):
            for r in _writes(e):
                if r in writers:
                    raise ForbiddenWiring(
                        f"rail {r!r} driven by both {elements[writers[r]].name!r} "
                        f"and {e.name!r}")
                if r in [rr for pp in self._clock_rails.items() for rr in (pp[1],)]:
                    raise ForbiddenWiring(f"clock rail {r!r} cannot be element-driven")
                writers[r] = i
        port_rails = [r for p in self._ports for r in (p.rail0, p.rail1)]
        if len(set(port_rails)) != len(port_rails):
            raise NetlistError("port rails must be distinct")
        for p in self._ports:
            if p.direction == "in":
                for r in (p.rail0, p.rail1):
                    if r in writers:
                        raise ForbiddenWiring(
                            f"input port rail {r!r} is also element-driven")

        guards: dict[str, list[tuple[int, int]]] = {}
        for i, e in enumerate(elements):
            if isinstance(e, Lock):
                for side, taps in ((0, e.side0), (1, e.side1)):
                    for r in taps:
                        guards.setdefault(r, []).append((i, side))

        # Motion-flow edges: whoever writes a rail precedes whoever reads it.
        # Locks tapping a balance arm do not constrain the order; routing is
        # settled by the fixpoint sweep in the evaluator.
        edges: dict[int, set[int]] = {i: set() for i in range(len(elements))}
        for i, e in enumerate(elements):
            for r in _reads(e):
                w = writers.get(r)
                if w is not None and w != i:
                    edges[w].add(i)

        order = _topological(edges, elements)
        return Netlist(
            rails=tuple(self._rails),
            elements=elements,
            ports=tuple(self._ports),
            clock_rails=tuple(self._clock_rails.values()),
            phase_of=dict(self._phase_of),
            dual_pairs=tuple(self._dual_pairs),
            order=order,
            guards={r: tuple(v) for r, v in guards.items()},
        )


def _topological(edges: Mapping[int, set[int]], elements: Sequence[Element]) -> tuple[int, ...]:
    indeg = {i: 0 for i in edges}
    for srcs in edges.values():
        for d in srcs:
            indeg[d] += 1
    ready = [i for i in sorted(indeg) if indeg[i] == 0]
    out: list[int] = []
    while ready:
        n = ready.pop(0)
        out.append(n)
        for m in sorted(edges[n]):
            indeg[m] -= 1
            if indeg[m] == 0:
                ready.append(m)
    if len(out) != len(indeg):
        cyclic = [elements[i].name for i in indeg if i not in out]
        raise NetlistError(f"element graph is cyclic within one phase: {cyclic}")
    return tuple(out)


# -- evaluation --------------------------------------------------------------

def _coerce_value(name: str, value) -> DualRailValue:
    if isinstance(value, tuple):
        try:
            return DualRailValue.from_rails(*value)
        except ForbiddenState as exc:
            raise ForbiddenState(f"input port {name!r}: {exc}") from exc
    return DualRailValue.from_bit(value)


def _held(netlist: Netlist, values: dict[str, int], rail: str) -> bool:
    for lock_idx, side in netlist.guards.get(rail, ()):
        lock = netlist.elements[lock_idx]
        other = lock.side1 if side == 0 else lock.side0
        if any(values[r] for r in other):
            return True
    return False


def evaluate_detailed(netlist: Netlist, inputs: Mapping[str, object],
                      clock_active: bool = True
                      ) -> tuple[dict[str, DualRailValue], dict[str, int]]:
    """Evaluate and return both port outputs and the full rail state."""
    values = {r: 0 for r in netlist.rails}
    given = dict(inputs)
    for port in netlist.input_ports:
        v = _coerce_value(port.name, given.pop(port.name, BLANK))
        values[port.rail0] = v.rail0
        values[port.rail1] = v.rail1
    if given:
        raise NetlistError(f"unknown input ports: {sorted(given)}")
    if clock_active:
        for r in netlist.clock_rails:
            values[r] = 1

    # Monotone cascade: rails only ever move 0 -> 1, so sweeping the
    # motion order until nothing changes is a deterministic fixpoint.  A
    # balance with motion at its center defers until the data locks have
    # settled one of its arms; a balance still undecided at the fixpoint
    # was actuated on blank data.
    lock_states = {i: LockState() for i, e in enumerate(netlist.elements)
                   if isinstance(e, Lock)}
    fired: set[int] = set()
    for _ in range(len(netlist.elements) + 1):
        changed = False
        for i in netlist.order:
            e = netlist.elements[i]
            if isinstance(e, Fanout):
                for d in e.dsts:
                    if values[d] != values[e.src]:
                        values[d] = values[e.src]
                        changed = True
            elif isinstance(e, Wire):
                if values[e.dst] != values[e.src]:
                    values[e.dst] = values[e.src]
                    changed = True
            elif isinstance(e, Swap):
                if values[e.b0] != values[e.a1] or values[e.b1] != values[e.a0]:
                    values[e.b0] = values[e.a1]
                    values[e.b1] = values[e.a0]
                    changed = True
            elif isinstance(e, Balance):
                if values[e.center] == 1 and i not in fired:
                    held0 = _held(netlist, values, e.arm0)
                    held1 = _held(netlist, values, e.arm1)
                    if held0 and held1:
                        raise ScheduleViolation(
                            f"balance {e.name!r}: both sides are locked")
                    if held0 or held1:
                        state = balance_actuate(BalanceState(
                            side0_locked=held0, side1_locked=held1))
                        values[e.arm0] = state.output0
                        values[e.arm1] = state.output1
                        fired.add(i)
                        changed = True
            elif isinstance(e, Lock):
                s0 = 1 if any(values[r] for r in e.side0) else 0
                s1 = 1 if any(values[r] for r in e.side1) else 0
                try:
                    st = lock_states[i]
                    if s0 and st.input0 == 0:
                        st = lock_set(st, 0, 1)
                    if s1 and st.input1 == 0:
                        st = lock_set(st, 1, 1)
                    lock_states[i] = st
                except BindingViolation as exc:
                    raise ScheduleViolation(f"lock {e.name!r}: {exc}") from exc
                if e.out0 is not None and values[e.out0] != s0:
                    values[e.out0] = s0
                    changed = True
                if e.out1 is not None and values[e.out1] != s1:
                    values[e.out1] = s1
                    changed = True
        if not changed:
            break

    for i, e in enumerate(netlist.elements):
        if isinstance(e, Balance) and values[e.center] == 1 and i not in fired:
            try:
                balance_actuate(BalanceState())
            except BothSidesFree as exc:
                raise ScheduleViolation(f"balance {e.name!r}: {exc}") from exc

    for r0, r1 in netlist.dual_pairs:
        if values[r0] == 1 and values[r1] == 1:
            raise ForbiddenState(f"rail pair ({r0!r}, {r1!r}) reached (1, 1)")

    outputs = {p.name: DualRailValue.from_rails(values[p.rail0], values[p.rail1])
               for p in netlist.output_ports}
    return outputs, values


def evaluate(netlist: Netlist, inputs: Mapping[str, object],
             clock_active: bool = True) -> dict[str, DualRailValue]:
    """Quasi-static evaluation: set the data locks, actuate the clock, cascade.

    With the clock inactive nothing moves and every output is blank.  Inputs
    may be :class:`DualRailValue`, bits, or raw ``(rail0, rail1)`` tuples;
    a (1, 1) pair raises :class:`ForbiddenState`, and actuating onto blank
    or forbidden data raises :class:`ScheduleViolation`.
    """
    outputs, _ = evaluate_detailed(netlist, inputs, clock_active)
    return outputs


# -- truth tables -------------------------------------------------------------

@dataclass(frozen=True)
class TruthTable:
    input_names: tuple[str, ...]
    output_names: tuple[str, ...]
    rows: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]

    def as_map(self) -> dict[tuple[int, ...], tuple[int, ...]]:
        return {i: o for i, o in self.rows}

    def is_permutation(self) -> bool:
        if len(self.input_names) != len(self.output_names):
            return False
        outs = {o for _, o in self.rows}
        return len(outs) == len(self.rows)

    def format_text(self) -> str:
        head = " ".join(self.input_names) + " | " + " ".join(self.output_names)
        lines = [head, "-" * len(head)]
        for ins, outs in self.rows:
            lines.append(
                " ".join(str(b) for b in ins) + " | " + " ".join(str(b) for b in outs))
        return "\n".join(lines)


def truth_table(netlist: Netlist) -> TruthTable:
    """Exhaustive evaluation over all Zero/One input combinations.

    Rows follow binary counting with the first declared input port as the
    most significant bit.
    """
    ins = netlist.input_ports
    outs = netlist.output_ports
    if len(ins) > 16:
        raise NetlistError("truth tables limited to 16 dual-rail inputs")
    rows = []
    for combo in itertools.product((0, 1), repeat=len(ins)):
        assignment = {p.name: b for p, b in zip(ins, combo)}
        result = evaluate(netlist, assignment, clock_active=True)
        out_bits = tuple(result[p.name].bit for p in outs)
        if any(b is None for b in out_bits):
            raise ScheduleViolation(
                f"blank output for inputs {assignment}; netlist is incomplete")
        rows.append((combo, out_bits))
    return TruthTable(
        input_names=tuple(p.name for p in ins),
        output_names=tuple(p.name for p in outs),
        rows=tuple(rows),
    )


# -- reverse evaluation --------------------------------------------------------

def evaluate_reverse(netlist: Netlist, outputs: Mapping[str, object]
                     ) -> dict[str, DualRailValue]:
    """Run the actuation sequence backward and recover the inputs.

    Motion is pulled back from the output locks: each lock side releases
    into whichever tap is free given the guard locks, balances return the
    motion from their arms to their centers (inferring the select data that
    must have held the parked arm), and routing elements propagate both
    ways.  Netlists whose output map is not injective cannot be unwound and
    raise :class:`NotReversible`.
    """
    out_ports = {p.name: p for p in netlist.output_ports}
    in_ports = netlist.input_ports
    if len(in_ports) <= 8:
        table = truth_table(netlist)
        if not table.is_permutation():
            raise NotReversible(
                f"netlist with {len(in_ports)} inputs and "
                f"{len(netlist.output_ports)} outputs is not a permutation")

    known: dict[str, int] = {}

    def learn(rail: str, value: int) -> bool:
        if rail in known:
            if known[rail] != value:
                raise NotReversible(
                    f"inconsistent reverse value for rail {rail!r}")
            return False
        known[rail] = value
        return True

    for name, value in outputs.items():
        if name not in out_ports:
            raise NetlistError(f"unknown output port {name!r}")
        v = _coerce_value(name, value)
        if v is BLANK:
            raise NotReversible("reverse evaluation needs Zero/One outputs")
        p = out_ports[name]
        learn(p.rail0, v.rail0)
        learn(p.rail1, v.rail1)
    if set(out_ports) - set(outputs):
        raise NetlistError("reverse evaluation requires every output port")
    for r in netlist.clock_rails:
        learn(r, 1)

    balance_written = {r for e in netlist.elements if isinstance(e, Balance)
                       for r in (e.arm0, e.arm1)}

    def held_status(rail: str) -> bool | None:
        """True/False when decidable from known rails, else None."""
        any_unknown = False
        for lock_idx, side in netlist.guards.get(rail, ()):
            lock = netlist.elements[lock_idx]
            other = lock.side1 if side == 0 else lock.side0
            vals = [known.get(r) for r in other]
            if any(v == 1 for v in vals):
                return True
            if any(v is None for v in vals):
                any_unknown = True
        return None if any_unknown else False

    def resolve_pass() -> bool:
        progress = False
        for e in netlist.elements:
            if isinstance(e, Wire):
                if e.src in known and e.dst not in known:
                    progress |= learn(e.dst, known[e.src])
                elif e.dst in known and e.src not in known:
                    progress |= learn(e.src, known[e.dst])
            elif isinstance(e, Swap):
                for a, b in ((e.a1, e.b0), (e.a0, e.b1)):
                    if a in known and b not in known:
                        progress |= learn(b, known[a])
                    elif b in known and a not in known:
                        progress |= learn(a, known[b])
            elif isinstance(e, Fanout):
                if e.src in known:
                    for d in e.dsts:
                        if d not in known:
                            progress |= learn(d, known[e.src])
                else:
                    for d in e.dsts:
                        if d in known:
                            progress |= learn(e.src, known[d])
                            break
            elif isinstance(e, Balance):
                a0, a1 = known.get(e.arm0), known.get(e.arm1)
                if a0 is not None and a1 is not None and e.center not in known:
                    progress |= learn(e.center, 1 if (a0 or a1) else 0)
                # Select inference: a moved arm was free, a parked arm (with
                # the center actuated) was held by its single guard rail.
                if known.get(e.center) == 1 and a0 is not None and a1 is not None:
                    moved, parked = ((e.arm0, e.arm1) if a0 == 1 else (e.arm1, e.arm0))
                    if a0 == a1:
                        raise NotReversible(
                            f"balance {e.name!r} arms are inconsistent in reverse")
                    for lock_idx, side in netlist.guards.get(moved, ()):
                        lock = netlist.elements[lock_idx]
                        other = lock.side1 if side == 0 else lock.side0
                        for r in other:
                            if r not in known and r not in balance_written:
                                progress |= learn(r, 0)
                    # the parked arm was held by its data guard at fire time
                    # (merge locks tapping other arms cannot hold it then)
                    data_guards = []
                    for lock_idx, side in netlist.guards.get(parked, ()):
                        lock = netlist.elements[lock_idx]
                        other = lock.side1 if side == 0 else lock.side0
                        if all(r not in balance_written for r in other):
                            data_guards.append(other)
                    if len(data_guards) == 1 and len(data_guards[0]) == 1:
                        r = data_guards[0][0]
                        if r not in known:
                            progress |= learn(r, 1)
            elif isinstance(e, Lock):
                for out, taps in ((e.out0, e.side0), (e.out1, e.side1)):
                    if out is None or out not in known:
                        continue
                    if known[out] == 0:
                        for t in taps:
                            if t not in known:
                                progress |= learn(t, 0)
                        continue
                    # One tap carried the motion; a tap whose guard is known
                    # to hold it cannot be the one.
                    undecided = [t for t in taps if t not in known]
                    if any(known.get(t) == 1 for t in taps):
                        for t in undecided:
                            progress |= learn(t, 0)
                        continue
                    candidates = []
                    for t in undecided:
                        if held_status(t) is True:
                            progress |= learn(t, 0)
                        else:
                            candidates.append(t)
                    # all other taps are zero, so a single remaining
                    # candidate must be the one that carried the motion
                    if len(candidates) == 1:
                        progress |= learn(candidates[0], 1)
        return progress

    for _ in range(len(netlist.elements) + len(netlist.rails) + 1):
        if not resolve_pass():
            break

    recovered: dict[str, DualRailValue] = {}
    for p in in_ports:
        r0, r1 = known.get(p.rail0), known.get(p.rail1)
        if r0 is None or r1 is None:
            raise NotReversible(f"cannot recover input port {p.name!r}")
        v = DualRailValue.from_rails(r0, r1)
        if v is BLANK:
            raise NotReversible(f"input port {p.name!r} unwinds to blank")
        recovered[p.name] = v

    check = evaluate(netlist, recovered, clock_active=True)
    wanted = {name: _coerce_value(name, v) for name, v in outputs.items()}
    if check != wanted:
        raise NotReversible("reverse result fails the forward check")
    return recovered


# -- gate construction ---------------------------------------------------------

def add_demux(b: NetlistBuilder, tag: str, sel0: str, sel1: str,
              motion: str) -> tuple[str, str]:
    """Fig-4 routing cell: balance plus two guard locks.

    Motion on ``motion`` exits on arm 0 when the select pair reads Zero
    (``sel0`` raised) and on arm 1 when it reads One.
    """
    a0 = b.rail(f"{tag}.a0")
    a1 = b.rail(f"{tag}.a1")
    b.lock(f"{tag}.l0", side0=[sel1], side1=[a0])
    b.lock(f"{tag}.l1", side0=[sel0], side1=[a1])
    b.balance(f"{tag}.b", motion, a0, a1, phase=0)
    return a0, a1


def add_output_lock(b: NetlistBuilder, tag: str, zero_taps: Sequence[str],
                    one_taps: Sequence[str]) -> tuple[str, str]:
    """Merge cascade leaves into one dual-rail pair via the final lock."""
    o0 = b.rail(f"{tag}.o0")
    o1 = b.rail(f"{tag}.o1")
    b.lock(f"{tag}.lock", side0=zero_taps, side1=one_taps, out0=o0, out1=o1)
    return o0, o1


def add_copies(b: NetlistBuilder, tag: str, rail: str, n: int) -> list[str]:
    if n == 1:
        return [rail]
    dsts = [b.rail(f"{tag}.c{i}") for i in range(n)]
    b.fanout(f"{tag}.fan", rail, dsts)
    return dsts


def _binary_tree(b: NetlistBuilder, names: Sequence[str],
                 rails: Mapping[str, tuple[str, str]]) -> dict[tuple[int, ...], str]:
    """Decision tree over the named inputs; returns leaf rails keyed by bits.

    The first input conditions the root demux driven by the clock; each
    further input conditions one demux per live path, fed by fanned-out
    copies of its rails.
    """
    clk = b.clock_rail(0)
    paths: dict[tuple[int, ...], str] = {(): clk}
    for name in names:
        need = len(paths)
        c0 = add_copies(b, f"{name}0", rails[name][0], need)
        c1 = add_copies(b, f"{name}1", rails[name][1], need)
        nxt: dict[tuple[int, ...], str] = {}
        for i, (bits, motion) in enumerate(sorted(paths.items())):
            tag = f"dx.{name}." + "".join(map(str, bits)) if bits else f"dx.{name}"
            a0, a1 = add_demux(b, tag, c0[i], c1[i], motion)
            nxt[bits + (0,)] = a0
            nxt[bits + (1,)] = a1
        paths = nxt
    return paths


def _tree_gate(inputs: Sequence[str], outputs: Sequence[str],
               funcs: Sequence) -> Netlist:
    b = NetlistBuilder()
    rails = {name: b.dual(name) for name in inputs}
    for name in inputs:
        b.input_port(name, *rails[name])
    leaves = _binary_tree(b, inputs, rails)
    need_fan = len(outputs) > 1
    if need_fan:
        # every leaf feeds one tap per output lock, via an explicit copy
        for bits, leaf in sorted(leaves.items()):
            suffix = "".join(map(str, bits))
            taps = [b.rail(f"{out}.tap.{suffix}") for out in outputs]
            b.fanout(f"leaf.{suffix}.fan", leaf, taps)
    for out_name, func in zip(outputs, funcs):
        zero_taps, one_taps = [], []
        for bits, leaf in sorted(leaves.items()):
            tap = f"{out_name}.tap." + "".join(map(str, bits)) if need_fan else leaf
            (one_taps if func(*bits) else zero_taps).append(tap)
        o0, o1 = add_output_lock(b, out_name, zero_taps, one_taps)
        b.output_port(out_name, o0, o1)
    return b.build()


def _swapped_gate(base: Netlist, out_name: str) -> Netlist:
    """Rebuild ``base`` with the named output pair crossed by a swap element."""
    b = NetlistBuilder()
    rename: dict[str, str] = {}
    inner0 = inner1 = None
    for r in base.rails:
        rename[r] = r
    for p in base.ports:
        if p.direction == "out" and p.name == out_name:
            inner0, inner1 = p.rail0, p.rail1
    if inner0 is None:
        raise NetlistError(f"no output port {out_name!r} to invert")
    for r in base.rails:
        b._rails[r] = None  # bulk import of the base rail set
    b._dual_pairs = list(base.dual_pairs)
    b._clock_rails = {0: base.clock_rails[0]} if base.clock_rails else {}
    for e in base.elements:
        b._add(e, base.phase_of.get(e.name))
    x0, x1 = b.dual(f"{out_name}.inv")
    b.swap(f"{out_name}.swap", inner0, inner1, x0, x1)
    for p in base.ports:
        if p.direction == "in":
            b.input_port(p.name, p.rail0, p.rail1)
        elif p.name == out_name:
            b.output_port(p.name, x0, x1)
        else:
            b.output_port(p.name, p.rail0, p.rail1)
    return b.build()


def _build_fredkin() -> Netlist:
    b = NetlistBuilder()
    c = b.dual("c")
    a = b.dual("a")
    bb = b.dual("b")
    for name, pair in (("c", c), ("a", a), ("b", bb)):
        b.input_port(name, *pair)
    clk = b.clock_rail(0)
    c0s = add_copies(b, "c0", c[0], 5)
    c1s = add_copies(b, "c1", c[1], 5)
    # control passes through its own routing cell
    rc0, rc1 = add_demux(b, "rc", c0s[0], c1s[0], clk)
    co0, co1 = add_output_lock(b, "c_out", [rc0], [rc1])
    b.output_port("c_out", co0, co1)
    # each target rail routes straight (control Zero) or across (control One)
    stay: dict[str, str] = {}
    cross: dict[str, str] = {}
    for i, (tag, rail) in enumerate(
            (("ra0", a[0]), ("ra1", a[1]), ("rb0", bb[0]), ("rb1", bb[1]))):
        s, x = add_demux(b, tag, c0s[i + 1], c1s[i + 1], rail)
        stay[tag], cross[tag] = s, x
    ao0, ao1 = add_output_lock(b, "a_out", [stay["ra0"], cross["rb0"]],
                               [stay["ra1"], cross["rb1"]])
    bo0, bo1 = add_output_lock(b, "b_out", [stay["rb0"], cross["ra0"]],
                               [stay["rb1"], cross["ra1"]])
    b.output_port("a_out", ao0, ao1)
    b.output_port("b_out", bo0, bo1)
    return b.build()


def build_gate(kind: GateKind | str) -> Netlist:
    """Construct the lock/balance netlist realizing the named gate.

    OR, AND, XNOR and NOT are the NOR, NAND, XOR and buffer trees with the
    output pair crossed by an explicit rail swap.
    """
    if isinstance(kind, str):
        kind = GateKind(kind.lower())
    if kind is GateKind.NAND:
        return _tree_gate(("a", "b"), ("x",), (lambda a, b: 1 - (a & b),))
    if kind is GateKind.NOR:
        return _tree_gate(("a", "b"), ("x",), (lambda a, b: 1 - (a | b),))
    if kind is GateKind.XOR:
        return _tree_gate(("a", "b"), ("x",), (lambda a, b: a ^ b,))
    if kind is GateKind.AND:
        return _swapped_gate(build_gate(GateKind.NAND), "x")
    if kind is GateKind.OR:
        return _swapped_gate(build_gate(GateKind.NOR), "x")
    if kind is GateKind.XNOR:
        return _swapped_gate(build_gate(GateKind.XOR), "x")
    if kind is GateKind.NOT:
        buf = _tree_gate(("a",), ("x",), (lambda a: a,))
        return _swapped_gate(buf, "x")
    if kind is GateKind.FULL_ADDER:
        return _tree_gate(("a", "b", "cin"), ("sum", "cout"),
                          (lambda a, b, c: a ^ b ^ c,
                           lambda a, b, c: 1 if a + b + c >= 2 else 0))
    if kind is GateKind.FREDKIN:
        return _build_fredkin()
    raise ValueError(f"unknown gate kind {kind!r}")


def build_buffer(in_name: str = "a", out_name: str = "x") -> Netlist:
    """Clocked identity cell; useful as a Moore output stage."""
    return _tree_gate((in_name,), (out_name,), (lambda a: a,))


def build_mux21(sel: str = "we", a: str = "q", b: str = "d",
                out: str = "next") -> Netlist:
    """Two-way select: ``out = b if sel else a``, as a lock/balance tree."""
    return _tree_gate((sel, a, b), (out,),
                      (lambda s, av, bv: bv if s else av,))


# -- composition -----------------------------------------------------------------

def instantiate(builder: NetlistBuilder, sub: Netlist, prefix: str,
                bindings: Mapping[str, tuple[str, str]],
                clock_phase: int = 0) -> None:
    """Splice a sub-netlist into a builder, renaming internals with ``prefix``.

    ``bindings`` maps every port of ``sub`` to an existing rail pair of the
    outer builder; clock rails are shared (shifted onto ``clock_phase``),
    everything else is copied under the prefix.
    """
    missing = {p.name for p in sub.ports} - set(bindings)
    if missing:
        raise NetlistError(f"unbound ports while instantiating: {sorted(missing)}")
    rename: dict[str, str] = {}
    for phase, rail in zip(range(len(sub.clock_rails)), sub.clock_rails):
        rename[rail] = builder.clock_rail(clock_phase + phase)
    for p in sub.ports:
        rename[p.rail0], rename[p.rail1] = bindings[p.name]
    for r in sub.rails:
        if r not in rename:
            rename[r] = builder.rail(f"{prefix}.{r}")

    def m(r: str | None) -> str | None:
        return None if r is None else rename[r]

    for e in sub.elements:
        phase = sub.phase_of.get(e.name)
        name = f"{prefix}.{e.name}"
        if isinstance(e, Lock):
            builder._add(Lock(name, tuple(m(r) for r in e.side0),
                              tuple(m(r) for r in e.side1), m(e.out0), m(e.out1)))
            if e.out0 is not None and e.out1 is not None:
                builder._dual_pairs.append((m(e.out0), m(e.out1)))
        elif isinstance(e, Balance):
            builder._add(Balance(name, m(e.center), m(e.arm0), m(e.arm1)), phase)
        elif isinstance(e, Fanout):
            builder._add(Fanout(name, m(e.src), tuple(m(r) for r in e.dsts)))
        elif isinstance(e, Wire):
            builder._add(Wire(name, m(e.src), m(e.dst)))
        else:
            builder._add(Swap(name, m(e.a0), m(e.a1), m(e.b0), m(e.b1)))
