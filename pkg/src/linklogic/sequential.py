"""Shift-register cells, chains, state machines and pipeline analysis.

Time is event-ordered: each quarter cycle expands into a fixed event list
(inputs settle, the quarter's phase rises, the phase two quarters back
falls), derived from the two-cell handoff sequence.  Phase p is therefore
high for two quarters, which gives adjacent phases their mandatory overlap;
waveform shape matters only to clock validation.

A cell's holding locks are slaved to its predecessor's output lock (they
are the same connecting links), so a bit transiently exists in two adjacent
cells during a handoff quarter.  The cell that *retains* the bit at any
settled instant is the unique one whose holding area and output lock are
simultaneously non-blank; a four-cell chain has exactly one retaining cell
per stored bit, which is the sense in which it stores one bit.

Reversal replays the event schedule backward.  Re-raising a cell recovers
its value from the successor it had handed the bit to (the mechanism's own
locks force the same routing), so information flows backward from outputs
to inputs; at the open chain end the logged boundary I/O plays the part of
the reversed environment.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

from .clocking import ClockProgram, validate_clock
from .errors import BothSidesFree, BothSidesLocked, ForbiddenState, ScheduleViolation
from .gates import (
    BLANK,
    ONE,
    ZERO,
    DualRailValue,
    GateKind,
    Netlist,
    build_buffer,
    build_gate,
    build_mux21,
    evaluate,
    truth_table,
)
from .primitives import (
    BalanceState,
    LockState,
    balance_actuate,
    balance_deactuate,
    lock_set,
)

PHASES = 4


# -- shift register cell ------------------------------------------------------

@dataclass(frozen=True)
class ShiftCell:
    """Holding locks + balance + output lock, bound to one clock phase.

    Holding lock i stores data value i on its first input; its second input
    is the balance arm.  The output lock's first input is the zero side,
    crossed from the arms so that a zero input yields a zero output.
    """

    phase: int
    hold0: LockState = LockState()
    hold1: LockState = LockState()
    output: LockState = LockState()
    balance: BalanceState = BalanceState()

    def holding_value(self) -> DualRailValue:
        return DualRailValue.from_rails(self.hold0.input0, self.hold1.input0)

    def output_value(self) -> DualRailValue:
        return DualRailValue.from_rails(self.output.input0, self.output.input1)

    def retained(self) -> DualRailValue:
        """The bit this cell authoritatively stores right now.

        During a handoff the raw output value mirrors into the successor's
        holding area, so output state alone over-counts; a cell retains a
        bit only while holding area and output agree.
        """
        h, o = self.holding_value(), self.output_value()
        if h is BLANK or o is BLANK:
            return BLANK
        return o


@dataclass(frozen=True)
class SetInput:
    value: DualRailValue


@dataclass(frozen=True)
class RaisePhase:
    pass


@dataclass(frozen=True)
class LowerPhase:
    pass


CellEvent = SetInput | RaisePhase | LowerPhase


def blank_cell(phase: int) -> ShiftCell:
    return ShiftCell(phase=phase % PHASES)


def blank_chain(n_cells: int) -> tuple[ShiftCell, ...]:
    return tuple(blank_cell(k) for k in range(n_cells))


def cell_step(cell: ShiftCell, event: CellEvent) -> ShiftCell:
    """Apply one ordered event to a cell.

    Raising the phase copies the held value to the output lock; lowering
    retracts the output while the holding data stays put.  Raising on blank
    or forbidden holding data is a :class:`ScheduleViolation`.
    """
    if isinstance(event, SetInput):
        d0 = 1 if event.value is ZERO else 0
        d1 = 1 if event.value is ONE else 0
        hold0, hold1 = cell.hold0, cell.hold1
        if hold0.input0 != d0:
            hold0 = lock_set(hold0, 0, d0)
        if hold1.input0 != d1:
            hold1 = lock_set(hold1, 0, d1)
        return replace(cell, hold0=hold0, hold1=hold1)

    if isinstance(event, RaisePhase):
        try:
            bal = balance_actuate(BalanceState(
                side0_locked=cell.hold0.input0 == 1,
                side1_locked=cell.hold1.input0 == 1))
        except (BothSidesFree, BothSidesLocked) as exc:
            raise ScheduleViolation(f"raise-phase on cell: {exc}") from exc
        if bal.output1:  # held Zero: motion on arm 1, crossed to the zero side
            hold1 = lock_set(cell.hold1, 1, 1)
            output = lock_set(cell.output, 0, 1)
            return replace(cell, hold1=hold1, output=output, balance=bal)
        hold0 = lock_set(cell.hold0, 1, 1)
        output = lock_set(cell.output, 1, 1)
        return replace(cell, hold0=hold0, output=output, balance=bal)

    if isinstance(event, LowerPhase):
        return replace(
            cell,
            hold0=lock_set(cell.hold0, 1, 0),
            hold1=lock_set(cell.hold1, 1, 0),
            output=LockState(),
            balance=BalanceState(),  # arms parked, routing context released
        )
    raise TypeError(f"unknown cell event {event!r}")


def _reverse_raise(cell: ShiftCell, value: DualRailValue) -> ShiftCell:
    """Re-actuate a cell whose holding area is already clear.

    The routing is forced from downstream: pushing data into the successor
    holding lock that still has its arm up is forbidden, so the balance can
    only recreate the value it had copied.  The resulting state is exactly
    the pre-fall state.
    """
    if value is BLANK:
        return cell
    bal = balance_actuate(BalanceState(
        side0_locked=value is ZERO, side1_locked=value is ONE))
    if bal.output1:
        return replace(cell, hold1=lock_set(cell.hold1, 1, 1),
                       output=lock_set(cell.output, 0, 1), balance=bal)
    return replace(cell, hold0=lock_set(cell.hold0, 1, 1),
                   output=lock_set(cell.output, 1, 1), balance=bal)


# -- chains --------------------------------------------------------------------

@dataclass(frozen=True)
class TraceEvent:
    """One scheduled event plus the full chain snapshot after it."""

    t: float
    kind: str                      # "set-input" | "phase-rise" | "phase-fall"
    phase: int | None
    value: DualRailValue | None    # set-input payload
    prev_value: DualRailValue | None
    prev_outputs: tuple[DualRailValue, ...]  # outputs of cells this event lowered
    delivered: tuple[DualRailValue, ...]     # chain output emitted by this event
    cells: tuple[ShiftCell, ...]
    input_value: DualRailValue


@dataclass(frozen=True)
class ChainTrace:
    events: tuple[TraceEvent, ...]

    def outputs(self) -> list[DualRailValue]:
        return [v for e in self.events for v in e.delivered]

    def snapshots(self) -> list[tuple[ShiftCell, ...]]:
        return [e.cells for e in self.events]


@dataclass(frozen=True)
class ChainState:
    cells: tuple[ShiftCell, ...]
    input_value: DualRailValue = BLANK
    trace: ChainTrace = ChainTrace(())

    @property
    def outputs(self) -> list[DualRailValue]:
        return self.trace.outputs()


class _ChainRun:
    def __init__(self, state: ChainState):
        self.cells = list(state.cells)
        self.input_value = state.input_value
        self.events: list[TraceEvent] = []

    def record(self, t: float, kind: str, phase: int | None = None,
               value: DualRailValue | None = None,
               prev_value: DualRailValue | None = None,
               prev_outputs: tuple[DualRailValue, ...] = (),
               delivered: tuple[DualRailValue, ...] = ()) -> None:
        self.events.append(TraceEvent(
            t=t, kind=kind, phase=phase, value=value, prev_value=prev_value,
            prev_outputs=prev_outputs, delivered=delivered,
            cells=tuple(self.cells), input_value=self.input_value))

    def set_input(self, t: float, value: DualRailValue) -> None:
        prev = self.input_value
        self.cells[0] = cell_step(self.cells[0], SetInput(value))
        self.input_value = value
        self.record(t, "set-input", value=value, prev_value=prev)

    def rise(self, t: float, phase: int) -> None:
        delivered: list[DualRailValue] = []
        last = len(self.cells) - 1
        for k, cell in enumerate(self.cells):
            if cell.phase != phase or cell.holding_value() is BLANK:
                continue
            cell = cell_step(cell, RaisePhase())
            self.cells[k] = cell
            out = cell.output_value()
            if k < last:
                self.cells[k + 1] = cell_step(self.cells[k + 1], SetInput(out))
            else:
                delivered.append(out)
        self.record(t, "phase-rise", phase=phase, delivered=tuple(delivered))

    def fall(self, t: float, phase: int) -> None:
        prev_outputs: list[DualRailValue] = []
        last = len(self.cells) - 1
        for k, cell in enumerate(self.cells):
            if cell.phase != phase:
                continue
            prev_outputs.append(cell.output_value())
            if cell.balance.input != 1:
                continue
            self.cells[k] = cell_step(cell, LowerPhase())
            if k < last:
                self.cells[k + 1] = cell_step(self.cells[k + 1], SetInput(BLANK))
        self.record(t, "phase-fall", phase=phase, prev_outputs=tuple(prev_outputs))

    def state(self, base: ChainTrace = ChainTrace(())) -> ChainState:
        return ChainState(cells=tuple(self.cells), input_value=self.input_value,
                          trace=ChainTrace(base.events + tuple(self.events)))


def _check_chain(cells: Sequence[ShiftCell]) -> None:
    if not cells:
        raise ValueError("a chain needs at least one cell")
    for k, c in enumerate(cells):
        if c.phase != k % PHASES:
            raise ValueError(
                f"cell {k} has phase {c.phase}; chains assign phases round-robin")


def chain_simulate(cells: Sequence[ShiftCell] | ChainState, clock: ClockProgram,
                   input_stream: Iterable[DualRailValue | int | None],
                   cycles: int) -> ChainState:
    """Run a chain for whole cycles, feeding one stream value per cycle.

    Data advances one cell per quarter cycle.  The external input acts like
    a virtual preceding cell: a new value is applied at the cycle start and
    retracted one quarter after the first cell has copied it.  Cells whose
    holding area is blank simply skip their phase (their clock is never
    driven onto blank data), so an empty stream actuates nothing.
    """
    report = validate_clock(clock)
    if not report.passed:
        raise ScheduleViolation(
            "clock program fails validation: " + "; ".join(report.messages))
    state = cells if isinstance(cells, ChainState) else ChainState(tuple(cells))
    _check_chain(state.cells)
    stream = [DualRailValue.from_bit(v) for v in input_stream]
    feed = iter(stream)
    run = _ChainRun(state)
    start_cycle = len(state.trace.events) and state.trace.events[-1].t
    base_t = int(start_cycle) + 1 if state.trace.events else 0
    for c in range(cycles):
        t = float(base_t + c)
        run.set_input(t, next(feed, BLANK))
        for q in range(4):
            tq = t + q / 4
            run.rise(tq, q)
            if q == 1 and run.input_value is not BLANK:
                run.set_input(tq, BLANK)
            run.fall(tq, (q + 2) % 4)
    return run.state(base=state.trace)


def chain_reverse(state: ChainState, clock: ClockProgram, *,
                  events: int | None = None,
                  cycles: int | None = None) -> tuple[ChainState, ChainTrace]:
    """Undo the last recorded events, newest first, by time-reversed actuation.

    Returns the rewound chain state (with its trace trimmed accordingly, so
    forward simulation can resume) and the reversal trace whose snapshots
    are exactly the forward snapshots in reverse order.
    """
    report = validate_clock(clock)
    if not report.passed:
        raise ScheduleViolation(
            "clock program fails validation: " + "; ".join(report.messages))
    history = state.trace.events
    if cycles is not None:
        if events is not None:
            raise ValueError("pass either events or cycles, not both")
        per_cycle = 0
        base = history[-1].t // 1 if history else 0
        events = sum(1 for e in history if e.t >= base - cycles + 1)
        events = min(events, len(history))
    if events is None:
        events = len(history)
    if events > len(history):
        raise ValueError("cannot reverse more events than were recorded")

    cells = list(state.cells)
    input_value = state.input_value
    last = len(cells) - 1
    rev_events: list[TraceEvent] = []

    def snapshot(ev: TraceEvent, prior: tuple[ShiftCell, ...],
                 prior_input: DualRailValue) -> None:
        rev_events.append(TraceEvent(
            t=ev.t, kind="reverse-" + ev.kind, phase=ev.phase, value=ev.value,
            prev_value=ev.prev_value, prev_outputs=ev.prev_outputs,
            delivered=(), cells=prior, input_value=prior_input))

    for ev in reversed(history[len(history) - events:]):
        if ev.kind == "set-input":
            cells[0] = cell_step(cells[0], SetInput(ev.prev_value))
            input_value = ev.prev_value
        elif ev.kind == "phase-rise":
            for k in range(last, -1, -1):
                cell = cells[k]
                if cell.phase != ev.phase or cell.balance.input != 1:
                    continue
                if cell.holding_value() != cell.output_value():
                    raise ScheduleViolation(
                        f"cell {k} diverged from its recorded trajectory")
                cells[k] = cell_step(cell, LowerPhase())
                if k < last:
                    cells[k + 1] = cell_step(cells[k + 1], SetInput(BLANK))
        elif ev.kind == "phase-fall":
            idx = 0
            for k in range(len(cells)):
                cell = cells[k]
                if cell.phase != ev.phase:
                    continue
                value = ev.prev_outputs[idx]
                idx += 1
                if value is BLANK:
                    continue
                if k < last:
                    succ = cells[k + 1]
                    pushed = succ.output_value()
                    if pushed != value:
                        raise ScheduleViolation(
                            f"successor of cell {k} no longer holds {value}")
                    cells[k + 1] = cell_step(succ, SetInput(value))
                cells[k] = _reverse_raise(cell, value)
        else:
            raise ValueError(f"cannot reverse event kind {ev.kind!r}")
        snapshot(ev, tuple(cells), input_value)

    rewound = ChainState(cells=tuple(cells), input_value=input_value,
                         trace=ChainTrace(history[:len(history) - events]))
    return rewound, ChainTrace(tuple(rev_events))


def retained_cells(cells: Sequence[ShiftCell]) -> list[int]:
    """Indices of cells currently retaining a bit."""
    return [k for k, c in enumerate(cells) if c.retained() is not BLANK]


# -- Moore machines --------------------------------------------------------------

@dataclass(frozen=True)
class MooreMachine:
    """Transition and output logic around a four-cell state chain."""

    transition: Netlist
    output_logic: Netlist
    chain: ChainState
    state: DualRailValue
    clock: ClockProgram
    state_port: str = "q"
    next_port: str = "next"
    output_port: str = "out"

    def __post_init__(self):
        if len(self.chain.cells) < 4:
            raise ValueError("state retention needs at least four cells per bit")


def one_bit_memory(initial: DualRailValue | int = 0,
                   clock: ClockProgram | None = None) -> MooreMachine:
    """The canonical example machine: next state = D when WE else state."""
    transition = build_mux21(sel="we", a="q", b="d", out="next")
    output_logic = build_buffer(in_name="q", out_name="out")
    return MooreMachine(
        transition=transition,
        output_logic=output_logic,
        chain=ChainState(blank_chain(4)),
        state=DualRailValue.from_bit(initial),
        clock=clock or ClockProgram(),
    )


def moore_step(machine: MooreMachine, inputs: Mapping[str, DualRailValue | int]
               ) -> tuple[MooreMachine, DualRailValue]:
    """Advance one full clock cycle.

    The transition netlist is evaluated on (state, inputs), its result is
    shifted into the state chain over the four phases of the cycle, and the
    output netlist is evaluated on the new state (the value presented
    during the next cycle).
    """
    assignment = dict(inputs)
    assignment[machine.state_port] = machine.state
    next_bit = evaluate(machine.transition, assignment)[machine.next_port]
    chain = chain_simulate(machine.chain, machine.clock, [next_bit], cycles=1)
    skip = len(machine.chain.trace.events)
    delivered = [v for e in chain.trace.events[skip:] for v in e.delivered]
    carried = delivered[-1] if delivered else next_bit
    if carried != next_bit:
        raise ScheduleViolation("state chain corrupted the transition result")
    out = evaluate(machine.output_logic,
                   {machine.state_port: carried})[machine.output_port]
    return replace(machine, chain=chain, state=carried), out


# -- ripple-carry adder pipeline ---------------------------------------------

_FA_TABLE: dict[tuple[int, int, int], tuple[int, int]] | None = None


def _fa_table() -> dict[tuple[int, int, int], tuple[int, int]]:
    """Sum/carry lookup extracted from the real full-adder netlist."""
    global _FA_TABLE
    if _FA_TABLE is None:
        table = truth_table(build_gate(GateKind.FULL_ADDER))
        _FA_TABLE = {ins: outs for ins, outs in table.rows}
    return _FA_TABLE


@dataclass(frozen=True)
class PipelineStage:
    """Force-isolation view of one pipeline stage at one event time."""

    name: str
    column: int
    input_data_set: bool      # some holding/input lock holds data
    arms_raised: bool         # the stage's balance(s) are actuated
    output_raised: bool
    successor_columns: tuple[int, ...]
    successor_arms_raised: tuple[bool, ...]


@dataclass(frozen=True)
class PipelineSnapshot:
    quarter: int
    stages: tuple[PipelineStage, ...]


class AdderPipeline:
    """Ripple-carry adder: one clocked full adder per bit, linked by delay lines.

    Adder ``i`` fires on quarter ``i`` (phase ``i mod 4``); operand bits
    arrive through ``i`` shift cells and sums leave through ``bits - 1 - i``
    more, so every result bit emerges after ``bits`` quarters -- two full
    clock cycles for the eight-bit unit.
    """

    def __init__(self, bits: int = 8):
        if bits < 1:
            raise ValueError("bits must be >= 1")
        self.bits = bits
        self.quarters = bits
        self.fa = _fa_table()
        # firing schedule: per quarter, the latch hops and adders that act
        self._schedule: list[list[tuple]] = [[] for _ in range(self.quarters)]
        for i in range(bits):
            for j in range(i - 1, -1, -1):
                self._schedule[j % PHASES].append(("ab", i, j))
            for j in range(bits - 2 - i, -1, -1):
                self._schedule[(i + 1 + j) % PHASES].append(("s", i, j))
            self._schedule[i % PHASES].append(("fa", i))

    # values-only engine ---------------------------------------------------

    def run(self, a: int, b: int, carry_in: int = 0) -> tuple[int, int]:
        """Simulate the pipeline and return (sum, carry_out).

        Every latch hop is stepped quarter by quarter; the result is read
        from the output register after the final quarter.
        """
        n = self.bits
        if not (0 <= a < (1 << n) and 0 <= b < (1 << n)):
            raise ValueError("operands out of range")
        if carry_in not in (0, 1):
            raise ValueError("carry_in is a bit")
        # operand delay lines: slot j fires at quarter j
        a_lines = [[None] * i for i in range(n)]
        b_lines = [[None] * i for i in range(n)]
        s_lines = [[None] * (n - 1 - i) for i in range(n)]
        a_latch: list[int | None] = [None] * n
        b_latch: list[int | None] = [None] * n
        c_latch: list[int | None] = [None] * n
        out_sum: list[int | None] = [None] * n
        out_carry: int | None = None
        for i in range(n):
            bit_a = (a >> i) & 1
            bit_b = (b >> i) & 1
            if i == 0:
                a_latch[0], b_latch[0] = bit_a, bit_b
            else:
                a_lines[i][0], b_lines[i][0] = bit_a, bit_b
        c_latch[0] = carry_in

        fa = self.fa
        for q in range(self.quarters):
            for op in self._schedule[q % PHASES]:
                kind = op[0]
                if kind == "ab":
                    _, i, j = op
                    for line, latch in ((a_lines[i], a_latch), (b_lines[i], b_latch)):
                        if line[j] is None:
                            continue
                        if j + 1 < len(line):
                            line[j + 1] = line[j]
                        else:
                            latch[i] = line[j]
                        line[j] = None
                elif kind == "s":
                    _, i, j = op
                    line = s_lines[i]
                    if line[j] is None:
                        continue
                    if j + 1 < len(line):
                        line[j + 1] = line[j]
                    else:
                        out_sum[i] = line[j]
                    line[j] = None
                else:
                    i = op[1]
                    if a_latch[i] is None or b_latch[i] is None or c_latch[i] is None:
                        continue
                    s, c = fa[(a_latch[i], b_latch[i], c_latch[i])]
                    a_latch[i] = b_latch[i] = c_latch[i] = None
                    if i + 1 < n:
                        c_latch[i + 1] = c
                    else:
                        out_carry = c
                    if n - 1 - i > 0:
                        s_lines[i][0] = s
                    else:
                        out_sum[i] = s
        if any(v is None for v in out_sum) or out_carry is None:
            raise ScheduleViolation("pipeline failed to deliver all result bits")
        total = sum(v << i for i, v in enumerate(out_sum))
        return total, out_carry

    # traced engine (for latency and force isolation) -----------------------

    def run_traced(self, a: int, b: int, carry_in: int = 0
                   ) -> tuple[int, int, list[PipelineSnapshot]]:
        """Like :meth:`run`, with per-quarter stage snapshots.

        Stage activity windows follow the cell schedule: a stage that fires
        at quarter ``f`` holds its input data during [f-1, f+1) and keeps
        its output raised during [f, f+2).
        """
        n = self.bits
        total, carry = self.run(a, b, carry_in)

        stages: list[tuple[str, int, tuple[int, ...]]] = []
        for i in range(n):
            for j in range(i):
                # successor is the next delay cell, or the adder when j+1 == i
                stages.append((f"a{i}.d{j}", j, (j + 1,)))
                stages.append((f"b{i}.d{j}", j, (j + 1,)))
        for i in range(n):
            succs = []
            if i + 1 < n:
                succs.append(i + 1)  # carry into the next adder
            if n - 1 - i > 0:
                succs.append(i + 1)  # sum into its delay line
            stages.append((f"fa{i}", i, tuple(succs)))
            for j in range(n - 1 - i):
                col = i + 1 + j
                succ = (col + 1,) if j + 1 < n - 1 - i else ()
                stages.append((f"s{i}.d{j}", col, succ))

        snapshots = []
        for q in range(self.quarters):
            views = []
            for name, col, succ_cols in stages:
                fire = col
                input_set = fire - 1 <= q < fire + 1
                raised = fire <= q < fire + 2
                views.append(PipelineStage(
                    name=name, column=col,
                    input_data_set=input_set,
                    arms_raised=raised,
                    output_raised=raised,
                    successor_columns=succ_cols,
                    successor_arms_raised=tuple(
                        sc <= q < sc + 2 for sc in succ_cols),
                ))
            snapshots.append(PipelineSnapshot(quarter=q, stages=tuple(views)))
        return total, carry, snapshots


def build_ripple_adder(bits: int = 8) -> AdderPipeline:
    return AdderPipeline(bits)


# -- force isolation -------------------------------------------------------------

def chain_stage_views(cells: Sequence[ShiftCell]) -> tuple[PipelineStage, ...]:
    views = []
    for k, c in enumerate(cells):
        succ = (k + 1,) if k + 1 < len(cells) else ()
        succ_arms = tuple(cells[s].balance.input == 1 for s in succ)
        views.append(PipelineStage(
            name=f"cell{k}", column=k,
            input_data_set=c.holding_value() is not BLANK,
            arms_raised=c.balance.input == 1,
            output_raised=c.output_value() is not BLANK,
            successor_columns=succ,
            successor_arms_raised=succ_arms,
        ))
    return tuple(views)


def force_isolation(stages: Sequence[PipelineStage] | Sequence[ShiftCell]) -> int:
    """Largest movable region reachable from any signal rail, in cells.

    Motion entering a signal line can cross a stage only through its
    balance; the balance seesaw is pinned whenever the stage's data locks
    hold an arm, and a boundary rail is pinned when the downstream holding
    lock has its arm up.  A movable stage therefore couples at most itself
    and its immediate successors, and any data in flight pins the region to
    a single column.
    """
    if stages and isinstance(stages[0], ShiftCell):
        stages = chain_stage_views(stages)
    worst = 0
    for s in stages:
        if s.input_data_set:
            continue  # data locks pin the arms; nothing here can move
        columns = {s.column}
        movable = True
        for col, succ_raised in zip(s.successor_columns, s.successor_arms_raised):
            if succ_raised:
                # the successor's raised arm pins the shared connecting link,
                # which pins the seesaw and with it the whole stage
                movable = False
                break
            columns.add(col)
        if not movable:
            continue
        span = max(columns) - min(columns) + 1
        worst = max(worst, span)
    return worst
