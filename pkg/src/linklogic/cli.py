"""Command-line front end.

Commands: run, truth-table, check, reverse, energy, render.  Output is
aligned text by default or a --json-lines record stream.  Exit codes:
0 ok, 2 parse error, 3 validation error, 4 simulation error, 5 I/O error.
Every error path prints one machine-parseable line to stderr:

    error code=<exit> kind=<ExceptionName> msg="<message>"
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from . import __version__
from .clocking import ClockProgram, validate_clock
from .energy import (
    DragModel,
    InertialModel,
    drag_energy_per_joint,
    energy_time_product,
    inertial_analysis,
    landauer_context,
    mems_density,
)
from .errors import (
    BindingDetected,
    BindingViolation,
    BothSidesFree,
    BothSidesLocked,
    CrosscheckFailed,
    ForbiddenState,
    ForbiddenWiring,
    IoFailure,
    LinkLogicError,
    NetlistError,
    NetlistSyntaxError,
    NoConvergence,
    NonPeriodicProfile,
    NotReversible,
    ScheduleViolation,
)
from .gates import BLANK, DualRailValue, evaluate, evaluate_reverse, truth_table
from .netlist_io import NetlistDocument, parse, serialize
from .render import render_chain_trace, render_lock_states
from .sequential import (
    ChainState,
    blank_chain,
    chain_reverse,
    chain_simulate,
    force_isolation,
)

PARSE_ERRORS = (NetlistSyntaxError, ForbiddenWiring)
SIMULATION_ERRORS = (ForbiddenState, ScheduleViolation, BindingViolation,
                     BothSidesFree, BothSidesLocked, BindingDetected,
                     NoConvergence, NotReversible, CrosscheckFailed,
                     NonPeriodicProfile)


def _exit_code(exc: Exception) -> int:
    if isinstance(exc, PARSE_ERRORS):
        return 2
    if isinstance(exc, SIMULATION_ERRORS):
        return 4
    if isinstance(exc, IoFailure):
        return 5
    if isinstance(exc, (NetlistError, ValueError)):
        return 3
    return 3


def _fail(exc: Exception) -> int:
    code = _exit_code(exc)
    msg = str(exc).replace('"', "'")
    print(f'error code={code} kind={type(exc).__name__} msg="{msg}"',
          file=sys.stderr)
    return code


def _load(path: str) -> NetlistDocument:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    return parse(text)


def _emit(records: list[dict], json_lines: bool, text_lines: list[str]) -> None:
    if json_lines:
        for r in records:
            print(json.dumps(r, sort_keys=True))
    else:
        for line in text_lines:
            print(line)


def _vector(doc: NetlistDocument, name: str):
    if name not in doc.vectors:
        raise NetlistError(f"document has no vector {name!r}")
    return doc.vectors[name]


def _trace_records(state: ChainState) -> list[dict]:
    records = []
    for e in state.trace.events:
        for k, cell in enumerate(e.cells):
            records.append({"t": e.t, "element": f"cell{k}",
                            "state": {"holding": cell.holding_value().name,
                                      "output": cell.output_value().name,
                                      "balance": cell.balance.input}})
        for v in e.delivered:
            records.append({"t": e.t, "element": "chain.output",
                            "state": v.name})
    return records


# -- commands -----------------------------------------------------------------

def cmd_run(args) -> int:
    doc = _load(args.file)
    vec = _vector(doc, args.vector)
    if doc.is_sequential:
        stream = dict(vec.assignments).get(doc.input_port_names[0])
        if stream is None:
            raise NetlistError(
                f"vector {args.vector!r} does not drive {doc.input_port_names[0]!r}")
        cells = blank_chain(len(doc.chain_order()))
        cycles = args.cycles or (len(stream) + (len(cells) + 3) // 4)
        state = chain_simulate(cells, doc.clock, stream, cycles)
        outs = [v.bit for v in state.outputs]
        records = _trace_records(state)
        records.append({"t": None, "element": "stream",
                        "state": outs})
        _emit(records, args.json_lines,
              [f"cycles     {cycles}",
               f"events     {len(state.trace.events)}",
               "output     " + ",".join(str(b) for b in outs)])
    else:
        netlist = doc.combinational_netlist()
        inputs = {port: bits[0] for port, bits in vec.assignments}
        result = evaluate(netlist, inputs, clock_active=True)
        records = [{"port": p, "value": v.bit, "rails": [v.rail0, v.rail1]}
                   for p, v in result.items()]
        _emit(records, args.json_lines,
              [f"{p:<10s} {v.bit}" for p, v in result.items()])
    return 0


def cmd_truth_table(args) -> int:
    doc = _load(args.file)
    if doc.is_sequential:
        raise NetlistError("truth tables are for combinational documents")
    table = truth_table(doc.combinational_netlist())
    if args.json_lines:
        for ins, outs in table.rows:
            print(json.dumps({
                "inputs": dict(zip(table.input_names, ins)),
                "outputs": dict(zip(table.output_names, outs))}, sort_keys=True))
    else:
        print(table.format_text())
    return 0


def cmd_check(args) -> int:
    doc = _load(args.file)
    records: list[dict] = []
    lines: list[str] = []
    failed = False

    clock = doc.clock or ClockProgram()
    report = validate_clock(clock)
    records.append({"check": "clock", "passed": report.passed,
                    "overlap": report.overlap, "dwell": report.dwell})
    lines.append(f"clock      {'PASS' if report.passed else 'FAIL'} "
                 f"overlap={report.overlap:.4f} dwell={report.dwell:.4f}")
    for m in report.messages:
        lines.append(f"           {m}")
    failed |= not report.passed

    iso_rows: list[tuple[float, int]] = []
    if doc.is_sequential:
        cells = blank_chain(len(doc.chain_order()))
        stream = [k % 2 for k in range(len(cells) + 4)]
        if report.passed:
            state = chain_simulate(cells, clock, stream, len(stream) + 2)
            iso_rows = [(e.t, force_isolation(e.cells))
                        for e in state.trace.events]
            worst = max((n for _, n in iso_rows), default=0)
            ok = worst <= 2
            records.append({"check": "force-isolation", "passed": ok,
                            "max_cells": worst})
            lines.append(f"isolation  {'PASS' if ok else 'FAIL'} max={worst} (bound 2)")
            failed |= not ok
    else:
        netlist = doc.combinational_netlist()
        records.append({"check": "netlist", "passed": True,
                        "elements": len(netlist.elements),
                        "rails": len(netlist.rails)})
        lines.append(f"netlist    PASS elements={len(netlist.elements)} "
                     f"rails={len(netlist.rails)}")

    _emit(records, args.json_lines, lines)

    if args.figures:
        from .figures import plot_clock_program, plot_spring_energy
        out = Path(args.figures)
        try:
            out.mkdir(parents=True, exist_ok=True)
            plot_clock_program(clock, out / "clock.png")
            plot_spring_energy(doc.lock_geometry, out / "spring_energy.png")
            with (out / "check.csv").open("w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(["check", "passed", "detail"])
                for r in records:
                    detail = {k: v for k, v in r.items()
                              if k not in ("check", "passed")}
                    w.writerow([r["check"], r["passed"], json.dumps(detail)])
                for t, n in iso_rows:
                    w.writerow(["isolation-event", n <= 2, f"t={t} cells={n}"])
        except OSError as exc:
            raise IoFailure(f"cannot write figures to {out}: {exc}") from exc
    if failed:
        raise NetlistError("check failed; see report above")
    return 0


def cmd_reverse(args) -> int:
    doc = _load(args.file)
    vec = _vector(doc, args.vector)
    if doc.is_sequential:
        stream = dict(vec.assignments)[doc.input_port_names[0]]
        cells = blank_chain(len(doc.chain_order()))
        cycles = args.cycles or len(stream)
        state = chain_simulate(cells, doc.clock, stream, cycles)
        rewound, _ = chain_reverse(state, doc.clock)
        ok = rewound.cells == tuple(cells)
        if not ok:
            raise ScheduleViolation("reverse run did not restore the initial state")
        _emit([{"check": "reversibility", "passed": True,
                "events": len(state.trace.events)}], args.json_lines,
              [f"reversed   {len(state.trace.events)} events back to rest: PASS"])
    else:
        netlist = doc.combinational_netlist()
        outputs = {port: bits[0] for port, bits in vec.assignments}
        inputs = evaluate_reverse(netlist, outputs)
        records = [{"port": p, "value": v.bit} for p, v in inputs.items()]
        _emit(records, args.json_lines,
              [f"{p:<10s} {v.bit}" for p, v in inputs.items()])
    return 0


def cmd_energy(args) -> int:
    rows: list[tuple[str, float, str]] = []
    if args.which == "drag":
        model = DragModel(k_rd=args.k_rd, joints_per_op=args.joints, phi=args.phi)
        per_joint = drag_energy_per_joint(model, args.frequency)
        rows = [
            ("energy_per_joint", per_joint, "J"),
            ("energy_per_op", per_joint * model.joints_per_op, "J"),
            ("energy_time_product", energy_time_product(model), "J*s"),
        ]
    elif args.which == "inertia":
        model = InertialModel(m=args.mass, A=args.amplitude, f=args.frequency,
                              k_lateral=args.k_lateral)
        ia = inertial_analysis(model)
        rows = [
            ("v_max", ia.v_max, "m/s"),
            ("a_max", ia.a_max, "m/s^2"),
            ("f_max", ia.f_max, "N"),
            ("deflection", ia.deflection, "m"),
        ]
    elif args.which == "landauer":
        kt, ktln2 = landauer_context(args.temperature)
        rows = [("kT", kt, "J"), ("kT_ln2", ktln2, "J")]
    elif args.which == "mems":
        count = mems_density(args.die_side, args.cell_w, args.cell_h,
                             args.per_cell)
        rows = [("transistor_equivalents", float(count), "")]
    records = [{"name": n, "value": v, "unit": u} for n, v, u in rows]
    _emit(records, args.json_lines,
          [f"{n:<22s} {v:.6g} {u}" for n, v, u in rows])
    if args.figures:
        from .figures import plot_drag_energy
        out = Path(args.figures)
        try:
            out.mkdir(parents=True, exist_ok=True)
            plot_drag_energy(DragModel(), out / "drag_energy.png")
            with (out / "energy.csv").open("w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(["name", "value", "unit"])
                w.writerows(rows)
        except OSError as exc:
            raise IoFailure(f"cannot write figures to {out}: {exc}") from exc
    return 0


def cmd_render(args) -> int:
    if args.target == "lock":
        from .kinematics import LockGeometry
        geom = LockGeometry(theta_on=args.theta_on)
        paths = render_lock_states(geom, [(0, 0), (1, 0), (0, 1)], args.out)
    else:
        doc = _load(args.target)
        if not doc.is_sequential:
            raise NetlistError("render needs a chain document or the 'lock' target")
        if not args.vector:
            raise NetlistError("rendering a chain document needs --vector")
        vec = _vector(doc, args.vector)
        stream = dict(vec.assignments)[doc.input_port_names[0]]
        cells = blank_chain(len(doc.chain_order()))
        cycles = args.cycles or (len(stream) + (len(cells) + 3) // 4)
        state = chain_simulate(cells, doc.clock, stream, cycles)
        trace = state.trace
        if args.reverse:
            _, trace = chain_reverse(state, doc.clock)
            paths = render_chain_trace(trace, args.out, doc.lock_geometry,
                                       initial=state.cells)
        else:
            paths = render_chain_trace(trace, args.out, doc.lock_geometry,
                                       initial=cells)
    print(f"wrote {len(paths)} frames to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="linklogic",
        description="Simulate mechanical dual-rail logic built from links "
                    "and rotary joints.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="evaluate a netlist against a test vector")
    p.add_argument("file")
    p.add_argument("--vector", required=True)
    p.add_argument("--cycles", type=int, default=None)
    p.add_argument("--json-lines", action="store_true")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("truth-table", help="exhaustive table of a combinational doc")
    p.add_argument("file")
    p.add_argument("--json-lines", action="store_true")
    p.set_defaults(func=cmd_truth_table)

    p = sub.add_parser("check", help="validate clock, wiring and force isolation")
    p.add_argument("file")
    p.add_argument("--json-lines", action="store_true")
    p.add_argument("--figures", metavar="DIR",
                   help="write report figures and CSV alongside the output")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("reverse", help="run a netlist backward")
    p.add_argument("file")
    p.add_argument("--vector", required=True,
                   help="outputs (combinational) or the stream to replay (chain)")
    p.add_argument("--cycles", type=int, default=None)
    p.add_argument("--json-lines", action="store_true")
    p.set_defaults(func=cmd_reverse)

    p = sub.add_parser("energy", help="closed-form implementation estimates")
    es = p.add_subparsers(dest="which", required=True)
    d = es.add_parser("drag")
    d.add_argument("--k-rd", type=float, default=2.4e-35)
    d.add_argument("--joints", type=int, default=10)
    d.add_argument("--phi", type=float, default=1.0)
    d.add_argument("--frequency", type=float, default=100e6)
    i = es.add_parser("inertia")
    i.add_argument("--mass", type=float, default=9e-22)
    i.add_argument("--amplitude", type=float, default=10e-9)
    i.add_argument("--frequency", type=float, default=100e6)
    i.add_argument("--k-lateral", type=float, default=13.0)
    l = es.add_parser("landauer")
    l.add_argument("--temperature", type=float, default=300.0)
    m = es.add_parser("mems")
    m.add_argument("--die-side", type=float, default=2.8e-2)
    m.add_argument("--cell-w", type=float, default=640e-6)
    m.add_argument("--cell-h", type=float, default=1070e-6)
    m.add_argument("--per-cell", type=int, default=2)
    for q in (d, i, l, m):
        q.add_argument("--json-lines", action="store_true")
        q.add_argument("--figures", metavar="DIR")
    p.set_defaults(func=cmd_energy)

    p = sub.add_parser("render", help="write SVG frames of a mechanism or trace")
    p.add_argument("target", help="a chain .lnl file, or 'lock' for the lock demo")
    p.add_argument("out")
    p.add_argument("--vector")
    p.add_argument("--cycles", type=int, default=None)
    p.add_argument("--theta-on", type=float, default=0.7853981633974483)
    p.add_argument("--reverse", action="store_true",
                   help="render the time-reversed trace")
    p.set_defaults(func=cmd_render)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except LinkLogicError as exc:
        return _fail(exc)
    except OSError as exc:
        return _fail(IoFailure(str(exc)))


if __name__ == "__main__":
    sys.exit(main())
