"""The .lnl netlist file format: parsing, serialization, elaboration.

Line-oriented, ``#`` comments, one statement per line:

    rail <name>
    dualrail <name> [in|out]
    lock <name> side0=<r,...> side1=<r,...> [out0=<r>] [out1=<r>]
    balance <name> arm0=<r> arm1=<r> (input=<r> | clock=<phase>)
    route copy <name> src=<r> dst=<r,...>
    route wire <name> src=<r> dst=<r>
    route swap <name> a0=<r> a1=<r> b0=<r> b1=<r>
    gate <kind> <name> <pin>=<dualrail> ... [clock=<phase>]
    cell <name> in=<dualrail> out=<dualrail> phase=<int>
    chain <name> cells=<cell,...>
    clock phases=4 rise=<f> high=<f> fall=<f> low=<f>
    vector <name> <port>=<bits> ...
    lockgeom [L=<f>] [k=<f>] [r=<f>] [theta_on=<f>]

Parsing validates every reference and rejects double-driven rails, so a
document that parses will elaborate.  Serialization is canonical;
parse(serialize(doc)) reproduces the document exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence, Union

from .clocking import ClockProgram
from .errors import (
    DuplicateName,
    ForbiddenWiring,
    NetlistError,
    NetlistSyntaxError,
    UnknownName,
)
from .gates import GateKind, Netlist, NetlistBuilder, build_gate, instantiate
from .kinematics import LockGeometry


# -- statements ----------------------------------------------------------------

@dataclass(frozen=True)
class RailDecl:
    name: str


@dataclass(frozen=True)
class DualRailDecl:
    name: str
    role: str | None = None  # "in" | "out" | None

    @property
    def rails(self) -> tuple[str, str]:
        return (f"{self.name}.0", f"{self.name}.1")


@dataclass(frozen=True)
class LockDecl:
    name: str
    side0: tuple[str, ...]
    side1: tuple[str, ...]
    out0: str | None = None
    out1: str | None = None


@dataclass(frozen=True)
class BalanceDecl:
    name: str
    arm0: str
    arm1: str
    input: str | None = None
    clock: int | None = None


@dataclass(frozen=True)
class RouteDecl:
    kind: str  # "copy" | "wire" | "swap"
    name: str
    pins: tuple[tuple[str, str], ...]  # (pin, value) in declaration order


@dataclass(frozen=True)
class GateDecl:
    kind: str
    name: str
    pins: tuple[tuple[str, str], ...]  # (pin, dualrail name)
    clock: int = 0


@dataclass(frozen=True)
class CellDecl:
    name: str
    input: str
    output: str
    phase: int


@dataclass(frozen=True)
class ChainDecl:
    name: str
    cells: tuple[str, ...]


@dataclass(frozen=True)
class ClockDecl:
    rise: float
    high: float
    fall: float
    low: float

    def program(self) -> ClockProgram:
        return ClockProgram(self.rise, self.high, self.fall, self.low)


@dataclass(frozen=True)
class VectorDecl:
    name: str
    assignments: tuple[tuple[str, tuple[int, ...]], ...]


@dataclass(frozen=True)
class LockGeomDecl:
    L: float = 1.0
    k: float = 1.0
    r: float = 1.0
    theta_on: float = 0.7853981633974483

    def geometry(self) -> LockGeometry:
        return LockGeometry(L=self.L, k=self.k, r=self.r, theta_on=self.theta_on)


Statement = Union[RailDecl, DualRailDecl, LockDecl, BalanceDecl, RouteDecl,
                  GateDecl, CellDecl, ChainDecl, ClockDecl, VectorDecl,
                  LockGeomDecl]


@dataclass(frozen=True)
class NetlistDocument:
    statements: tuple[Statement, ...]

    def _of(self, kind) -> list:
        return [s for s in self.statements if isinstance(s, kind)]

    @cached_property
    def dualrails(self) -> dict[str, DualRailDecl]:
        return {s.name: s for s in self._of(DualRailDecl)}

    @cached_property
    def vectors(self) -> dict[str, VectorDecl]:
        return {s.name: s for s in self._of(VectorDecl)}

    @cached_property
    def cells(self) -> dict[str, CellDecl]:
        return {s.name: s for s in self._of(CellDecl)}

    @cached_property
    def chains(self) -> list[ChainDecl]:
        return self._of(ChainDecl)

    @cached_property
    def clock(self) -> ClockProgram | None:
        decls = self._of(ClockDecl)
        return decls[0].program() if decls else None

    @cached_property
    def lock_geometry(self) -> LockGeometry:
        decls = self._of(LockGeomDecl)
        return decls[0].geometry() if decls else LockGeometry()

    @property
    def is_sequential(self) -> bool:
        return bool(self.cells or self.chains)

    def combinational_netlist(self) -> Netlist:
        """Elaborate the gate/lock/balance statements into a runtime netlist."""
        b = NetlistBuilder()
        for s in self.statements:
            if isinstance(s, RailDecl):
                b.rail(s.name)
            elif isinstance(s, DualRailDecl):
                r0, r1 = b.dual(s.name)
                if s.role == "in":
                    b.input_port(s.name, r0, r1)
                elif s.role == "out":
                    b.output_port(s.name, r0, r1)
        for s in self.statements:
            if isinstance(s, LockDecl):
                b.lock(s.name, s.side0, s.side1, s.out0, s.out1)
            elif isinstance(s, BalanceDecl):
                center = (b.clock_rail(s.clock) if s.clock is not None else s.input)
                b.balance(s.name, center, s.arm0, s.arm1, phase=s.clock)
            elif isinstance(s, RouteDecl):
                pins = dict(s.pins)
                if s.kind == "copy":
                    b.fanout(s.name, pins["src"], pins["dst"].split(","))
                elif s.kind == "wire":
                    b.wire(s.name, pins["src"], pins["dst"])
                else:
                    b.swap(s.name, pins["a0"], pins["a1"], pins["b0"], pins["b1"])
            elif isinstance(s, GateDecl):
                sub = build_gate(s.kind)
                bindings = {pin: self.dualrails[dr].rails for pin, dr in s.pins}
                instantiate(b, sub, s.name, bindings, clock_phase=s.clock)
        return b.build()

    def chain_order(self) -> list[CellDecl]:
        """Cells of the single chain, wiring-checked, in shift order."""
        if not self.chains:
            raise NetlistError("document declares no chain")
        if len(self.chains) > 1:
            raise NetlistError("only one chain per document is supported")
        decl = self.chains[0]
        cells = [self.cells[n] for n in decl.cells]
        for a, bnext in zip(cells, cells[1:]):
            if a.output != bnext.input:
                raise NetlistError(
                    f"chain {decl.name!r}: cell {a.name!r} output {a.output!r} "
                    f"does not feed {bnext.name!r}")
        return cells

    @property
    def input_port_names(self) -> list[str]:
        if self.is_sequential:
            return [self.chain_order()[0].input]
        return [d.name for d in self._of(DualRailDecl) if d.role == "in"]

    @property
    def output_port_names(self) -> list[str]:
        if self.is_sequential:
            return [self.chain_order()[-1].output]
        return [d.name for d in self._of(DualRailDecl) if d.role == "out"]


# -- parsing ----------------------------------------------------------------------

_GATE_KINDS = {k.value for k in GateKind}


class _LineParser:
    def __init__(self, line_no: int, raw: str, stripped: str):
        self.line_no = line_no
        self.line = raw
        self.tokens = stripped.split()

    def fail(self, message: str, token: str | None = None,
             err=NetlistSyntaxError) -> None:
        col = (self.line.find(token) + 1) if token and token in self.line else 1
        raise err(message, self.line_no, col)

    def keywords(self, allowed: Sequence[str], required: Sequence[str],
                 start: int) -> dict[str, str]:
        out: dict[str, str] = {}
        for tok in self.tokens[start:]:
            if "=" not in tok:
                self.fail(f"expected key=value, got {tok!r}", tok)
            key, _, value = tok.partition("=")
            if key not in allowed:
                self.fail(f"unknown argument {key!r}", tok)
            if key in out:
                self.fail(f"duplicate argument {key!r}", tok)
            if value == "":
                self.fail(f"empty value for {key!r}", tok)
            out[key] = value
        for key in required:
            if key not in out:
                self.fail(f"missing argument {key!r}")
        return out

    def to_int(self, value: str) -> int:
        try:
            return int(value)
        except ValueError:
            self.fail(f"expected an integer, got {value!r}", value)

    def to_float(self, value: str) -> float:
        try:
            return float(value)
        except ValueError:
            self.fail(f"expected a number, got {value!r}", value)


def parse(text: str) -> NetlistDocument:
    """Parse .lnl source into a validated document.

    Raises :class:`NetlistSyntaxError` (with line/column),
    :class:`UnknownName`, :class:`DuplicateName` or
    :class:`ForbiddenWiring`.
    """
    statements: list[Statement] = []
    names: dict[str, tuple[str, int]] = {}   # any declared name -> (kind, line)
    rails: dict[str, int] = {}               # rail name -> line declared
    drivers: dict[str, tuple[str, int]] = {}  # rail -> (driver name, line)

    def declare(p: _LineParser, kind: str, name: str) -> None:
        if name in names:
            p.fail(f"{kind} name {name!r} already declared "
                   f"(line {names[name][1]})", name, DuplicateName)
        names[name] = (kind, p.line_no)

    def declare_rail(p: _LineParser, name: str) -> None:
        if name in rails:
            p.fail(f"rail {name!r} already declared (line {rails[name]})",
                   name, DuplicateName)
        rails[name] = p.line_no

    def need_rail(p: _LineParser, name: str) -> str:
        if name not in rails:
            p.fail(f"unknown rail {name!r}", name, UnknownName)
        return name

    def claim(p: _LineParser, rail: str, driver: str) -> None:
        if rail in drivers:
            p.fail(f"rail {rail!r} already driven by {drivers[rail][0]!r} "
                   f"(line {drivers[rail][1]})", rail, ForbiddenWiring)
        drivers[rail] = (driver, p.line_no)

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        p = _LineParser(line_no, raw, line)
        head = p.tokens[0]

        if head == "rail":
            if len(p.tokens) != 2:
                p.fail("usage: rail <name>")
            declare(p, "rail", p.tokens[1])
            declare_rail(p, p.tokens[1])
            statements.append(RailDecl(p.tokens[1]))

        elif head == "dualrail":
            if len(p.tokens) not in (2, 3):
                p.fail("usage: dualrail <name> [in|out]")
            name = p.tokens[1]
            role = p.tokens[2] if len(p.tokens) == 3 else None
            if role not in (None, "in", "out"):
                p.fail(f"dualrail role must be 'in' or 'out', got {role!r}", role)
            declare(p, "dualrail", name)
            decl = DualRailDecl(name, role)
            for r in decl.rails:
                declare_rail(p, r)
            if role == "in":
                for r in decl.rails:
                    claim(p, r, name)
            statements.append(decl)

        elif head == "lock":
            if len(p.tokens) < 2:
                p.fail("usage: lock <name> side0=... side1=...")
            name = p.tokens[1]
            kw = p.keywords(("side0", "side1", "out0", "out1"),
                            ("side0", "side1"), 2)
            declare(p, "lock", name)
            side0 = tuple(need_rail(p, r) for r in kw["side0"].split(","))
            side1 = tuple(need_rail(p, r) for r in kw["side1"].split(","))
            out0 = kw.get("out0")
            out1 = kw.get("out1")
            for out in (out0, out1):
                if out is not None:
                    need_rail(p, out)
                    claim(p, out, name)
            statements.append(LockDecl(name, side0, side1, out0, out1))

        elif head == "balance":
            if len(p.tokens) < 2:
                p.fail("usage: balance <name> arm0=... arm1=... (input=...|clock=N)")
            name = p.tokens[1]
            kw = p.keywords(("arm0", "arm1", "input", "clock"), ("arm0", "arm1"), 2)
            declare(p, "balance", name)
            if ("input" in kw) == ("clock" in kw):
                p.fail("balance needs exactly one of input= or clock=")
            arm0, arm1 = need_rail(p, kw["arm0"]), need_rail(p, kw["arm1"])
            claim(p, arm0, name)
            claim(p, arm1, name)
            inp = need_rail(p, kw["input"]) if "input" in kw else None
            clk = p.to_int(kw["clock"]) if "clock" in kw else None
            statements.append(BalanceDecl(name, arm0, arm1, inp, clk))

        elif head == "route":
            if len(p.tokens) < 3:
                p.fail("usage: route <copy|wire|swap> <name> ...")
            kind, name = p.tokens[1], p.tokens[2]
            declare(p, "route", name)
            if kind == "copy":
                kw = p.keywords(("src", "dst"), ("src", "dst"), 3)
                need_rail(p, kw["src"])
                for r in kw["dst"].split(","):
                    need_rail(p, r)
                    claim(p, r, name)
            elif kind == "wire":
                kw = p.keywords(("src", "dst"), ("src", "dst"), 3)
                need_rail(p, kw["src"])
                need_rail(p, kw["dst"])
                claim(p, kw["dst"], name)
            elif kind == "swap":
                kw = p.keywords(("a0", "a1", "b0", "b1"),
                                ("a0", "a1", "b0", "b1"), 3)
                for pin in ("a0", "a1", "b0", "b1"):
                    need_rail(p, kw[pin])
                claim(p, kw["b0"], name)
                claim(p, kw["b1"], name)
            else:
                p.fail(f"unknown route kind {kind!r}", kind)
            statements.append(RouteDecl(kind, name, tuple(kw.items())))

        elif head == "gate":
            if len(p.tokens) < 3:
                p.fail("usage: gate <kind> <name> pin=<dualrail> ... clock=N")
            kind, name = p.tokens[1], p.tokens[2]
            if kind not in _GATE_KINDS:
                p.fail(f"unknown gate kind {kind!r}", kind)
            declare(p, "gate", name)
            sub = build_gate(kind)
            pin_names = [q.name for q in sub.ports]
            kw = p.keywords(tuple(pin_names) + ("clock",), tuple(pin_names), 3)
            clock = p.to_int(kw.pop("clock", "0"))
            pins = []
            for pin, dr in kw.items():
                if dr not in names or names[dr][0] != "dualrail":
                    p.fail(f"unknown dualrail {dr!r}", dr, UnknownName)
                pins.append((pin, dr))
            for q in sub.output_ports:
                dr = kw[q.name]
                for r in (f"{dr}.0", f"{dr}.1"):
                    claim(p, r, name)
            statements.append(GateDecl(kind, name, tuple(pins), clock))

        elif head == "cell":
            if len(p.tokens) < 2:
                p.fail("usage: cell <name> in=<dualrail> out=<dualrail> phase=N")
            name = p.tokens[1]
            kw = p.keywords(("in", "out", "phase"), ("in", "out", "phase"), 2)
            declare(p, "cell", name)
            for key in ("in", "out"):
                dr = kw[key]
                if dr not in names or names[dr][0] != "dualrail":
                    p.fail(f"unknown dualrail {dr!r}", dr, UnknownName)
            for r in DualRailDecl(kw["out"]).rails:
                claim(p, r, name)
            statements.append(CellDecl(name, kw["in"], kw["out"],
                                       p.to_int(kw["phase"])))

        elif head == "chain":
            if len(p.tokens) < 2:
                p.fail("usage: chain <name> cells=<c1,c2,...>")
            name = p.tokens[1]
            kw = p.keywords(("cells",), ("cells",), 2)
            declare(p, "chain", name)
            members = tuple(kw["cells"].split(","))
            for c in members:
                if c not in names or names[c][0] != "cell":
                    p.fail(f"unknown cell {c!r}", c, UnknownName)
            statements.append(ChainDecl(name, members))

        elif head == "clock":
            kw = p.keywords(("phases", "rise", "high", "fall", "low"),
                            ("phases", "rise", "high", "fall", "low"), 1)
            if p.to_int(kw["phases"]) != 4:
                p.fail("only phases=4 is supported", kw["phases"])
            if any(isinstance(s, ClockDecl) for s in statements):
                p.fail("duplicate clock declaration", err=DuplicateName)
            statements.append(ClockDecl(
                p.to_float(kw["rise"]), p.to_float(kw["high"]),
                p.to_float(kw["fall"]), p.to_float(kw["low"])))

        elif head == "vector":
            if len(p.tokens) < 3:
                p.fail("usage: vector <name> <port>=<bits> ...")
            name = p.tokens[1]
            declare(p, "vector", name)
            assignments = []
            for tok in p.tokens[2:]:
                if "=" not in tok:
                    p.fail(f"expected port=bits, got {tok!r}", tok)
                port, _, bits = tok.partition("=")
                if port not in names or names[port][0] != "dualrail":
                    p.fail(f"unknown port {port!r}", port, UnknownName)
                try:
                    values = tuple(int(x) for x in bits.split(","))
                except ValueError:
                    p.fail(f"bits must be 0 or 1, got {bits!r}", bits)
                if any(v not in (0, 1) for v in values):
                    p.fail(f"bits must be 0 or 1, got {bits!r}", bits)
                assignments.append((port, values))
            statements.append(VectorDecl(name, tuple(assignments)))

        elif head == "lockgeom":
            kw = p.keywords(("L", "k", "r", "theta_on"), (), 1)
            defaults = LockGeomDecl()
            statements.append(LockGeomDecl(
                L=p.to_float(kw.get("L", repr(defaults.L))),
                k=p.to_float(kw.get("k", repr(defaults.k))),
                r=p.to_float(kw.get("r", repr(defaults.r))),
                theta_on=p.to_float(kw.get("theta_on", repr(defaults.theta_on)))))

        else:
            p.fail(f"unknown statement {head!r}", head)

    doc = NetlistDocument(tuple(statements))
    _validate_document(doc)
    return doc


def _validate_document(doc: NetlistDocument) -> None:
    if doc.is_sequential:
        if doc.clock is None:
            raise NetlistError(
                "sequential documents need exactly one clock declaration")
        if any(isinstance(s, (GateDecl, LockDecl, BalanceDecl))
               for s in doc.statements):
            raise NetlistError(
                "mixing gates with shift cells in one document is not supported")
        doc.chain_order()
        for k, cell in enumerate(doc.chain_order()):
            if cell.phase != k % 4:
                raise NetlistError(
                    f"cell {cell.name!r} has phase {cell.phase}; "
                    f"chains assign phases round-robin from 0")


# -- serialization -------------------------------------------------------------

def _fmt_float(x: float) -> str:
    return repr(float(x))


def serialize(doc: NetlistDocument) -> str:
    lines = []
    for s in doc.statements:
        if isinstance(s, RailDecl):
            lines.append(f"rail {s.name}")
        elif isinstance(s, DualRailDecl):
            lines.append(f"dualrail {s.name}" + (f" {s.role}" if s.role else ""))
        elif isinstance(s, LockDecl):
            line = f"lock {s.name} side0={','.join(s.side0)} side1={','.join(s.side1)}"
            if s.out0 is not None:
                line += f" out0={s.out0}"
            if s.out1 is not None:
                line += f" out1={s.out1}"
            lines.append(line)
        elif isinstance(s, BalanceDecl):
            line = f"balance {s.name} arm0={s.arm0} arm1={s.arm1}"
            line += (f" input={s.input}" if s.input is not None
                     else f" clock={s.clock}")
            lines.append(line)
        elif isinstance(s, RouteDecl):
            args = " ".join(f"{k}={v}" for k, v in s.pins)
            lines.append(f"route {s.kind} {s.name} {args}")
        elif isinstance(s, GateDecl):
            args = " ".join(f"{k}={v}" for k, v in s.pins)
            lines.append(f"gate {s.kind} {s.name} {args} clock={s.clock}")
        elif isinstance(s, CellDecl):
            lines.append(f"cell {s.name} in={s.input} out={s.output} phase={s.phase}")
        elif isinstance(s, ChainDecl):
            lines.append(f"chain {s.name} cells={','.join(s.cells)}")
        elif isinstance(s, ClockDecl):
            lines.append("clock phases=4 "
                         f"rise={_fmt_float(s.rise)} high={_fmt_float(s.high)} "
                         f"fall={_fmt_float(s.fall)} low={_fmt_float(s.low)}")
        elif isinstance(s, VectorDecl):
            args = " ".join(f"{port}={','.join(str(b) for b in bits)}"
                            for port, bits in s.assignments)
            lines.append(f"vector {s.name} {args}")
        elif isinstance(s, LockGeomDecl):
            lines.append(f"lockgeom L={_fmt_float(s.L)} k={_fmt_float(s.k)} "
                         f"r={_fmt_float(s.r)} theta_on={_fmt_float(s.theta_on)}")
        else:
            raise NetlistError(f"cannot serialize {s!r}")
    return "\n".join(lines) + "\n"
