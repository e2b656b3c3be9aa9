"""Line-oriented netlist format: parsing, validation, circuit construction.

One record per line, ``#`` starts a comment, blank lines ignored. Numbers
accept SPICE-style magnitude suffixes (t g meg k m u n p f). Angles are
given in degrees. Grammar (positional fields, then key=value fields):

    title <free text>
    units si|pu
    ground <node>
    node <name> [<name> ...]
    resistor <name> <n+> <n-> r=<ohm>
    inductor <name> <n+> <n-> l=<henry> [i0=<amp>]
    mutual   <name> <ind1> <ind2> m=<henry>
    vsource  <name> <n+> <n-> dc=<volt>
    vsource  <name> <n+> <n-> vpk=<volt> f=<hertz> [phase=<deg>]
    isource  <name> <n+> <n-> dc=<amp> | ipk=<amp> f=<hertz> [phase=<deg>]
    vccs     <name> <out+> <out-> <c+> <c-> g=<siemens>
    ccvs     <name> <n+> <n-> r=<ohm> ctrl=<element>
    switch   <name> <n+> <n-> state=open|closed [toggle=<s>[,<s>...]]
    slack    <name> <node> vm=<v> [va=<deg>]
    line     <name> <n1> <n2> [r=<ohm>] x=<ohm> [fbase=<hertz>]
    pq       <name> <node> p=<watt> q=<var>
    pv       <name> <node> p=<watt> vset=<volt>
    source3  <name> <a> <b> <c> vll=<volt> f=<hertz> [phase=<deg>]
    motor    <name> <a> <b> <c> rs= rr= lls= llr= lm= j= d= poles= tl=
             vll= f= [pin=<rad/s>] [theta0=<deg>]
    analysis steady|transient|compare [dt=] [tend=] [tstart=] [tol=] [maxnr=]

``mutual`` merges the named inductors into one coupled block (the block
takes the mutual record's name; coil order follows inductor declaration
order). ``source3`` expands to three wye sources <name>_a/_b/_c with the
peak phase voltage vll*sqrt(2)/sqrt(3) and the b/c phases at -/+120
degrees. ``tl=`` takes a comma list of polynomial coefficients in rotor
speed, constant first. In motor records ``phase`` on the source3 line is
the phase-a cosine angle; 180 degrees reproduces the bundled machine's
documented alignment.

Parsing is total: malformed input raises ParseError, semantically invalid
input raises ValidationError, both carrying the 1-based line (and column
where identifiable). The ``units`` declaration is descriptive; records are
interpreted identically in both systems.
"""

import math
import re
from dataclasses import dataclass, field

import numpy as np

from .circuit import (
    Ccvs,
    CircuitGraph,
    CoupledInductors,
    CurrentSource,
    IdealSwitch,
    Line,
    Resistor,
    Vccs,
    VoltageSource,
)
from .errors import EcsimError, InvalidParamsError, ParseError, ValidationError
from .machine import InductionMotor, MotorParams
from .steady import PqLoad, PvGenerator

_SUFFIXES = (("meg", 1e6), ("t", 1e12), ("g", 1e9), ("k", 1e3), ("m", 1e-3),
             ("u", 1e-6), ("n", 1e-9), ("p", 1e-12), ("f", 1e-15))


def parse_value(token, line=None, column=None):
    """Float with optional magnitude suffix: '2.191m' -> 0.002191."""
    tok = token.strip().lower()
    try:
        return float(tok)
    except ValueError:
        pass
    for suffix, scale in _SUFFIXES:
        if tok.endswith(suffix):
            try:
                return float(tok[:-len(suffix)]) * scale
            except ValueError:
                break
    raise ParseError(f"bad numeric value {token!r}", line, column)


@dataclass
class AnalysisSpec:
    kind: str
    dt: float = 1e-4
    t_end: float = None
    t_start: float = 0.0
    tol: float = 1e-9
    max_nr: int = 50


@dataclass
class Netlist:
    """Validated netlist: node table, constructed elements, analysis defaults."""

    title: str = ""
    units: str = "si"
    node_names: list = field(default_factory=lambda: ["0"])
    elements: list = field(default_factory=list)
    analysis: AnalysisSpec = None
    _circuit: object = field(default=None, repr=False)

    def circuit(self):
        if self._circuit is None:
            self._circuit = CircuitGraph(len(self.node_names), self.elements,
                                         node_names=list(self.node_names))
        return self._circuit

    def motor_elements(self):
        return [el for el in self.elements if isinstance(el, InductionMotor)]


class _Tokens:
    """One record line split into (text, column) tokens."""

    def __init__(self, line_text, line_no):
        self.line = line_no
        self.items = [(m.group(), m.start() + 1)
                      for m in re.finditer(r"\S+", line_text)]
        self.pos = 0

    def take(self, what):
        if self.pos >= len(self.items):
            raise ParseError(f"missing {what}", self.line)
        tok, col = self.items[self.pos]
        if "=" in tok:
            raise ParseError(f"expected {what} before key=value fields", self.line, col)
        self.pos += 1
        return tok, col

    def keyvalues(self, allowed, required):
        fields = {}
        for tok, col in self.items[self.pos:]:
            if "=" not in tok:
                raise ParseError(f"expected key=value, got {tok!r}", self.line, col)
            key, _, val = tok.partition("=")
            key = key.lower()
            if key not in allowed:
                raise ParseError(f"unknown key {key!r}", self.line, col)
            if key in fields:
                raise ParseError(f"duplicate key {key!r}", self.line, col)
            if val == "":
                raise ParseError(f"empty value for {key!r}", self.line, col)
            fields[key] = (val, col)
        for key in required:
            if key not in fields:
                raise ParseError(f"missing required key {key}=", self.line)
        return fields


class _Builder:
    def __init__(self):
        self.title = ""
        self.units = "si"
        self.ground = None
        self.ground_line = None
        self.nodes = {}        # name -> declaration order (1-based later)
        self.node_order = []
        self.records = []      # (kind, name, payload, line)
        self.names = {}        # element/record name -> line
        self.analysis = None
        self.inductors = {}    # name -> (nodes, l, i0, line, order)
        self.mutuals = []      # (name, l1, l2, m, line)

    # -- helpers ---------------------------------------------------------

    def declare_node(self, name, line, col):
        if name == self.ground or name in self.nodes:
            raise ValidationError(f"node {name!r} declared twice", line, col)
        self.nodes[name] = line
        self.node_order.append(name)

    def node_index(self, name, line, col):
        if self.ground is not None and name == self.ground:
            return 0
        if name not in self.nodes:
            raise ValidationError(f"undeclared node {name!r}", line, col)
        return self.node_order.index(name) + 1

    def unique_name(self, name, line):
        if name in self.names:
            raise ValidationError(
                f"duplicate element name {name!r} (first on line {self.names[name]})",
                line)
        self.names[name] = line

    def value(self, fields, key, line):
        val, col = fields[key]
        return parse_value(val, line, col)

    def angle(self, fields, key, line, default=0.0):
        if key not in fields:
            return default
        return math.radians(self.value(fields, key, line))


def _parse_record(b, tokens):
    kind_tok, kind_col = tokens.items[0]
    kind = kind_tok.lower()
    tokens.pos = 1
    line = tokens.line

    if kind == "title":
        b.title = " ".join(t for t, _ in tokens.items[1:])
        return
    if kind == "units":
        val, col = tokens.take("unit system")
        if val.lower() not in ("si", "pu"):
            raise ParseError(f"units must be si or pu, got {val!r}", line, col)
        b.units = val.lower()
        return
    if kind == "ground":
        name, col = tokens.take("ground node name")
        if b.ground is not None:
            raise ValidationError(
                f"second ground (first on line {b.ground_line})", line, col)
        if name in b.nodes:
            raise ValidationError(f"node {name!r} already declared", line, col)
        b.ground, b.ground_line = name, line
        tokens.keyvalues((), ())
        return
    if kind == "node":
        if tokens.pos >= len(tokens.items):
            raise ParseError("node record needs at least one name", line)
        for tok, col in tokens.items[1:]:
            if "=" in tok:
                raise ParseError("node record takes no key=value fields", line, col)
            b.declare_node(tok, line, col)
        return
    if kind == "analysis":
        what, col = tokens.take("analysis kind")
        if what.lower() not in ("steady", "transient", "compare"):
            raise ParseError(f"unknown analysis {what!r}", line, col)
        if b.analysis is not None:
            raise ValidationError("second analysis record", line)
        fields = tokens.keyvalues(("dt", "tend", "tstart", "tol", "maxnr"), ())
        spec = AnalysisSpec(what.lower())
        if "dt" in fields:
            spec.dt = b.value(fields, "dt", line)
        if "tend" in fields:
            spec.t_end = b.value(fields, "tend", line)
        if "tstart" in fields:
            spec.t_start = b.value(fields, "tstart", line)
        if "tol" in fields:
            spec.tol = b.value(fields, "tol", line)
        if "maxnr" in fields:
            raw, col = fields["maxnr"]
            try:
                spec.max_nr = int(raw)
            except ValueError:
                raise ParseError(f"maxnr must be an integer, got {raw!r}",
                                 line, col) from None
        if spec.dt <= 0 or spec.tol <= 0 or spec.max_nr < 1:
            raise ValidationError("analysis needs dt > 0, tol > 0, maxnr >= 1", line)
        b.analysis = spec
        return

    # every remaining record is <kind> <name> <nodes...> key=value...
    name, name_col = tokens.take("element name")
    b.unique_name(name, line)

    def nodes(count):
        out = []
        for _ in range(count):
            tok, col = tokens.take("node name")
            out.append(b.node_index(tok, line, col))
        return out

    if kind == "resistor":
        nds = nodes(2)
        fields = tokens.keyvalues(("r",), ("r",))
        b.records.append((Resistor, (name, nds, b.value(fields, "r", line)), {}, line))
    elif kind == "inductor":
        nds = nodes(2)
        fields = tokens.keyvalues(("l", "i0"), ("l",))
        i0 = b.value(fields, "i0", line) if "i0" in fields else 0.0
        b.inductors[name] = (nds, b.value(fields, "l", line), i0, line,
                             len(b.inductors))
    elif kind == "mutual":
        l1, c1 = tokens.take("first inductor")
        l2, c2 = tokens.take("second inductor")
        fields = tokens.keyvalues(("m",), ("m",))
        b.mutuals.append((name, l1, l2, b.value(fields, "m", line), line))
    elif kind == "vsource" or kind == "isource":
        nds = nodes(2)
        peak_key = "vpk" if kind == "vsource" else "ipk"
        fields = tokens.keyvalues(("dc", peak_key, "f", "phase"), ())
        cls = VoltageSource if kind == "vsource" else CurrentSource
        if "dc" in fields:
            if peak_key in fields or "f" in fields or "phase" in fields:
                raise ParseError("dc= source takes no AC fields", line)
            b.records.append((cls, (name, nds), {"dc": b.value(fields, "dc", line)},
                              line))
        elif peak_key in fields:
            kw = {peak_key: b.value(fields, peak_key, line),
                  "phase": b.angle(fields, "phase", line)}
            if "f" in fields:
                kw["freq"] = b.value(fields, "f", line)
            b.records.append((cls, (name, nds), kw, line))
        else:
            raise ParseError(f"source needs dc= or {peak_key}=", line)
    elif kind == "vccs":
        nds = nodes(4)
        fields = tokens.keyvalues(("g",), ("g",))
        b.records.append((Vccs, (name, nds, b.value(fields, "g", line)), {}, line))
    elif kind == "ccvs":
        nds = nodes(2)
        fields = tokens.keyvalues(("r", "ctrl"), ("r", "ctrl"))
        ctrl, _ = fields["ctrl"]
        b.records.append((Ccvs, (name, nds, b.value(fields, "r", line), ctrl),
                          {}, line))
    elif kind == "switch":
        nds = nodes(2)
        fields = tokens.keyvalues(("state", "toggle"), ("state",))
        state, col = fields["state"]
        if state.lower() not in ("open", "closed"):
            raise ParseError(f"state must be open or closed, got {state!r}",
                             line, col)
        toggles = ()
        if "toggle" in fields:
            raw, col = fields["toggle"]
            toggles = tuple(parse_value(p, line, col) for p in raw.split(","))
        b.records.append((IdealSwitch,
                          (name, nds, state.lower() == "closed", toggles), {}, line))
    elif kind == "slack":
        nds = nodes(1)
        fields = tokens.keyvalues(("vm", "va", "f"), ("vm",))
        kw = {"vpk": b.value(fields, "vm", line),
              "phase": b.angle(fields, "va", line)}
        if "f" in fields:
            kw["freq"] = b.value(fields, "f", line)
        b.records.append((VoltageSource, (name, (nds[0], 0)), kw, line))
    elif kind == "line":
        nds = nodes(2)
        fields = tokens.keyvalues(("r", "x", "fbase"), ("x",))
        r = b.value(fields, "r", line) if "r" in fields else 0.0
        fbase = b.value(fields, "fbase", line) if "fbase" in fields else 60.0
        b.records.append((Line, (name, nds, r, b.value(fields, "x", line), fbase),
                          {}, line))
    elif kind == "pq":
        nds = nodes(1)
        fields = tokens.keyvalues(("p", "q"), ("p", "q"))
        b.records.append((PqLoad, (name, nds, b.value(fields, "p", line),
                                   b.value(fields, "q", line)), {}, line))
    elif kind == "pv":
        nds = nodes(1)
        fields = tokens.keyvalues(("p", "vset"), ("p", "vset"))
        b.records.append((PvGenerator, (name, nds, b.value(fields, "p", line),
                                        b.value(fields, "vset", line)), {}, line))
    elif kind == "source3":
        nds = nodes(3)
        fields = tokens.keyvalues(("vll", "f", "phase"), ("vll", "f"))
        vll = b.value(fields, "vll", line)
        freq = b.value(fields, "f", line)
        phase = b.angle(fields, "phase", line)
        vpk = vll * math.sqrt(2.0) / math.sqrt(3.0)
        lam = 2.0 * math.pi / 3.0
        for suffix, node, shift in (("a", nds[0], 0.0), ("b", nds[1], -lam),
                                    ("c", nds[2], lam)):
            sub = f"{name}_{suffix}"
            b.unique_name(sub, line)
            b.records.append((VoltageSource, (sub, (node, 0)),
                              {"vpk": vpk, "freq": freq, "phase": phase + shift},
                              line))
    elif kind == "motor":
        nds = nodes(3)
        keys = ("rs", "rr", "lls", "llr", "lm", "j", "d", "poles", "tl",
                "vll", "f")
        fields = tokens.keyvalues(keys + ("pin", "theta0"), keys)
        raw_poles, pcol = fields["poles"]
        try:
            poles = int(raw_poles)
        except ValueError:
            raise ParseError(f"poles must be an integer, got {raw_poles!r}",
                             line, pcol) from None
        tl_raw, tl_col = fields["tl"]
        tl = tuple(parse_value(p, line, tl_col) for p in tl_raw.split(","))
        params = MotorParams(
            r_s=b.value(fields, "rs", line), r_r=b.value(fields, "rr", line),
            l_ls=b.value(fields, "lls", line), l_lr=b.value(fields, "llr", line),
            l_m=b.value(fields, "lm", line), inertia=b.value(fields, "j", line),
            damping=b.value(fields, "d", line), poles=poles, load_torque=tl,
            v_ll=b.value(fields, "vll", line), freq=b.value(fields, "f", line))
        kw = {}
        if "pin" in fields:
            kw["pin_speed"] = b.value(fields, "pin", line)
        if "theta0" in fields:
            kw["theta0"] = b.angle(fields, "theta0", line)
        b.records.append((InductionMotor, (name, nds, params), kw, line))
    else:
        raise ParseError(f"unknown record kind {kind!r}", line, kind_col)


def _build_inductor_blocks(b):
    """Merge mutually coupled inductors into CoupledInductors blocks."""
    parent = {name: name for name in b.inductors}

    def find(n):
        while parent[n] != n:
            parent[n] = parent[parent[n]]
            n = parent[n]
        return n

    block_name = {}
    pair_m = {}
    for name, l1, l2, m, line in b.mutuals:
        for ln in (l1, l2):
            if ln not in b.inductors:
                raise ValidationError(f"mutual {name!r}: unknown inductor {ln!r}",
                                      line)
        if l1 == l2:
            raise ValidationError(f"mutual {name!r} couples {l1!r} to itself", line)
        ra, rb = find(l1), find(l2)
        if ra != rb:
            parent[rb] = ra
        block_name[find(l1)] = name
        key = tuple(sorted((l1, l2)))
        if key in pair_m:
            raise ValidationError(f"duplicate mutual between {l1!r} and {l2!r}", line)
        pair_m[key] = m

    groups = {}
    for name in sorted(b.inductors, key=lambda n: b.inductors[n][4]):
        groups.setdefault(find(name), []).append(name)

    out = []
    for root, members in groups.items():
        if len(members) == 1:
            nds, l, i0, line, _ = b.inductors[members[0]]
            out.append((CoupledInductors,
                        (members[0], [nds], [[l]], [i0]), {}, line))
            continue
        n = len(members)
        lmat = np.zeros((n, n))
        coil_nodes, i0s = [], []
        for i, mi in enumerate(members):
            nds, l, i0, line, _ = b.inductors[mi]
            lmat[i, i] = l
            coil_nodes.append(nds)
            i0s.append(i0)
            for j, mj in enumerate(members):
                key = tuple(sorted((mi, mj)))
                if i < j and key in pair_m:
                    lmat[i, j] = lmat[j, i] = pair_m[key]
        out.append((CoupledInductors,
                    (block_name[root], coil_nodes, lmat, i0s), {},
                    b.inductors[members[0]][3]))
    return out


def parse_netlist(text):
    """Parse netlist text into a validated Netlist (never crashes on input).

    Raises ParseError for malformed syntax and ValidationError for
    inconsistent semantics, each carrying the source line.
    """
    b = _Builder()
    for line_no, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        _parse_record(b, _Tokens(body, line_no))

    if b.ground is None:
        raise ValidationError("netlist declares no ground")
    records = b.records + _build_inductor_blocks(b)

    elements = []
    for cls, args, kwargs, line in records:
        try:
            elements.append(cls(*args, **kwargs))
        except EcsimError as exc:
            raise ValidationError(str(exc), line) from exc

    netlist = Netlist(title=b.title, units=b.units,
                      node_names=[b.ground] + b.node_order,
                      elements=elements, analysis=b.analysis)
    try:
        netlist.circuit()  # structural validation (references, invariants)
    except (ParseError, ValidationError):
        raise
    except (EcsimError, InvalidParamsError) as exc:
        raise ValidationError(str(exc)) from exc
    return netlist


def load_netlist(path):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_netlist(fh.read())
