"""Reader for flattened, placed structural Verilog (Vivado-style export).

Supported subset: one ``module``; ``input``/``output``/``inout``/``wire``/``reg``
declarations; ``assign`` of an identifier or constant; cell instances with
``#(.P(v))`` parameters and named port connections (identifiers, bit and
part selects, constants, concatenations); ``(* KEY = "VALUE" *)`` attributes;
escaped identifiers. Everything else is rejected with a line number.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from ..model import (
    LUT_TYPES,
    SUPPORTED_TYPES,
    Cell,
    Net,
    NetlistError,
    init_width,
    is_dsp,
)
from .jsonio import FORMAT_VERSION, NetlistDocument
from .location import DeviceProfile, place

# bucketing of the synthetic device; used when the caller gives no profile
DEFAULT_PROFILE = DeviceProfile(tile_bucket=(2, 50), region_bucket=(50, 50), tile_prefix="CLB")

_OUTPUT_PORTS = {
    **{t: {"O"} for t in LUT_TYPES},
    **{t: {"Q"} for t in ("FDRE", "FDSE", "FDCE", "FDPE", "LDCE", "LDPE")},
    "CARRY4": {"O", "CO"},
    "MUXF7": {"O"},
    "MUXF8": {"O"},
    "RAM32X1S": {"O"}, "RAM64X1S": {"O"}, "RAM128X1S": {"O"}, "RAM256X1S": {"O"},
    "RAM32X1D": {"SPO", "DPO"}, "RAM64X1D": {"SPO", "DPO"}, "RAM128X1D": {"SPO", "DPO"},
    "RAM32M": {"DOA", "DOB", "DOC", "DOD"}, "RAM64M": {"DOA", "DOB", "DOC", "DOD"},
    "RAMB18E1": {"DOADO", "DOBDO", "DOPADOP", "DOPBDOP"},
    "RAMB36E1": {"DOADO", "DOBDO", "DOPADOP", "DOPBDOP", "CASCADEOUTA", "CASCADEOUTB"},
    "SRL16E": {"Q"}, "SRLC16E": {"Q", "Q15"}, "SRLC32E": {"Q", "Q31"},
}

_REJECTED = {"always", "always_ff", "always_comb", "initial", "generate", "function", "task", "specify"}
_DECL = {"input", "output", "inout", "wire", "reg", "tri", "supply0", "supply1"}


class VerilogParseError(NetlistError):
    def __init__(self, message: str, line: Optional[int] = None):
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>//[^\n]*|/\*.*?\*/)
  | (?P<attr_open>\(\*(?!\)))
  | (?P<attr_close>\*\))
  | (?P<escaped>\\\S+)
  | (?P<sized>\d*\s*'[sS]?[bBoOdDhH]\s*[0-9a-fA-FxXzZ_?]+)
  | (?P<number>\d+)
  | (?P<string>"(?:[^"\\]|\\.)*")
  | (?P<ident>[A-Za-z_][A-Za-z0-9_$]*)
  | (?P<sysname>\$[A-Za-z_][A-Za-z0-9_$]*)
  | (?P<punct>[()\[\]{},;.#=:])
  | (?P<op>[-+*/%&|^~!?<>@]+)
    """,
    re.VERBOSE | re.DOTALL,
)


@dataclass
class _Tok:
    kind: str
    text: str
    line: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos, line = 0, 1
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise VerilogParseError(f"unexpected character {text[pos]!r}", line)
        kind = m.lastgroup
        chunk = m.group()
        if kind not in ("ws", "comment"):
            if kind == "escaped":
                chunk = chunk[1:]
                kind = "ident"
            toks.append(_Tok(kind, chunk, line))
        line += chunk.count("\n") if kind in ("ws", "comment") else 0
        pos = m.end()
    return toks


def parse_sized_literal(text: str) -> tuple[Optional[int], int]:
    """``"4'h8"`` -> ``(4, 8)``; size is ``None`` when unsized."""
    text = text.replace(" ", "").replace("_", "")
    size_txt, rest = text.split("'", 1)
    rest = rest.lstrip("sS")
    base = {"b": 2, "o": 8, "d": 10, "h": 16}[rest[0].lower()]
    digits = rest[1:]
    if re.search(r"[xXzZ?]", digits):
        raise ValueError(f"literal with x/z bits is not a constant truth table: {text}")
    return (int(size_txt) if size_txt else None), int(digits, base)


def canonical_init(cell_type: str, literal: str) -> str:
    """LUT INIT literal -> binary string of exactly 2**k bits, MSB first."""
    width = init_width(cell_type)
    size, value = parse_sized_literal(literal)
    if value >> width:
        raise ValueError(f"INIT {literal} does not fit {cell_type} ({width} bits)")
    return format(value, f"0{width}b")


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0
        self.vectors: dict[str, tuple[int, int]] = {}
        self.instances: list[dict] = []
        self.aliases: list[tuple[str, str, int]] = []

    # token helpers
    def peek(self, k: int = 0) -> Optional[_Tok]:
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else None

    def line(self) -> Optional[int]:
        t = self.peek() or (self.toks[-1] if self.toks else None)
        return t.line if t else None

    def next(self) -> _Tok:
        t = self.peek()
        if t is None:
            raise VerilogParseError("unexpected end of input", self.line())
        self.i += 1
        return t

    def expect(self, text: str) -> _Tok:
        t = self.next()
        if t.text != text:
            raise VerilogParseError(f"expected {text!r}, found {t.text!r}", t.line)
        return t

    def accept(self, text: str) -> bool:
        t = self.peek()
        if t is not None and t.text == text and t.kind != "string":
            self.i += 1
            return True
        return False

    def ident(self) -> _Tok:
        t = self.next()
        if t.kind != "ident":
            raise VerilogParseError(f"expected identifier, found {t.text!r}", t.line)
        return t

    def number(self) -> int:
        t = self.next()
        if t.kind != "number":
            raise VerilogParseError(f"expected integer, found {t.text!r}", t.line)
        return int(t.text)

    # grammar
    def attributes(self) -> dict[str, str]:
        attrs = {}
        while self.accept("(*"):
            while not self.accept("*)"):
                key = self.ident().text
                value = "1"
                if self.accept("="):
                    v = self.next()
                    value = v.text[1:-1] if v.kind == "string" else v.text
                attrs[key.upper()] = value
                self.accept(",")
        return attrs

    def parse(self) -> None:
        self.attributes()
        t = self.next()
        if t.text != "module":
            raise VerilogParseError(f"expected 'module', found {t.text!r}", t.line)
        self.module_name = self.ident().text
        if self.accept("#"):
            raise VerilogParseError("module parameters are not supported", t.line)
        if self.accept("("):
            self.port_list()
        self.expect(";")
        while True:
            attrs = self.attributes()
            t = self.peek()
            if t is None:
                raise VerilogParseError("missing 'endmodule'", self.line())
            if t.text == "endmodule":
                self.i += 1
                break
            self.item(attrs)
        self.attributes()
        if self.peek() is not None:
            t = self.peek()
            if t.text == "module":
                raise VerilogParseError("expected a single flattened module", t.line)
            raise VerilogParseError(f"unexpected {t.text!r} after endmodule", t.line)

    def port_list(self) -> None:
        if self.accept(")"):
            return
        while True:
            self.attributes()
            t = self.peek()
            if t.text in _DECL:
                self.i += 1
                while self.peek().text in _DECL or self.peek().text == "signed":
                    self.i += 1
                rng = self.range_opt()
                name = self.ident().text
                if rng:
                    self.vectors[name] = rng
            else:
                self.ident()
            if self.accept(")"):
                return
            self.expect(",")

    def range_opt(self) -> Optional[tuple[int, int]]:
        if not self.accept("["):
            return None
        msb = self.number()
        self.expect(":")
        lsb = self.number()
        self.expect("]")
        return msb, lsb

    def item(self, attrs: dict[str, str]) -> None:
        t = self.peek()
        if t.kind != "ident":
            raise VerilogParseError(f"unsupported construct starting with {t.text!r}", t.line)
        if t.text in _REJECTED:
            raise VerilogParseError(f"unsupported construct '{t.text}' (behavioral code)", t.line)
        if t.text in _DECL:
            self.declaration()
        elif t.text == "assign":
            self.assign()
        elif t.text in ("parameter", "localparam", "defparam", "genvar", "integer"):
            raise VerilogParseError(f"unsupported construct '{t.text}'", t.line)
        else:
            self.instance(attrs)

    def declaration(self) -> None:
        self.next()
        while self.peek().text in _DECL or self.peek().text == "signed":
            self.i += 1
        rng = self.range_opt()
        while True:
            name = self.ident().text
            if rng:
                self.vectors[name] = rng
            if self.accept(";"):
                return
            self.expect(",")

    def assign(self) -> None:
        start = self.next()
        lhs = self.signal_bits()
        self.expect("=")
        t = self.peek()
        if t.kind == "sized" or t.kind == "number":
            self.next()
            rhs = [None] * len(lhs)
        elif t.kind == "ident" or t.text == "{":
            rhs = self.expr_bits()
        else:
            raise VerilogParseError("assign supports only an identifier or constant right-hand side", start.line)
        if not self.accept(";"):
            raise VerilogParseError("assign supports only an identifier or constant right-hand side", start.line)
        if len(lhs) != len(rhs):
            raise VerilogParseError("assign width mismatch", start.line)
        for a, b in zip(lhs, rhs):
            self.aliases.append((a, b, start.line))

    def signal_bits(self) -> list[str]:
        """Bits of an identifier reference, MSB first; ``None`` never appears here."""
        name = self.ident().text
        if self.accept("["):
            hi = self.number()
            lo = hi
            if self.accept(":"):
                lo = self.number()
            self.expect("]")
            return [f"{name}[{b}]" for b in _span(hi, lo)]
        if name in self.vectors:
            hi, lo = self.vectors[name]
            return [f"{name}[{b}]" for b in _span(hi, lo)]
        return [name]

    def expr_bits(self) -> list[Optional[str]]:
        t = self.peek()
        if t.text == "{":
            self.next()
            bits: list[Optional[str]] = []
            while True:
                bits.extend(self.expr_bits())
                if self.accept("}"):
                    return bits
                self.expect(",")
        if t.kind == "sized":
            self.next()
            size, _ = parse_sized_literal(t.text)
            return [None] * (size or 1)
        if t.kind == "number":
            self.next()
            return [None]
        if t.kind == "ident":
            return self.signal_bits()
        raise VerilogParseError(f"unsupported expression {t.text!r} in port connection", t.line)

    def instance(self, attrs: dict[str, str]) -> None:
        type_tok = self.ident()
        params = {}
        if self.accept("#"):
            self.expect("(")
            while not self.accept(")"):
                self.expect(".")
                key = self.ident().text
                self.expect("(")
                v = self.next()
                if v.kind not in ("sized", "number", "string"):
                    raise VerilogParseError(f"parameter {key} must be a literal constant", v.line)
                params[key.upper()] = v.text[1:-1] if v.kind == "string" else v.text
                self.expect(")")
                self.accept(",")
        name_tok = self.ident()
        self.expect("(")
        conns: list[tuple[str, list[Optional[str]]]] = []
        while not self.accept(")"):
            self.expect(".")
            port = self.ident().text
            self.expect("(")
            bits: list[Optional[str]] = [] if self.peek().text == ")" else self.expr_bits()
            self.expect(")")
            conns.append((port, bits))
            self.accept(",")
        self.expect(";")
        self.instances.append({
            "type": type_tok.text, "name": name_tok.text, "line": type_tok.line,
            "attrs": attrs, "params": params, "conns": conns,
        })


def _span(hi: int, lo: int) -> range:
    return range(hi, lo - 1, -1) if hi >= lo else range(hi, lo + 1)


def _pin_names(port: str, width: int) -> list[str]:
    if width == 1:
        return [port]
    return [f"{port}[{b}]" for b in range(width - 1, -1, -1)]


def parse_verilog_subset(text: str, device_profile: Optional[DeviceProfile] = None,
                         device: str = "") -> NetlistDocument:
    """Parse one flattened placed module into a :class:`NetlistDocument`.

    Tile and clock-region names come from ``device_profile`` (default: the
    synthetic device's bucketing rule).
    """
    profile = device_profile or DEFAULT_PROFILE
    p = _Parser(text)
    p.parse()

    warnings = []
    cells: list[Cell] = []
    missing_loc = []
    endpoints = []  # (signal bit, cell id, pin, is_output, line)
    for inst in p.instances:
        ctype = inst["type"]
        if is_dsp(ctype):
            raise VerilogParseError(
                f"DSP cell {inst['name']!r} ({ctype}) rejected: DSP blocks are excluded from grouping",
                inst["line"])
        if ctype not in SUPPORTED_TYPES:
            warnings.append(f"line {inst['line']}: skipped unsupported cell type {ctype} ({inst['name']})")
            continue
        loc = inst["attrs"].get("LOC")
        if not loc:
            missing_loc.append(inst["name"])
            continue
        init = ""
        if ctype in LUT_TYPES:
            if "INIT" not in inst["params"]:
                raise VerilogParseError(f"LUT {inst['name']!r} has no INIT parameter", inst["line"])
            try:
                init = canonical_init(ctype, inst["params"]["INIT"])
            except ValueError as exc:
                raise VerilogParseError(str(exc), inst["line"]) from None
        try:
            placement = place(loc, profile)
        except NetlistError as exc:
            raise VerilogParseError(f"cell {inst['name']!r}: {exc}", inst["line"]) from None
        cid = len(cells)
        cells.append(Cell(cid, inst["name"], ctype, init, placement, inst["name"]))
        outs = _OUTPUT_PORTS.get(ctype, set())
        for port, bits in inst["conns"]:
            for pin, sig in zip(_pin_names(port, len(bits)), bits):
                if sig is not None:
                    endpoints.append((sig, cid, pin, port in outs, inst["line"]))
    if missing_loc:
        raise VerilogParseError("cells without LOC placement: " + ", ".join(missing_loc))

    # assign aliases: union-find over signal bits, constants break the chain
    parent: dict[str, str] = {}

    def find(s):
        while parent.get(s, s) != s:
            s = parent[s]
        return s

    for a, b, _line in p.aliases:
        if b is not None:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb

    drivers: dict[str, tuple[str, int, str]] = {}
    sinks: dict[str, list[tuple[int, str]]] = {}
    for sig, cid, pin, is_out, line in endpoints:
        root = find(sig)
        if is_out:
            if root in drivers:
                raise VerilogParseError(f"signal {sig!r} has multiple drivers", line)
            drivers[root] = (sig, cid, pin)
        else:
            sinks.setdefault(root, []).append((cid, pin))

    nets = []
    for root, (sig, cid, pin) in sorted(drivers.items(), key=lambda kv: (kv[1][1], kv[1][2])):
        nets.append(Net(sig, (cid, pin), tuple(sinks.get(root, ()))))
    undriven = [root for root in sinks if root not in drivers]
    if undriven:
        warnings.append(f"{len(undriven)} signals have no driving cell (top-level inputs or constants): "
                        + ", ".join(undriven))
    return NetlistDocument(tuple(cells), tuple(nets), device or p.module_name, FORMAT_VERSION,
                           tuple(warnings))
