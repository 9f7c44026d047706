"""Extract a Verilog/SystemVerilog top module's I/O interface.

Handles ANSI header ports and non-ANSI body declarations, resolves literal
vector ranges (including ranges built from same-file `parameter NAME = literal`
bindings), and detects the clock and the reset polarity by the naming
conventions hardware engineers actually use (`rst` active-high, `rst_n`
active-low, and friends).

This is deliberately not an elaborator: parameter expressions beyond simple
constant arithmetic, generate blocks, and hierarchy are out of scope.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from enum import Enum

from .errors import (
    AmbiguousTop,
    MalformedPortList,
    NoModuleFound,
    UnresolvedWidth,
    UnterminatedBlockComment,
)

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_$]*")

# Reset-name tables; matched case-insensitively against the full port name.
ACTIVE_LOW_RESETS = ("rst_n", "resetn", "reset_n", "nrst", "arst_n")
ACTIVE_HIGH_RESETS = ("rst", "reset", "arst")


class PortDirection(Enum):
    INPUT = "input"
    OUTPUT = "output"
    INOUT = "inout"


@dataclass(frozen=True)
class Port:
    name: str
    direction: PortDirection
    width: int = 1
    signed: bool = False

    def __post_init__(self):
        if self.width < 1:
            raise MalformedPortList(f"port {self.name}: width must be >= 1")


@dataclass(frozen=True)
class ClockSpec:
    name: str


@dataclass(frozen=True)
class ResetSpec:
    name: str
    active_low: bool


@dataclass(frozen=True)
class ModuleInterface:
    """Parsed port/clock/reset description of one Verilog module."""

    module_name: str
    ports: tuple[Port, ...]
    clock: ClockSpec | None = None
    reset: ResetSpec | None = None
    sequential: bool = False

    def inputs(self) -> list[Port]:
        return [p for p in self.ports if p.direction is PortDirection.INPUT]

    def outputs(self) -> list[Port]:
        return [p for p in self.ports if p.direction is PortDirection.OUTPUT]

    def port(self, name: str) -> Port:
        for p in self.ports:
            if p.name == name:
                return p
        raise KeyError(name)

    def data_inputs(self) -> list[Port]:
        """Input ports that carry stimulus: everything but clock and reset."""
        skip = set()
        if self.clock:
            skip.add(self.clock.name)
        if self.reset:
            skip.add(self.reset.name)
        return [p for p in self.inputs() if p.name not in skip]

    def driven_inputs(self) -> list[Port]:
        """Input ports a stimulus vector must cover: everything but the clock."""
        skip = {self.clock.name} if self.clock else set()
        return [p for p in self.inputs() if p.name not in skip]

    def to_dict(self) -> dict:
        return {
            "module": self.module_name,
            "ports": [
                {
                    "name": p.name,
                    "dir": p.direction.value,
                    "width": p.width,
                    "signed": p.signed,
                }
                for p in self.ports
            ],
            "clock": self.clock.name if self.clock else None,
            "reset": (
                {"name": self.reset.name, "active_low": self.reset.active_low}
                if self.reset
                else None
            ),
            "sequential": self.sequential,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def summary(self) -> str:
        """Human-readable one-port-per-line summary (used in LLM prompts)."""
        lines = [f"module {self.module_name}"]
        for p in self.ports:
            sgn = " signed" if p.signed else ""
            lines.append(f"  {p.direction.value:<6} {p.name} [{p.width} bit{sgn}]")
        if self.clock:
            lines.append(f"  clock: {self.clock.name}")
        if self.reset:
            pol = "active-low" if self.reset.active_low else "active-high"
            lines.append(f"  reset: {self.reset.name} ({pol})")
        return "\n".join(lines)


def strip_comments(source: str) -> str:
    """Blank out `//` and `/* */` comments, preserving layout.

    Every comment byte except newlines becomes a space, so line/column
    coordinates of the surviving text are unchanged (mutation sites depend on
    this). String literals pass through verbatim.
    """
    out = list(source)
    i, n = 0, len(source)
    while i < n:
        c = source[i]
        if c == '"':
            i += 1
            while i < n and source[i] != '"':
                i += 2 if source[i] == "\\" else 1
            i += 1
        elif c == "/" and i + 1 < n and source[i + 1] == "/":
            while i < n and source[i] != "\n":
                out[i] = " "
                i += 1
        elif c == "/" and i + 1 < n and source[i + 1] == "*":
            end = source.find("*/", i + 2)
            if end < 0:
                raise UnterminatedBlockComment(
                    f"block comment opened at offset {i} never closes"
                )
            for j in range(i, end + 2):
                if source[j] != "\n":
                    out[j] = " "
            i = end + 2
        else:
            i += 1
    return "".join(out)


def _blank_strings(text: str) -> str:
    """Space out string literals (length-preserving) for structural scans.

    Keywords like `endmodule` or `input` inside a $display string must not
    steer module splitting or declaration matching; the public strip_comments
    contract (strings preserved) is untouched.
    """
    out = list(text)
    i, n = 0, len(text)
    while i < n:
        if text[i] == '"':
            out[i] = " "
            i += 1
            while i < n and text[i] != '"':
                if text[i] == "\\":
                    out[i] = " "
                    if i + 1 < n and text[i + 1] != "\n":
                        out[i + 1] = " "
                    i += 2
                else:
                    if text[i] != "\n":
                        out[i] = " "
                    i += 1
            if i < n:
                out[i] = " "
            i += 1
        else:
            i += 1
    return "".join(out)


def _strip_attributes(source: str) -> str:
    """Blank out `(* ... *)` attribute instances; leaves `@(*)` alone."""
    out = list(source)
    i, n = 0, len(source)
    while i < n:
        if source.startswith("(*", i) and not re.match(r"\(\*\s*\)", source[i:]):
            end = source.find("*)", i + 2)
            if end < 0:
                break
            for j in range(i, end + 2):
                if source[j] != "\n":
                    out[j] = " "
            i = end + 2
        else:
            i += 1
    return "".join(out)


def _parse_literal(text: str) -> int | None:
    """Verilog integer literal -> value, or None if not a literal."""
    text = text.strip().replace("_", "")
    if re.fullmatch(r"\d+", text):
        return int(text)
    m = re.fullmatch(r"(\d*)'[sS]?([bBoOdDhH])([0-9a-fA-FxXzZ?]+)", text)
    if m:
        base = {"b": 2, "o": 8, "d": 10, "h": 16}[m.group(2).lower()]
        digits = m.group(3)
        if re.search(r"[xXzZ?]", digits):
            return None
        return int(digits, base)
    return None


class _ConstEval:
    """Tiny constant-expression evaluator over +,-,*,/ and parameter names."""

    def __init__(self, params: dict[str, int]):
        self.params = params

    def eval(self, text: str) -> int:
        self.tokens = re.findall(r"\d+'[sS]?[bBoOdDhH][0-9a-fA-F_]+|\d+|\w+|[()+\-*/]", text)
        self.pos = 0
        val = self._expr()
        if self.pos != len(self.tokens):
            raise UnresolvedWidth(f"cannot evaluate range bound {text!r}")
        return val

    def _expr(self) -> int:
        val = self._term()
        while self.pos < len(self.tokens) and self.tokens[self.pos] in "+-":
            op = self.tokens[self.pos]
            self.pos += 1
            rhs = self._term()
            val = val + rhs if op == "+" else val - rhs
        return val

    def _term(self) -> int:
        val = self._atom()
        while self.pos < len(self.tokens) and self.tokens[self.pos] in "*/":
            op = self.tokens[self.pos]
            self.pos += 1
            rhs = self._atom()
            if op == "*":
                val = val * rhs
            else:
                if rhs == 0:
                    raise UnresolvedWidth("division by zero in range bound")
                val = val // rhs
        return val

    def _atom(self) -> int:
        if self.pos >= len(self.tokens):
            raise UnresolvedWidth("truncated range bound")
        tok = self.tokens[self.pos]
        if tok == "(":
            self.pos += 1
            val = self._expr()
            if self.pos >= len(self.tokens) or self.tokens[self.pos] != ")":
                raise UnresolvedWidth("unbalanced parentheses in range bound")
            self.pos += 1
            return val
        if tok == "-":
            self.pos += 1
            return -self._atom()
        self.pos += 1
        lit = _parse_literal(tok)
        if lit is not None:
            return lit
        if tok in self.params:
            return self.params[tok]
        raise UnresolvedWidth(f"range bound uses non-literal name {tok!r}")


@dataclass
class _RawModule:
    name: str
    header: str          # text between the port-list parens, may be empty
    body: str            # text between the header `;` and `endmodule`


_MODULE_HEAD_RE = re.compile(r"\bmodule\s+([A-Za-z_][A-Za-z0-9_$]*)", re.S)


def _split_modules(stripped: str) -> list[_RawModule]:
    modules = []
    pos = 0
    while True:
        m = _MODULE_HEAD_RE.search(stripped, pos)
        if not m:
            break
        name = m.group(1)
        i = m.end()
        # optional parameter section  #( ... )
        j = _skip_ws(stripped, i)
        if j < len(stripped) and stripped[j] == "#":
            j = _skip_ws(stripped, j + 1)
            if j >= len(stripped) or stripped[j] != "(":
                raise MalformedPortList(f"module {name}: malformed parameter list")
            j = _match_paren(stripped, j, name)
        # optional port list ( ... )
        header = ""
        j2 = _skip_ws(stripped, j)
        if j2 < len(stripped) and stripped[j2] == "(":
            close = _match_paren(stripped, j2, name)
            header = stripped[j2 + 1 : close - 1]
            j = close
        semi = stripped.find(";", j)
        if semi < 0:
            raise MalformedPortList(f"module {name}: missing `;` after header")
        end = stripped.find("endmodule", semi)
        if end < 0:
            raise MalformedPortList(f"module {name}: missing endmodule")
        modules.append(_RawModule(name, header, stripped[semi + 1 : end]))
        pos = end + len("endmodule")
    return modules


def _skip_ws(text: str, i: int) -> int:
    while i < len(text) and text[i].isspace():
        i += 1
    return i


def _match_paren(text: str, open_idx: int, name: str) -> int:
    """Index one past the paren matching text[open_idx] == '('."""
    depth = 0
    for i in range(open_idx, len(text)):
        if text[i] == "(":
            depth += 1
        elif text[i] == ")":
            depth -= 1
            if depth == 0:
                return i + 1
    raise MalformedPortList(f"module {name}: unbalanced parentheses in header")


def _split_top_level(text: str, sep: str = ",") -> list[str]:
    parts, depth, cur = [], 0, []
    for c in text:
        if c in "([{":
            depth += 1
        elif c in ")]}":
            depth -= 1
        if c == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(c)
    parts.append("".join(cur))
    return [p.strip() for p in parts if p.strip()]


_PARAM_DECL_RE = re.compile(
    r"\b(?:parameter|localparam)\b(?:\s+(?:integer|int|\[[^\]]*\]))?\s*([^;)]*)"
)


def _collect_params(text: str) -> dict[str, int]:
    """`parameter NAME = literal` bindings (same file, literal values only)."""
    params: dict[str, int] = {}
    for m in _PARAM_DECL_RE.finditer(text):
        for item in _split_top_level(m.group(1)):
            if "=" not in item:
                continue
            name, _, value = item.partition("=")
            name = name.strip()
            if not re.fullmatch(IDENT_RE.pattern, name):
                continue
            lit = _parse_literal(value.strip())
            if lit is not None:
                params[name] = lit
    return params


_RANGE_RE = re.compile(r"\[([^\[\]:]+):([^\[\]:]+)\]")


def _width_from_range(range_text: str, params: dict[str, int]) -> int:
    m = _RANGE_RE.fullmatch(range_text.strip())
    if not m:
        raise MalformedPortList(f"malformed range {range_text!r}")
    ev = _ConstEval(params)
    msb = ev.eval(m.group(1))
    lsb = ev.eval(m.group(2))
    return abs(msb - lsb) + 1


_PORT_ENTRY_RE = re.compile(
    r"^(?:(input|output|inout)\s+)?"
    r"(?:(?:wire|reg|logic|var|bit)\s+)?"
    r"(signed\s+)?"
    r"((?:\[[^\]]*\]\s*)*)"          # packed range(s)
    r"([A-Za-z_][A-Za-z0-9_$]*)"
    r"\s*((?:\[[^\]]*\]\s*)*)$"      # unpacked dims (rejected)
)


def _parse_ansi_entry(
    entry: str,
    params: dict[str, int],
    carry: tuple[PortDirection, str, bool] | None,
) -> tuple[Port, tuple[PortDirection, str, bool]]:
    m = _PORT_ENTRY_RE.match(entry.strip())
    if not m:
        raise MalformedPortList(f"cannot parse port entry {entry!r}")
    dir_kw, signed_kw, ranges, name, unpacked = (
        m.group(1),
        m.group(2),
        m.group(3).strip(),
        m.group(4),
        m.group(5).strip(),
    )
    if unpacked:
        raise MalformedPortList(f"port {name}: unpacked array ports are not supported")
    if dir_kw is None:
        if carry is None:
            raise MalformedPortList(f"port {name}: no direction in ANSI header")
        direction, ranges_c, signed = carry
        if not ranges:
            ranges = ranges_c
        if signed_kw:
            signed = True
    else:
        direction = PortDirection(dir_kw)
        signed = bool(signed_kw)
    range_list = re.findall(r"\[[^\]]*\]", ranges)
    if len(range_list) > 1:
        raise MalformedPortList(
            f"port {name}: multiple packed ranges are not supported"
        )
    width = _width_from_range(range_list[0], params) if range_list else 1
    return Port(name, direction, width, signed), (direction, ranges, signed)


_BODY_DECL_RE = re.compile(
    r"\b(input|output|inout)\b"
    r"(?:\s+(?:wire|reg|logic|var|bit))?"
    r"(\s+signed)?"
    r"\s*((?:\[[^\]]*\]\s*)*)"
    r"([^;]*);"
)


def _parse_non_ansi(
    raw: _RawModule, names: list[str], params: dict[str, int]
) -> list[Port]:
    decls: dict[str, Port] = {}
    for m in _BODY_DECL_RE.finditer(raw.body):
        direction = PortDirection(m.group(1))
        signed = bool(m.group(2))
        ranges = re.findall(r"\[[^\]]*\]", m.group(3))
        if len(ranges) > 1:
            raise MalformedPortList("multiple packed ranges are not supported")
        width = _width_from_range(ranges[0], params) if ranges else 1
        for item in _split_top_level(m.group(4)):
            im = re.fullmatch(r"([A-Za-z_][A-Za-z0-9_$]*)\s*((?:\[[^\]]*\]\s*)*)", item)
            if not im:
                raise MalformedPortList(f"cannot parse declaration item {item!r}")
            if im.group(2).strip():
                raise MalformedPortList(
                    f"port {im.group(1)}: unpacked array ports are not supported"
                )
            decls[im.group(1)] = Port(im.group(1), direction, width, signed)
    ports = []
    for name in names:
        if name not in decls:
            raise MalformedPortList(f"port {name}: no direction declaration in body")
        ports.append(decls[name])
    return ports


def detect_clock_reset(
    ports: list[Port] | tuple[Port, ...]
) -> tuple[ClockSpec | None, ResetSpec | None]:
    """Clock/reset detection by port-name convention; first match wins."""
    clock = None
    for p in ports:
        if p.direction is not PortDirection.INPUT or p.width != 1:
            continue
        low = p.name.lower()
        if low in ("clk", "clock") or low.endswith(("_clk", "_clock")):
            clock = ClockSpec(p.name)
            break
    reset = None
    for p in ports:
        if p.direction is not PortDirection.INPUT:
            continue
        low = p.name.lower()
        if low in ACTIVE_LOW_RESETS:
            reset = ResetSpec(p.name, active_low=True)
            break
        if low in ACTIVE_HIGH_RESETS:
            reset = ResetSpec(p.name, active_low=False)
            break
    return clock, reset


def _instantiated_names(modules: list[_RawModule]) -> set[str]:
    known = {m.name for m in modules}
    used = set()
    for m in modules:
        for ident in IDENT_RE.findall(m.body):
            if ident in known and ident != m.name:
                used.add(ident)
    return used


def _select_top(modules: list[_RawModule], top: str | None) -> _RawModule:
    if top is not None:
        for m in modules:
            if m.name == top:
                return m
        raise NoModuleFound(f"no module named {top!r} in source")
    if len(modules) == 1:
        return modules[0]
    for m in modules:
        if m.name == "TopModule":
            return m
    used = _instantiated_names(modules)
    roots = [m for m in modules if m.name not in used]
    if len(roots) == 1:
        return roots[0]
    raise AmbiguousTop(
        f"multiple candidate top modules: {sorted(m.name for m in modules)}"
    )


def parse_module_interface(source: str, top: str | None = None) -> ModuleInterface:
    """Parse Verilog text and return the top module's interface.

    Top selection when `top` is None: the sole module, else one named
    `TopModule`, else the unique module never instantiated in this file.
    """
    stripped = _blank_strings(_strip_attributes(strip_comments(source)))
    modules = _split_modules(stripped)
    if not modules:
        raise NoModuleFound("source contains no module declaration")
    raw = _select_top(modules, top)

    params = _collect_params(stripped)
    ports: list[Port] = []
    if raw.header.strip():
        entries = _split_top_level(raw.header)
        first = _PORT_ENTRY_RE.match(entries[0])
        is_ansi = bool(first and first.group(1))
        if is_ansi:
            carry: tuple[PortDirection, str, bool] | None = None
            for entry in entries:
                port, carry = _parse_ansi_entry(entry, params, carry)
                ports.append(port)
        else:
            names = []
            for entry in entries:
                if not re.fullmatch(IDENT_RE.pattern, entry):
                    raise MalformedPortList(f"cannot parse port entry {entry!r}")
                names.append(entry)
            ports = _parse_non_ansi(raw, names, params)

    seen = set()
    for p in ports:
        if p.name in seen:
            raise MalformedPortList(f"duplicate port name {p.name!r}")
        seen.add(p.name)

    clock, reset = detect_clock_reset(ports)
    return ModuleInterface(
        module_name=raw.name,
        ports=tuple(ports),
        clock=clock,
        reset=reset,
        sequential=clock is not None,
    )
