"""Minimal Value Change Dump writer and parser.

Covers exactly the subset debug prompts need: one module scope, wire vars,
two-state values plus an unknown marker, change-only timestamps at a fixed
2 ns per cycle. A `$comment cycles N $end` header line records the trace
length (change-only encoding cannot express a constant tail otherwise); it is
standard VCD syntax, so other readers skip it. The parser exists as the
writer's round-trip oracle and to reload waveforms stored beside debug cases;
it does not aim to read arbitrary third-party dumps.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvariantViolation, MalformedVcd

_ID_FIRST = 33  # '!'
_ID_SPAN = 94   # printable ASCII '!'..'~'

CYCLE_PERIOD = 2
TIMESCALE = "1ns"


def _id_code(index: int) -> str:
    """Positional shorthand code: '!'-based, base-94 beyond 94 signals."""
    code = ""
    index += 1
    while index > 0:
        index -= 1
        code = chr(_ID_FIRST + index % _ID_SPAN) + code
        index //= _ID_SPAN
    return code


@dataclass(frozen=True)
class SignalTrace:
    name: str
    width: int
    values: tuple[int | None, ...]

    def __post_init__(self):
        if self.width < 1:
            raise InvariantViolation(f"trace {self.name}: width must be >= 1")
        for v in self.values:
            if v is not None and not (0 <= v < (1 << self.width)):
                raise InvariantViolation(
                    f"trace {self.name}: value {v} does not fit {self.width} bits"
                )


@dataclass(frozen=True)
class VcdDocument:
    scope: str
    traces: tuple[SignalTrace, ...]
    timescale: str = TIMESCALE
    cycle_period: int = CYCLE_PERIOD

    def __post_init__(self):
        lengths = {len(t.values) for t in self.traces}
        if len(lengths) > 1:
            raise InvariantViolation("all traces must share one length")

    @property
    def n_cycles(self) -> int:
        return len(self.traces[0].values) if self.traces else 0


def _fmt_change(trace: SignalTrace, code: str, value: int | None) -> str:
    if trace.width == 1:
        bit = "x" if value is None else str(value & 1)
        return f"{bit}{code}"
    bits = "x" if value is None else format(value, "b")
    return f"b{bits} {code}"


def write_vcd(doc: VcdDocument) -> str:
    """Serialize a document; byte-deterministic for a given input."""
    if doc.timescale != TIMESCALE or doc.cycle_period != CYCLE_PERIOD:
        raise InvariantViolation("unsupported timescale or cycle period")
    out = [
        "$date generated $end",
        f"$timescale {doc.timescale} $end",
        f"$scope module {doc.scope} $end",
    ]
    codes = [_id_code(i) for i in range(len(doc.traces))]
    for trace, code in zip(doc.traces, codes):
        out.append(f"$var wire {trace.width} {code} {trace.name} $end")
    out.append("$upscope $end")
    out.append(f"$comment cycles {doc.n_cycles} $end")
    out.append("$enddefinitions $end")
    if doc.n_cycles:
        out.append("#0")
        out.append("$dumpvars")
        for trace, code in zip(doc.traces, codes):
            out.append(_fmt_change(trace, code, trace.values[0]))
        out.append("$end")
        for cycle in range(1, doc.n_cycles):
            changes = [
                _fmt_change(t, c, t.values[cycle])
                for t, c in zip(doc.traces, codes)
                if t.values[cycle] != t.values[cycle - 1]
            ]
            if changes:
                out.append(f"#{cycle * doc.cycle_period}")
                out.extend(changes)
    return "\n".join(out) + "\n"


def _parse_vector_value(text: str, width: int) -> int | None:
    text = text.lower()
    if text.startswith(("x", "z")):
        return None
    if not text or not set(text) <= {"0", "1"}:
        raise MalformedVcd(f"bad vector value {text!r}")
    value = int(text, 2)  # shorter-than-width strings left-zero-extend
    if value >= (1 << width):
        raise MalformedVcd(f"value {text!r} wider than declared {width} bits")
    return value


def parse_vcd(text: str) -> VcdDocument:
    """Rebuild a document from writer output (forward-filling between stamps)."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    scope = None
    declared_cycles: int | None = None
    vars_: list[tuple[str, int, str]] = []  # (name, width, code)
    i = 0
    saw_enddefs = False
    while i < len(lines):
        ln = lines[i]
        i += 1
        if ln.startswith("$scope"):
            parts = ln.split()
            if len(parts) < 4 or parts[1] != "module":
                raise MalformedVcd(f"bad scope line {ln!r}")
            scope = parts[2]
        elif ln.startswith("$var"):
            parts = ln.split()
            if len(parts) < 6 or parts[1] != "wire":
                raise MalformedVcd(f"bad var line {ln!r}")
            vars_.append((parts[4], int(parts[2]), parts[3]))
        elif ln.startswith("$comment cycles"):
            declared_cycles = int(ln.split()[2])
        elif ln.startswith("$enddefinitions"):
            saw_enddefs = True
            break
    if not saw_enddefs:
        raise MalformedVcd("missing $enddefinitions")
    if scope is None:
        raise MalformedVcd("missing $scope")

    by_code = {code: width for _, width, code in vars_}
    events: dict[str, list[tuple[int, int | None]]] = {c: [] for c in by_code}
    cycle = 0
    max_cycle = -1
    while i < len(lines):
        ln = lines[i]
        i += 1
        if ln in ("$dumpvars", "$end"):
            continue
        if ln.startswith("#"):
            stamp = int(ln[1:])
            if stamp % CYCLE_PERIOD:
                raise MalformedVcd(f"timestamp {stamp} off the cycle grid")
            cycle = stamp // CYCLE_PERIOD
            continue
        if ln[0] in "01xXzZ":
            code, value = ln[1:], (None if ln[0] in "xXzZ" else int(ln[0]))
        elif ln[0] in "bB":
            value_text, _, code = ln[1:].partition(" ")
            code = code.strip()
            if code not in by_code:
                raise MalformedVcd(f"unknown id code {code!r}")
            value = _parse_vector_value(value_text, by_code[code])
        else:
            raise MalformedVcd(f"unparseable line {ln!r}")
        if code not in by_code:
            raise MalformedVcd(f"unknown id code {code!r}")
        events[code].append((cycle, value))
        max_cycle = max(max_cycle, cycle)

    n_cycles = declared_cycles if declared_cycles is not None else max_cycle + 1
    traces = []
    for name, width, code in vars_:
        values: list[int | None] = []
        current: int | None = None
        ev = events[code]
        k = 0
        for c in range(n_cycles):
            while k < len(ev) and ev[k][0] <= c:
                current = ev[k][1]
                k += 1
            values.append(current)
        traces.append(SignalTrace(name, width, tuple(values)))
    return VcdDocument(scope=scope, traces=tuple(traces))


def truncate_head(text: str, byte_budget: int) -> str:
    """Head-preserving truncation on a line boundary, with a trailing marker."""
    raw = text.encode("utf-8")
    if len(raw) <= byte_budget:
        return text
    cut = raw[:byte_budget].rfind(b"\n")
    head = raw[: cut + 1 if cut >= 0 else byte_budget].decode("utf-8", "ignore")
    return head + "... [waveform truncated]\n"
