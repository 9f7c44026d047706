"""Cycle-level behavioral evaluation of a small synthesizable Verilog subset.

This is the execution fallback when no simulator is installed: mutation
observability checks and sample-corpus evaluation run golden and candidate
sources through this evaluator behind scripted endpoints. It is not a timing
simulator; one `step(inputs)` is one clock cycle (inputs applied, combinational
settle, clock edge, non-blocking updates, settle again, outputs sampled).

Supported subset: one or more modules with ANSI or non-ANSI ports; wire/reg
declarations with a single packed range (optional initializer on wires);
parameter/localparam with constant values; continuous assigns; `always` blocks
with `@(*)`, plain-signal, or edge sensitivity lists; begin/end, if/else,
case/casez with default; blocking and non-blocking assignments; single-level
module instantiation with named connections. Expressions cover the usual
operator set with unsigned semantics. Uninitialized registers read as unknown
(`x`) and unknowns propagate coarsely; an unknown branch condition takes the
else/default path, as event simulators do.

Arithmetic is evaluated unmasked and masked at assignment, so carries survive
into wider targets; width games that rely on intermediate wrap-around are
outside the subset.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import UnsupportedConstruct
from .interface import ModuleInterface, parse_module_interface, strip_comments
from .tokens import Token, parse_number, tokenize

_SETTLE_LIMIT = 64


# --- AST -----------------------------------------------------------------------
# Expressions and statements are tagged tuples; compact and cheap to evaluate.
#   ('num', value|None, width)      ('id', name)
#   ('bitsel', name, idx_expr)      ('partsel', name, msb, lsb)
#   ('concat', [exprs])             ('repl', count, expr)
#   ('unop', op, expr)              ('binop', op, lhs, rhs)
#   ('ternary', cond, a, b)
# Statements:
#   ('block', [stmts])              ('if', cond, then, else|None)
#   ('case', expr, [(labels|None, stmt)])
#   ('assign', blocking: bool, lhs, expr)


@dataclass
class AlwaysBlock:
    clocked: bool
    body: tuple
    edges: list[tuple[str, str]] = field(default_factory=list)  # (edge, signal)


@dataclass
class Instance:
    module: str
    name: str
    conns: dict  # port name -> parent expr (outputs must connect to plain ids)


@dataclass
class _ModuleDef:
    name: str
    iface: ModuleInterface
    widths: dict
    params: dict
    assigns: list          # [(lhs, expr)] in source order
    comb_blocks: list      # [AlwaysBlock]
    clocked_blocks: list   # [AlwaysBlock]
    instances: list        # [Instance]


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.pos = 0

    def peek(self, offset=0) -> Token | None:
        i = self.pos + offset
        return self.toks[i] if i < len(self.toks) else None

    def at(self, text: str) -> bool:
        t = self.peek()
        return t is not None and t.text == text

    def take(self) -> Token:
        t = self.peek()
        if t is None:
            raise UnsupportedConstruct("unexpected end of source")
        self.pos += 1
        return t

    def expect(self, text: str) -> Token:
        t = self.take()
        if t.text != text:
            raise UnsupportedConstruct(
                f"expected {text!r} at {t.line}:{t.col}, found {t.text!r}"
            )
        return t

    def skip_to(self, text: str) -> None:
        while not self.at(text):
            self.take()
        self.take()

    # --- expressions (precedence climbing) -----------------------------------

    _BINARY_LEVELS = [
        ["||"],
        ["&&"],
        ["|"],
        ["^", "~^", "^~"],
        ["&"],
        ["==", "!=", "===", "!=="],
        ["<", "<=", ">", ">="],
        ["<<", ">>", "<<<", ">>>"],
        ["+", "-"],
        ["*", "/", "%"],
    ]

    def parse_expr(self):
        return self._ternary()

    def _ternary(self):
        cond = self._binary(0)
        if self.at("?"):
            self.take()
            a = self._ternary()
            self.expect(":")
            b = self._ternary()
            return ("ternary", cond, a, b)
        return cond

    def _binary(self, level):
        if level >= len(self._BINARY_LEVELS):
            return self._unary()
        ops = self._BINARY_LEVELS[level]
        node = self._binary(level + 1)
        while True:
            t = self.peek()
            if t is None or t.kind != "op" or t.text not in ops:
                return node
            # `<=` in statement position is an assignment, handled upstream;
            # in expression position it is relational.
            self.take()
            rhs = self._binary(level + 1)
            node = ("binop", t.text, node, rhs)

    def _unary(self):
        t = self.peek()
        if t is not None and t.kind == "op" and t.text in (
            "!", "~", "-", "+", "&", "|", "^", "~&", "~|", "~^", "^~"
        ):
            self.take()
            return ("unop", t.text, self._unary())
        return self._primary()

    def _primary(self):
        t = self.take()
        if t.kind == "num":
            value, width = parse_number(t.text)
            return ("num", value, width)
        if t.text == "(":
            node = self.parse_expr()
            self.expect(")")
            return node
        if t.text == "{":
            first = self.parse_expr()
            if self.at("{"):  # replication {N{expr}}
                self.take()
                inner = self.parse_expr()
                self.expect("}")
                self.expect("}")
                return ("repl", first, inner)
            parts = [first]
            while self.at(","):
                self.take()
                parts.append(self.parse_expr())
            self.expect("}")
            return ("concat", parts)
        if t.kind == "id":
            return self._select_suffix(t.text)
        raise UnsupportedConstruct(f"unexpected token {t.text!r} at {t.line}:{t.col}")

    def _select_suffix(self, name):
        if self.at("["):
            self.take()
            first = self.parse_expr()
            if self.at(":"):
                self.take()
                second = self.parse_expr()
                self.expect("]")
                return ("partsel", name, first, second)
            self.expect("]")
            return ("bitsel", name, first)
        return ("id", name)

    # --- statements ------------------------------------------------------------

    def parse_stmt(self):
        t = self.peek()
        if t is None:
            raise UnsupportedConstruct("unexpected end of source in statement")
        if t.text == ";":
            self.take()
            return ("block", [])
        if t.text == "begin":
            self.take()
            if self.at(":"):  # named block
                self.take()
                self.take()
            stmts = []
            while not self.at("end"):
                stmts.append(self.parse_stmt())
            self.take()
            return ("block", stmts)
        if t.text == "if":
            self.take()
            self.expect("(")
            cond = self.parse_expr()
            self.expect(")")
            then = self.parse_stmt()
            els = None
            if self.at("else"):
                self.take()
                els = self.parse_stmt()
            return ("if", cond, then, els)
        if t.text in ("case", "casez", "casex"):
            self.take()
            self.expect("(")
            sel = self.parse_expr()
            self.expect(")")
            items = []
            while not self.at("endcase"):
                if self.at("default"):
                    self.take()
                    if self.at(":"):
                        self.take()
                    items.append((None, self.parse_stmt()))
                else:
                    labels = [self.parse_expr()]
                    while self.at(","):
                        self.take()
                        labels.append(self.parse_expr())
                    self.expect(":")
                    items.append((labels, self.parse_stmt()))
            self.take()
            return ("case", sel, items)
        if t.kind == "id" and t.text.startswith("$"):
            # system task calls are display-only; skip through ';'
            self.skip_to(";")
            return ("block", [])
        # assignment: lhs (= | <=) expr ;
        lhs = self._parse_lhs()
        op = self.take()
        if op.text not in ("=", "<="):
            raise UnsupportedConstruct(
                f"expected assignment at {op.line}:{op.col}, found {op.text!r}"
            )
        rhs = self.parse_expr()
        self.expect(";")
        return ("assign", op.text == "=", lhs, rhs)

    def _parse_lhs(self):
        if self.at("{"):
            self.take()
            parts = [self._parse_lhs()]
            while self.at(","):
                self.take()
                parts.append(self._parse_lhs())
            self.expect("}")
            return ("concat", parts)
        t = self.take()
        if t.kind != "id":
            raise UnsupportedConstruct(
                f"bad assignment target {t.text!r} at {t.line}:{t.col}"
            )
        return self._select_suffix(t.text)


def _parse_module_body(source: str, iface: ModuleInterface) -> _ModuleDef:
    stripped = strip_comments(source)
    tokens = tokenize(stripped)
    p = _Parser(tokens)

    # find the chosen module and skip its header (ports handled by iface)
    while True:
        t = p.take()
        if t.text == "module" and p.peek() and p.peek().text == iface.module_name:
            p.take()
            break

    widths = {port.name: port.width for port in iface.ports}
    params: dict[str, int] = {}
    assigns: list = []
    comb_blocks: list[AlwaysBlock] = []
    clocked_blocks: list[AlwaysBlock] = []
    instances: list[Instance] = []

    if p.at("#"):
        # header parameters bind names the body may reference
        p.take()
        p.expect("(")
        while not p.at(")"):
            t = p.take()
            if t.kind == "id" and not t.is_keyword and p.at("="):
                p.take()
                value, _ = _eval(p.parse_expr(), params, widths, strict=True)
                if value is not None:
                    params[t.text] = value
        p.take()
    if p.at("("):
        depth = 0
        while True:
            t = p.take()
            depth += {"(": 1, ")": -1}.get(t.text, 0)
            if depth == 0:
                break
    p.expect(";")

    def const_eval(expr):
        value, _ = _eval(expr, params, widths, strict=True)
        if value is None:
            raise UnsupportedConstruct("x/z digits in constant expression")
        return value

    def parse_range_width():
        if not p.at("["):
            return 1
        p.take()
        msb = const_eval(p.parse_expr())
        p.expect(":")
        lsb = const_eval(p.parse_expr())
        p.expect("]")
        return abs(msb - lsb) + 1

    while not p.at("endmodule"):
        t = p.peek()
        if t is None:
            raise UnsupportedConstruct(f"module {iface.module_name}: missing endmodule")
        kw = t.text

        if kw in ("parameter", "localparam"):
            p.take()
            if p.at("integer"):
                p.take()
            parse_range_width()
            while True:
                name = p.take().text
                p.expect("=")
                params[name] = const_eval(p.parse_expr())
                if p.at(","):
                    p.take()
                    continue
                break
            p.expect(";")
        elif kw in ("input", "output", "inout"):
            # non-ANSI direction declarations: widths already known from iface
            p.skip_to(";")
        elif kw in ("wire", "reg", "logic", "integer"):
            p.take()
            if p.at("signed"):
                p.take()
            width = 32 if kw == "integer" else parse_range_width()
            while True:
                name = p.take().text
                widths.setdefault(name, width)
                if p.at("["):
                    raise UnsupportedConstruct(f"{name}: memories are not supported")
                if p.at("="):
                    p.take()
                    assigns.append((("id", name), p.parse_expr()))
                if p.at(","):
                    p.take()
                    continue
                break
            p.expect(";")
        elif kw == "assign":
            p.take()
            lhs = p._parse_lhs()
            p.expect("=")
            assigns.append((lhs, p.parse_expr()))
            p.expect(";")
        elif kw in ("always", "always_ff", "always_comb", "always_latch"):
            p.take()
            edges: list[tuple[str, str]] = []
            plain_sensitivity = False
            if kw == "always_comb":
                plain_sensitivity = True
            else:
                p.expect("@")
                p.expect("(")
                if p.at("*"):
                    p.take()
                    plain_sensitivity = True
                    p.expect(")")
                else:
                    while True:
                        tok = p.take()
                        if tok.text in ("posedge", "negedge"):
                            sig = p.take().text
                            edges.append((tok.text, sig))
                        else:
                            plain_sensitivity = True  # @(a or b) level list
                        if p.at("or") or p.at(","):
                            p.take()
                            continue
                        break
                    p.expect(")")
            body = p.parse_stmt()
            if edges:
                clocked_blocks.append(AlwaysBlock(True, body, edges))
            elif plain_sensitivity:
                comb_blocks.append(AlwaysBlock(False, body))
            else:
                raise UnsupportedConstruct("always block without sensitivity")
        elif kw == "initial" or kw in ("generate", "function", "task", "for"):
            raise UnsupportedConstruct(f"{kw!r} blocks are not supported")
        elif t.kind == "id" and not t.is_keyword:
            # instance: Module inst ( .port(expr), ... );
            module_name = p.take().text
            inst_name = p.take().text
            p.expect("(")
            conns: dict = {}
            while not p.at(")"):
                p.expect(".")
                port = p.take().text
                p.expect("(")
                conns[port] = p.parse_expr()
                p.expect(")")
                if p.at(","):
                    p.take()
            p.take()
            p.expect(";")
            instances.append(Instance(module_name, inst_name, conns))
        else:
            raise UnsupportedConstruct(
                f"unsupported module item {kw!r} at {t.line}:{t.col}"
            )

    return _ModuleDef(
        iface.module_name, iface, widths, params,
        assigns, comb_blocks, clocked_blocks, instances,
    )


# --- evaluation ------------------------------------------------------------------


def _mask(value, width):
    return value & ((1 << width) - 1)


def _eval(expr, env, widths, strict=False):
    """Evaluate to (value | None, width). Unknown propagates coarsely."""
    tag = expr[0]
    if tag == "num":
        return expr[1], expr[2]
    if tag == "id":
        name = expr[1]
        if name not in env:
            if strict:
                raise UnsupportedConstruct(f"unknown name {name!r} in constant")
            return None, widths.get(name, 32)
        return env[name], widths.get(name, 32)
    if tag == "bitsel":
        base, width = _eval(("id", expr[1]), env, widths, strict)
        idx, _ = _eval(expr[2], env, widths, strict)
        if base is None or idx is None or idx >= width:
            return None, 1
        return (base >> idx) & 1, 1
    if tag == "partsel":
        base, width = _eval(("id", expr[1]), env, widths, strict)
        msb, _ = _eval(expr[2], env, widths, strict)
        lsb, _ = _eval(expr[3], env, widths, strict)
        if msb is None or lsb is None:
            return None, 1
        lo, hi = min(msb, lsb), max(msb, lsb)
        span = hi - lo + 1
        if base is None:
            return None, span
        return (base >> lo) & ((1 << span) - 1), span
    if tag == "concat":
        total_value, total_width = 0, 0
        for part in expr[1]:
            v, w = _eval(part, env, widths, strict)
            total_width += w
            if total_value is None or v is None:
                total_value = None
            else:
                total_value = (total_value << w) | _mask(v, w)
        return total_value, total_width
    if tag == "repl":
        count, _ = _eval(expr[1], env, widths, strict)
        v, w = _eval(expr[2], env, widths, strict)
        if count is None:
            raise UnsupportedConstruct("unknown replication count")
        if v is None:
            return None, w * count
        out = 0
        for _ in range(count):
            out = (out << w) | _mask(v, w)
        return out, w * count
    if tag == "unop":
        op = expr[1]
        v, w = _eval(expr[2], env, widths, strict)
        if op == "!":
            return (None if v is None else int(v == 0)), 1
        if v is None:
            return None, (1 if op in ("&", "|", "^", "~&", "~|", "~^", "^~") else w)
        masked = _mask(v, w)
        if op == "~":
            return _mask(~masked, w), w
        if op == "-":
            return -v, w
        if op == "+":
            return v, w
        ones = bin(masked).count("1")
        full = (1 << w) - 1
        if op == "&":
            return int(masked == full), 1
        if op == "|":
            return int(masked != 0), 1
        if op == "^":
            return ones & 1, 1
        if op == "~&":
            return int(masked != full), 1
        if op == "~|":
            return int(masked == 0), 1
        return (ones & 1) ^ 1, 1  # ~^ / ^~
    if tag == "binop":
        return _eval_binop(expr, env, widths, strict)
    if tag == "ternary":
        cond, _ = _eval(expr[1], env, widths, strict)
        a, wa = _eval(expr[2], env, widths, strict)
        b, wb = _eval(expr[3], env, widths, strict)
        w = max(wa, wb)
        if cond is None:
            return (a if a == b else None), w
        return (a, w) if cond != 0 else (b, w)
    raise UnsupportedConstruct(f"cannot evaluate expression {expr!r}")


def _eval_binop(expr, env, widths, strict):
    op = expr[1]
    lv, lw = _eval(expr[2], env, widths, strict)
    rv, rw = _eval(expr[3], env, widths, strict)
    w = max(lw, rw)

    if op in ("&&", "||"):
        lb = None if lv is None else int(lv != 0)
        rb = None if rv is None else int(rv != 0)
        if op == "&&":
            if lb == 0 or rb == 0:
                return 0, 1
            if lb is None or rb is None:
                return None, 1
            return 1, 1
        if lb == 1 or rb == 1:
            return 1, 1
        if lb is None or rb is None:
            return None, 1
        return 0, 1

    if lv is None or rv is None:
        cmp_ops = ("==", "!=", "===", "!==", "<", "<=", ">", ">=")
        return None, (1 if op in cmp_ops else w)

    if op in ("==", "==="):
        return int(_mask(lv, w) == _mask(rv, w)), 1
    if op in ("!=", "!=="):
        return int(_mask(lv, w) != _mask(rv, w)), 1
    if op == "<":
        return int(_mask(lv, w) < _mask(rv, w)), 1
    if op == "<=":
        return int(_mask(lv, w) <= _mask(rv, w)), 1
    if op == ">":
        return int(_mask(lv, w) > _mask(rv, w)), 1
    if op == ">=":
        return int(_mask(lv, w) >= _mask(rv, w)), 1
    if op == "+":
        return lv + rv, w
    if op == "-":
        return lv - rv, w
    if op == "*":
        return lv * rv, w
    if op == "/":
        return (None, w) if rv == 0 else (_mask(lv, lw) // _mask(rv, rw), w)
    if op == "%":
        return (None, w) if rv == 0 else (_mask(lv, lw) % _mask(rv, rw), w)
    if op == "&":
        return _mask(lv, w) & _mask(rv, w), w
    if op == "|":
        return _mask(lv, w) | _mask(rv, w), w
    if op == "^":
        return _mask(lv, w) ^ _mask(rv, w), w
    if op in ("<<", "<<<"):
        return _mask(lv, lw) << min(_mask(rv, rw), 1 << 16), lw
    if op in (">>", ">>>"):
        return _mask(lv, lw) >> min(_mask(rv, rw), 1 << 16), lw
    raise UnsupportedConstruct(f"operator {op!r} not supported")


class VerilogEvaluator:
    """Behavioral model of one module; conforms to the reset/step contract.

    `step(inputs)` takes every non-clock input (integer values) and returns
    every output, None marking unknown. Registers start unknown; the design's
    own reset logic is what brings them to concrete values.
    """

    def __init__(
        self,
        source: str,
        submodules: dict[str, str] | None = None,
        top: str | None = None,
    ):
        self.iface = parse_module_interface(source, top=top)
        self.module = _parse_module_body(source, self.iface)
        sub_sources = dict(submodules or {})
        self.children: dict[str, VerilogEvaluator] = {}
        for inst in self.module.instances:
            if inst.module not in sub_sources:
                raise UnsupportedConstruct(
                    f"instance {inst.name}: no source for module {inst.module!r}"
                )
            self.children[inst.name] = VerilogEvaluator(
                sub_sources[inst.module], submodules=sub_sources, top=inst.module
            )
        self._input_names = {p.name for p in self.iface.inputs()}
        self.reset()

    def reset(self) -> None:
        self.env: dict[str, int | None] = {
            name: None for name in self.module.widths
        }
        self.env.update(self.module.params)
        for child in self.children.values():
            child.reset()

    # --- statement execution ----------------------------------------------------

    def _write(self, lhs, value, nb_queue):
        tag = lhs[0]
        if tag == "id":
            name = lhs[1]
            width = self.module.widths.get(name, 32)
            final = None if value is None else _mask(value, width)
            if nb_queue is None:
                self.env[name] = final
            else:
                nb_queue[name] = final
            return
        if tag == "bitsel":
            name = lhs[1]
            width = self.module.widths.get(name, 32)
            idx, _ = _eval(lhs[2], self.env, self.module.widths)
            current = nb_queue.get(name, self.env.get(name)) if nb_queue is not None \
                else self.env.get(name)
            if idx is None or current is None or value is None:
                final = None
            else:
                final = _mask((current & ~(1 << idx)) | ((value & 1) << idx), width)
            if nb_queue is None:
                self.env[name] = final
            else:
                nb_queue[name] = final
            return
        if tag == "partsel":
            name = lhs[1]
            width = self.module.widths.get(name, 32)
            msb, _ = _eval(lhs[2], self.env, self.module.widths)
            lsb, _ = _eval(lhs[3], self.env, self.module.widths)
            current = nb_queue.get(name, self.env.get(name)) if nb_queue is not None \
                else self.env.get(name)
            if msb is None or lsb is None or current is None or value is None:
                final = None
            else:
                lo, hi = min(msb, lsb), max(msb, lsb)
                span_mask = ((1 << (hi - lo + 1)) - 1) << lo
                final = _mask((current & ~span_mask) | ((value << lo) & span_mask), width)
            if nb_queue is None:
                self.env[name] = final
            else:
                nb_queue[name] = final
            return
        if tag == "concat":
            total = sum(self._lhs_width(part) for part in lhs[1])
            shift = total
            for part in lhs[1]:
                w = self._lhs_width(part)
                shift -= w
                piece = None if value is None else (value >> shift) & ((1 << w) - 1)
                self._write(part, piece, nb_queue)
            return
        raise UnsupportedConstruct(f"bad assignment target {lhs!r}")

    def _lhs_width(self, lhs):
        if lhs[0] == "id":
            return self.module.widths.get(lhs[1], 32)
        if lhs[0] == "bitsel":
            return 1
        if lhs[0] == "partsel":
            msb, _ = _eval(lhs[2], self.env, self.module.widths)
            lsb, _ = _eval(lhs[3], self.env, self.module.widths)
            if msb is None or lsb is None:
                raise UnsupportedConstruct("unknown part-select bounds on LHS")
            return abs(msb - lsb) + 1
        if lhs[0] == "concat":
            return sum(self._lhs_width(p) for p in lhs[1])
        raise UnsupportedConstruct(f"bad assignment target {lhs!r}")

    def _exec(self, stmt, nb_queue):
        tag = stmt[0]
        if tag == "block":
            for s in stmt[1]:
                self._exec(s, nb_queue)
        elif tag == "if":
            cond, _ = _eval(stmt[1], self.env, self.module.widths)
            if cond is not None and cond != 0:
                self._exec(stmt[2], nb_queue)
            elif stmt[3] is not None:
                self._exec(stmt[3], nb_queue)
        elif tag == "case":
            sel, sw = _eval(stmt[1], self.env, self.module.widths)
            taken = False
            default = None
            for labels, body in stmt[2]:
                if labels is None:
                    default = body
                    continue
                if sel is None:
                    continue
                for label in labels:
                    lv, lw = _eval(label, self.env, self.module.widths)
                    if lv is not None and _mask(lv, max(sw, lw)) == _mask(sel, max(sw, lw)):
                        self._exec(body, nb_queue)
                        taken = True
                        break
                if taken:
                    break
            if not taken and default is not None:
                self._exec(default, nb_queue)
        elif tag == "assign":
            _, blocking, lhs, rhs = stmt
            value, _ = _eval(rhs, self.env, self.module.widths)
            # inside a combinational block nb_queue is None: both forms apply now
            self._write(lhs, value, None if (blocking or nb_queue is None) else nb_queue)
        else:
            raise UnsupportedConstruct(f"cannot execute statement {stmt!r}")

    # --- cycle evaluation ---------------------------------------------------------

    def _settle(self) -> None:
        for _ in range(_SETTLE_LIMIT):
            before = dict(self.env)
            for lhs, expr in self.module.assigns:
                value, _ = _eval(expr, self.env, self.module.widths)
                self._write(lhs, value, None)
            for block in self.module.comb_blocks:
                self._exec(block.body, None)
            for inst in self.module.instances:
                child = self.children[inst.name]
                child_inputs = {}
                for port in child.iface.inputs():
                    if port.name in inst.conns:
                        v, _ = _eval(inst.conns[port.name], self.env, self.module.widths)
                        child_inputs[port.name] = v
                child.drive(child_inputs)
                child._settle()
                for port in child.iface.outputs():
                    conn = inst.conns.get(port.name)
                    if conn is None:
                        continue
                    if conn[0] != "id":
                        raise UnsupportedConstruct(
                            f"instance {inst.name}: output {port.name} must connect to a name"
                        )
                    value = child.env.get(port.name)
                    self.env[conn[1]] = None if value is None else _mask(
                        value, self.module.widths.get(conn[1], 32)
                    )
            if self.env == before:
                return
        # oscillating combinational loop: leave last values in place

    def drive(self, inputs: dict[str, int | None]) -> None:
        for name, value in inputs.items():
            width = self.module.widths.get(name, 32)
            self.env[name] = None if value is None else _mask(value, width)

    def _clock_edge(self) -> None:
        nb_queue: dict[str, int | None] = {}
        for block in self.module.clocked_blocks:
            self._exec(block.body, nb_queue)
        self.env.update(nb_queue)
        for child in self.children.values():
            if child.module.clocked_blocks or child.children:
                child._clock_edge()

    def step(self, inputs: dict[str, int | None]) -> dict[str, int | None]:
        unknown = set(inputs) - self._input_names
        if unknown:
            raise UnsupportedConstruct(f"inputs for unknown ports {sorted(unknown)}")
        self.drive(inputs)
        self._settle()
        if self.iface.sequential or self.module.clocked_blocks:
            self._clock_edge()
            self._settle()
        return {p.name: self.env.get(p.name) for p in self.iface.outputs()}
