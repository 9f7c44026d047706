"""Verilog token stream with 1-based source coordinates.

Shared by the mutation engine (which edits token spans in place) and the
behavioral evaluator (which parses the same stream). Run it on
comment-stripped text; coordinates then match the original file because the
stripper is layout-preserving.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import UnsupportedConstruct

_NUMBER = r"(?:\d[\d_]*)?'[sS]?[bodhBODH][0-9a-fA-FxXzZ_?]+|\d[\d_]*"
_IDENT = r"[A-Za-z_$][A-Za-z0-9_$]*"
_OPS = [
    "<<<", ">>>", "===", "!==",
    "<=", ">=", "==", "!=", "&&", "||", "<<", ">>", "**",
    "~&", "~|", "~^", "^~", "+:", "-:",
    "+", "-", "*", "/", "%", "&", "|", "^", "~", "!", "<", ">", "=", "?",
]
_PUNCT = list("():;,[]{}@#.")

_TOKEN_RE = re.compile(
    "|".join(
        [
            r"(?P<num>" + _NUMBER + ")",
            r"(?P<id>" + _IDENT + ")",
            r'(?P<str>"(?:[^"\\]|\\.)*")',
            r"(?P<op>" + "|".join(re.escape(o) for o in _OPS) + ")",
            r"(?P<punct>" + "|".join(re.escape(p) for p in _PUNCT) + ")",
            r"(?P<ws>\s+)",
        ]
    )
)

KEYWORDS = {
    "module", "endmodule", "input", "output", "inout", "wire", "reg", "logic",
    "always", "assign", "begin", "end", "if", "else", "case", "casez", "casex",
    "endcase", "default", "posedge", "negedge", "or", "parameter", "localparam",
    "integer", "initial", "signed", "generate", "endgenerate", "for", "function",
    "endfunction", "task", "endtask", "and", "not", "nand", "nor", "xor",
    "always_ff", "always_comb", "always_latch",
}


@dataclass(frozen=True)
class Token:
    kind: str  # 'num' | 'id' | 'str' | 'op' | 'punct'
    text: str
    line: int
    col: int

    @property
    def is_keyword(self) -> bool:
        return self.kind == "id" and self.text in KEYWORDS


def tokenize(stripped_source: str) -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    pos = 0
    n = len(stripped_source)
    while pos < n:
        m = _TOKEN_RE.match(stripped_source, pos)
        if not m:
            raise UnsupportedConstruct(
                f"unexpected character {stripped_source[pos]!r} at {line}:{col}"
            )
        text = m.group(0)
        if m.lastgroup != "ws":
            tokens.append(Token(m.lastgroup, text, line, col))
        newlines = text.count("\n")
        if newlines:
            line += newlines
            col = len(text) - text.rfind("\n")
        else:
            col += len(text)
        pos = m.end()
    return tokens


def parse_number(text: str) -> tuple[int | None, int]:
    """Verilog literal -> (value or None for x/z digits, bit width)."""
    text = text.replace("_", "")
    if "'" not in text:
        return int(text), 32
    size_text, _, rest = text.partition("'")
    rest = rest.lstrip("sS")
    base = {"b": 2, "o": 8, "d": 10, "h": 16}[rest[0].lower()]
    digits = rest[1:]
    width = int(size_text) if size_text else 32
    if re.search(r"[xXzZ?]", digits):
        return None, width
    value = int(digits, base)
    return value & ((1 << width) - 1), width
