"""Single-site fault injection across the four debugging-bug categories.

Mutations operate on a token stream with source coordinates rather than a
full AST: each edit class is token-local. Sites are enumerated on the
comment-stripped text; because stripping is layout-preserving, a site's
(line, col) addresses the same bytes in the original file, and injection is
an exact single-span splice there.

Categories:
  arithmetic  - swap one binary operator (+/-, *->+, &&/||, &/|, ==/!=,
                </<=, >/>=) or toggle a leading ! on a bare conditional operand
  assignment  - flip a 1-bit literal (1'b0 <-> 1'b1) or nudge a sized decimal
                literal by +/-1, on the right-hand side of an assignment
  timing      - turn one non-blocking assignment into blocking (or back)
                inside an always block, or rewrite one edge-sensitivity list
                to @(*)
  state_machine - retarget a state-register assignment to a different declared
                state constant from the same enumeration

Module headers and parameter/localparam declarations are never mutated: the
interface and the state encodings must survive injection unchanged.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from enum import Enum

from .errors import NoSitesFound, QuotaUnreachable, SiteStale
from .interface import parse_module_interface, strip_comments
from .stimulus import derive_seed
from .tokens import Token, parse_number, tokenize


class BugCategory(Enum):
    ARITHMETIC = "arithmetic"
    ASSIGNMENT = "assignment"
    TIMING = "timing"
    STATE_MACHINE = "state_machine"


@dataclass(frozen=True)
class MutationSite:
    category: BugCategory
    line: int
    col: int
    original: str
    replacement: str

    def __post_init__(self):
        if self.original == self.replacement:
            raise ValueError("site must change the text")


@dataclass(frozen=True)
class BugCase:
    category: BugCategory
    site: MutationSite
    mutated_source: str
    case_id: str

    def bug_json(self, source_case: str) -> dict:
        return {
            "category": self.category.value,
            "line": self.site.line,
            "col": self.site.col,
            "original": self.site.original,
            "replacement": self.site.replacement,
            "source_case": source_case,
        }


_ARITH_SWAPS = {
    "+": ("-", "*"),
    "-": ("+",),
    "*": ("+",),
    "&&": ("||",),
    "||": ("&&",),
    "&": ("|",),
    "|": ("&",),
    "==": ("!=",),
    "!=": ("==",),
    "<": ("<=",),
    ">": (">=",),
    ">=": (">",),
    # relational `<=` -> `<` is added specially: the token doubles as the
    # non-blocking assignment operator and only expression uses qualify
}

_DECL_KEYWORDS = {
    "wire", "reg", "logic", "integer", "input", "output", "inout",
    "parameter", "localparam", "genvar",
}

_ALWAYS_KEYWORDS = {"always", "always_ff", "always_comb", "always_latch"}


class _Scan:
    """Token-stream facts every category rule needs."""

    def __init__(self, source: str):
        self.stripped = strip_comments(source)
        self.tokens = tokenize(self.stripped)
        self.line_offsets = [0]
        for line in self.stripped.splitlines(keepends=True):
            self.line_offsets.append(self.line_offsets[-1] + len(line))
        n = len(self.tokens)
        self.excluded = [False] * n       # header / declarations / params
        self.assign_ops: list[int] = []   # indices of statement assignment ops
        self.rhs = [False] * n            # token is on an assignment RHS
        self.in_always = [False] * n
        self.relational_le: set[int] = set()  # `<=` used as comparison
        self._classify()

    def offset(self, token: Token) -> int:
        return self.line_offsets[token.line - 1] + token.col - 1

    def token_end(self, token: Token) -> int:
        return self.offset(token) + len(token.text)

    def slice(self, start_tok: Token, end_tok: Token) -> str:
        return self.stripped[self.offset(start_tok): self.token_end(end_tok)]

    # --- structure walk ---------------------------------------------------------

    def _match_group(self, i: int) -> int:
        """tokens[i] is '('; index just past its matching ')'."""
        depth = 0
        while i < len(self.tokens):
            text = self.tokens[i].text
            if text == "(":
                depth += 1
            elif text == ")":
                depth -= 1
                if depth == 0:
                    return i + 1
            i += 1
        return i

    def _stmt_end(self, i: int) -> int:
        """Index just past one statement starting at tokens[i]."""
        toks = self.tokens
        n = len(toks)
        if i >= n:
            return n
        text = toks[i].text
        if text == "begin":
            i += 1
            if i < n and toks[i].text == ":":
                i += 2  # block label
            while i < n and toks[i].text != "end":
                i = self._stmt_end(i)
            return min(i + 1, n)
        if text == "if":
            i = self._match_group(i + 1)
            i = self._stmt_end(i)
            if i < n and toks[i].text == "else":
                i = self._stmt_end(i + 1)
            return i
        if text in ("case", "casez", "casex"):
            i += 1
            while i < n and toks[i].text != "endcase":
                if toks[i].text in ("case", "casez", "casex"):
                    i = self._stmt_end(i)
                else:
                    i += 1
            return min(i + 1, n)
        while i < n and toks[i].text != ";":
            i += 1
        return min(i + 1, n)

    def _mark(self, flags: list, start: int, stop: int) -> None:
        for k in range(start, min(stop, len(flags))):
            flags[k] = True

    def _classify(self) -> None:
        toks = self.tokens
        n = len(toks)

        # module header: 'module' .. first ';'
        i = 0
        while i < n:
            if toks[i].text == "module":
                j = i
                while j < n and toks[j].text != ";":
                    j += 1
                self._mark(self.excluded, i, j + 1)
                i = j + 1
            else:
                i += 1

        # declarations and always spans
        i = 0
        while i < n:
            t = toks[i]
            if self.excluded[i]:
                i += 1
                continue
            if t.text in ("parameter", "localparam"):
                j = i
                while j < n and toks[j].text != ";":
                    j += 1
                self._mark(self.excluded, i, j + 1)
                i = j + 1
                continue
            if t.text in _DECL_KEYWORDS:
                # declaration; a wire initializer's RHS stays mutable
                j = i
                while j < n and toks[j].text not in (";", "="):
                    j += 1
                self._mark(self.excluded, i, j + 1)
                i = j + 1
                continue
            if t.text in _ALWAYS_KEYWORDS:
                j = i + 1
                if j < n and toks[j].text == "@":
                    j += 1
                    if j < n and toks[j].text == "(":
                        j = self._match_group(j)
                end = self._stmt_end(j)
                self._mark(self.in_always, j, end)
                i = end
                continue
            i += 1

        # statement assignment operators and RHS regions
        i = 0
        depth = 0
        stmt_has_op = False
        for i, t in enumerate(toks):
            if t.text == "(" or t.text == "[":
                depth += 1
            elif t.text == ")" or t.text == "]":
                depth -= 1
            elif t.text in (";", "begin", "end"):
                stmt_has_op = False
            elif t.text in ("=", "<=") and t.kind == "op" and depth == 0:
                if self.excluded[i]:
                    continue
                prev = toks[i - 1] if i else None
                lvalue_end = prev is not None and (
                    prev.kind == "id" or prev.text in ("]", "}")
                )
                if not stmt_has_op and lvalue_end:
                    self.assign_ops.append(i)
                    stmt_has_op = True
                    j = i + 1
                    while j < len(toks) and toks[j].text != ";":
                        self.rhs[j] = True
                        j += 1
                elif t.text == "<=":
                    self.relational_le.add(i)
            elif t.text == "<=" and t.kind == "op" and depth > 0:
                self.relational_le.add(i)


def _site(scan: _Scan, category: BugCategory, token: Token,
          original: str, replacement: str) -> MutationSite:
    return MutationSite(category, token.line, token.col, original, replacement)


def _arithmetic_sites(scan: _Scan) -> list[MutationSite]:
    sites = []
    toks = scan.tokens
    for i, t in enumerate(toks):
        if scan.excluded[i] or t.kind != "op":
            continue
        if t.text in _ARITH_SWAPS and t.text != "<=":
            if t.text in ("+", "-", "*"):
                prev = toks[i - 1] if i else None
                binary = prev is not None and (
                    prev.kind in ("id", "num") or prev.text in (")", "]")
                )
                if not binary:
                    continue
            if t.text == "<" and i + 1 < len(toks) and toks[i + 1].text == "=":
                continue
            for repl in _ARITH_SWAPS[t.text]:
                sites.append(_site(scan, BugCategory.ARITHMETIC, t, t.text, repl))
        elif t.text == "<=" and i in scan.relational_le:
            sites.append(_site(scan, BugCategory.ARITHMETIC, t, "<=", "<"))

    # leading-! toggles on bare operands of if-conditions
    for i, t in enumerate(toks):
        if t.text != "if" or scan.excluded[i]:
            continue
        if i + 1 >= len(toks) or toks[i + 1].text != "(":
            continue
        stop = scan._match_group(i + 1)
        depth = 0
        for j in range(i + 1, stop):
            tj = toks[j].text
            if tj == "(":
                depth += 1
            elif tj == ")":
                depth -= 1
            if toks[j].kind != "id" or depth != 1 or toks[j].is_keyword:
                continue
            prev, nxt = toks[j - 1], toks[j + 1] if j + 1 < stop else None
            if nxt is None or nxt.text not in (")", "&&", "||"):
                continue
            if prev.text == "!":
                original = scan.slice(prev, toks[j])
                sites.append(
                    _site(scan, BugCategory.ARITHMETIC, prev, original, toks[j].text)
                )
            elif prev.text in ("(", "&&", "||"):
                sites.append(
                    _site(scan, BugCategory.ARITHMETIC, toks[j],
                          toks[j].text, "!" + toks[j].text)
                )
    return sites


_ONE_BIT = {"1'b0": "1'b1", "1'b1": "1'b0"}
_SIZED_DEC = re.compile(r"(\d+)'([sS]?)[dD]([0-9_]+)$")


def _assignment_sites(scan: _Scan) -> list[MutationSite]:
    sites = []
    for i, t in enumerate(scan.tokens):
        if not scan.rhs[i] or scan.excluded[i] or t.kind != "num":
            continue
        if t.text in _ONE_BIT:
            sites.append(
                _site(scan, BugCategory.ASSIGNMENT, t, t.text, _ONE_BIT[t.text])
            )
            continue
        m = _SIZED_DEC.match(t.text)
        if not m:
            continue
        width = int(m.group(1))
        value, _ = parse_number(t.text)
        if value is None:
            continue
        prefix = f"{m.group(1)}'{m.group(2)}d"
        if value + 1 < (1 << width):
            sites.append(
                _site(scan, BugCategory.ASSIGNMENT, t, t.text, f"{prefix}{value + 1}")
            )
        if value >= 1:
            sites.append(
                _site(scan, BugCategory.ASSIGNMENT, t, t.text, f"{prefix}{value - 1}")
            )
    return sites


def _timing_sites(scan: _Scan) -> list[MutationSite]:
    sites = []
    toks = scan.tokens
    for i in scan.assign_ops:
        if not scan.in_always[i]:
            continue
        t = toks[i]
        if t.text == "<=":
            sites.append(_site(scan, BugCategory.TIMING, t, "<=", "="))
        else:
            sites.append(_site(scan, BugCategory.TIMING, t, "=", "<="))

    for i, t in enumerate(toks):
        if t.text != "@" or i + 1 >= len(toks) or toks[i + 1].text != "(":
            continue
        stop = scan._match_group(i + 1)
        group = toks[i + 1: stop]
        if not any(g.text in ("posedge", "negedge") for g in group):
            continue
        original = scan.slice(toks[i + 1], toks[stop - 1])
        sites.append(_site(scan, BugCategory.TIMING, toks[i + 1], original, "(*)"))
    return sites


def _collect_params(scan: _Scan) -> set[str]:
    names = set()
    toks = scan.tokens
    i = 0
    while i < len(toks):
        if toks[i].text in ("parameter", "localparam"):
            j = i + 1
            while j < len(toks) and toks[j].text != ";":
                if toks[j].text == "=" and toks[j - 1].kind == "id":
                    names.add(toks[j - 1].text)
                j += 1
            i = j
        i += 1
    return names


def _state_machine_sites(scan: _Scan) -> list[MutationSite]:
    params = _collect_params(scan)
    toks = scan.tokens
    # enumeration membership: constants assigned to / compared with each
    # state-named variable
    enums: dict[str, set[str]] = {}
    assigns: list[tuple[int, str, int]] = []  # (rhs token idx, state var, op idx)

    for i in scan.assign_ops:
        lhs = toks[i - 1]
        if lhs.kind != "id" or "state" not in lhs.text.lower():
            continue
        j = i + 1
        if j < len(toks) and toks[j].kind == "id" and toks[j].text in params \
                and j + 1 < len(toks) and toks[j + 1].text == ";":
            enums.setdefault(lhs.text, set()).add(toks[j].text)
            assigns.append((j, lhs.text, i))

    # case (state) labels and equality comparisons widen the enumeration
    for i, t in enumerate(toks):
        if t.text in ("case", "casez", "casex") and i + 2 < len(toks):
            if toks[i + 1].text == "(" and toks[i + 2].kind == "id" \
                    and "state" in toks[i + 2].text.lower():
                var = toks[i + 2].text
                stop = scan._stmt_end(i)
                for k in range(i + 3, stop):
                    if toks[k].kind == "id" and toks[k].text in params \
                            and k + 1 < stop and toks[k + 1].text == ":":
                        enums.setdefault(var, set()).add(toks[k].text)
        if t.text in ("==", "!=") and i >= 1 and i + 1 < len(toks):
            left, right = toks[i - 1], toks[i + 1]
            if left.kind == "id" and "state" in left.text.lower() \
                    and right.text in params:
                enums.setdefault(left.text, set()).add(right.text)
            if right.kind == "id" and "state" in right.text.lower() \
                    and left.text in params:
                enums.setdefault(right.text, set()).add(left.text)

    sites = []
    for rhs_idx, var, _ in assigns:
        current = toks[rhs_idx].text
        for other in sorted(enums.get(var, ()) - {current}):
            sites.append(
                _site(scan, BugCategory.STATE_MACHINE, toks[rhs_idx], current, other)
            )
    return sites


_RULES = {
    BugCategory.ARITHMETIC: _arithmetic_sites,
    BugCategory.ASSIGNMENT: _assignment_sites,
    BugCategory.TIMING: _timing_sites,
    BugCategory.STATE_MACHINE: _state_machine_sites,
}


def enumerate_sites(source: str, category: BugCategory) -> list[MutationSite]:
    scan = _Scan(source)
    sites = _RULES[category](scan)
    if not sites:
        raise NoSitesFound(f"no {category.value} sites in source")
    return sorted(sites, key=lambda s: (s.line, s.col, s.replacement))


def inject(source: str, site: MutationSite, rng_seed: int = 0) -> BugCase:
    """Splice one site; everything outside the span stays byte-identical."""
    scan = _Scan(source)
    offset = scan.line_offsets[site.line - 1] + site.col - 1
    if scan.stripped[offset: offset + len(site.original)] != site.original:
        raise SiteStale(
            f"source at {site.line}:{site.col} no longer matches {site.original!r}"
        )
    mutated = source[:offset] + site.replacement + source[offset + len(site.original):]

    original_iface = parse_module_interface(source)
    mutated_iface = parse_module_interface(mutated)
    if original_iface != mutated_iface:
        raise SiteStale("mutation altered the module interface")

    case_id = (
        f"{original_iface.module_name}_{site.category.value}"
        f"_{site.line}_{site.col}_{derive_seed(rng_seed, site.replacement) & 0xFFFF:04x}"
    )
    return BugCase(site.category, site, mutated, case_id)


def synthesize_debug_corpus(
    goldens: list[tuple[str, str]],
    quota: dict[BugCategory, int],
    seed: int,
    observable=None,
) -> list[tuple[str, BugCase]]:
    """Seeded sampling of single-site bug cases across golden sources.

    `goldens` pairs (case_id, source); cases with no sites for a category are
    skipped. With `observable(source_case_id, bug_case) -> bool` set, mutants
    the check rejects (equivalent mutants) are discarded before counting.
    Raises QuotaUnreachable with the achieved per-category counts when the
    pool runs dry; the partial corpus rides along on the exception.
    """
    chosen: list[tuple[str, BugCase]] = []
    achieved: dict[str, int] = {}
    shortfall = False
    for category in BugCategory:
        want = quota.get(category, 0)
        achieved[category.value] = 0
        if want <= 0:
            continue
        pool: list[tuple[str, str, MutationSite]] = []
        for case_id, source in goldens:
            try:
                sites = enumerate_sites(source, category)
            except NoSitesFound:
                continue
            pool.extend((case_id, source, s) for s in sites)
        rng = random.Random(derive_seed(seed, category.value))
        rng.shuffle(pool)
        for case_id, source, site in pool:
            if achieved[category.value] >= want:
                break
            try:
                bug = inject(source, site, rng_seed=seed)
            except SiteStale:
                continue
            if observable is not None and not observable(case_id, bug):
                continue
            chosen.append((case_id, bug))
            achieved[category.value] += 1
        if achieved[category.value] < want:
            shortfall = True
    if shortfall:
        exc = QuotaUnreachable(
            f"could not reach quota; achieved {achieved}", achieved=achieved
        )
        exc.partial = chosen
        raise exc
    return chosen
