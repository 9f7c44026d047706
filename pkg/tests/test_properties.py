"""Cross-module property tests with independent oracles."""

import time

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chipeval.behavioral import VerilogEvaluator
from chipeval.cosim import (
    Limits,
    ScriptedEndpoint,
    VerdictKind,
    run_differential,
)
from chipeval.errors import NoSitesFound
from chipeval.interface import parse_module_interface
from chipeval.mutation import BugCategory, enumerate_sites, inject
from chipeval.stimulus import InputVector, StimulusPlan, export_hex, generate_stimuli

from conftest import all_case_dirs


# --- export_hex vs an independent unpacker ------------------------------------------


def unpack_hex_line(line: str, widths: list[tuple[str, int]]) -> dict[str, int]:
    """Oracle: undo the MSB-first concatenation the way the testbench does."""
    word = int(line, 16)
    values = {}
    consumed = 0
    total = sum(w for _, w in widths)
    for name, width in widths:
        shift = total - consumed - width
        values[name] = (word >> shift) & ((1 << width) - 1)
        consumed += width
    return values


@given(st.lists(st.integers(min_value=1, max_value=32), min_size=1, max_size=5),
       st.integers(min_value=0, max_value=2**32 - 1))
@settings(max_examples=100, deadline=None)
def test_hex_export_round_trip(widths, seed):
    ports = ", ".join(f"input [{w - 1}:0] p{i}" for i, w in enumerate(widths))
    iface = parse_module_interface(f"module m({ports}); endmodule")
    plan = StimulusPlan(seed=seed, total_cycles=4, reset_cycles=0,
                        include_corners=False)
    vectors, _ = generate_stimuli(iface, plan)
    lines = export_hex(iface, vectors).splitlines()
    spec = [(f"p{i}", w) for i, w in enumerate(widths)]
    for vec, line in zip(vectors, lines):
        assert unpack_hex_line(line, spec) == vec.values


# --- expression engine vs direct Python computation -----------------------------------

BINOPS = {
    "+": lambda a, b, m: (a + b) & m,
    "-": lambda a, b, m: (a - b) & m,
    "&": lambda a, b, m: a & b,
    "|": lambda a, b, m: a | b,
    "^": lambda a, b, m: a ^ b,
}


@given(
    st.sampled_from(sorted(BINOPS)),
    st.integers(min_value=0, max_value=255),
    st.integers(min_value=0, max_value=255),
)
@settings(max_examples=120, deadline=None)
def test_expression_engine_matches_python(op, a, b):
    ev = VerilogEvaluator(
        f"module m(input [7:0] a, input [7:0] b, output [7:0] y);"
        f" assign y = a {op} b; endmodule"
    )
    assert ev.step({"a": a, "b": b})["y"] == BINOPS[op](a, b, 0xFF)


@given(st.integers(min_value=0, max_value=255))
@settings(max_examples=60, deadline=None)
def test_unary_ops_match_python(a):
    ev = VerilogEvaluator(
        "module m(input [7:0] a, output [7:0] inv, output neg, output red_and,"
        " output red_or, output red_xor);"
        " assign inv = ~a;"
        " assign neg = !a;"
        " assign red_and = &a;"
        " assign red_or = |a;"
        " assign red_xor = ^a;"
        " endmodule"
    )
    out = ev.step({"a": a})
    assert out["inv"] == (~a) & 0xFF
    assert out["neg"] == int(a == 0)
    assert out["red_and"] == int(a == 0xFF)
    assert out["red_or"] == int(a != 0)
    assert out["red_xor"] == bin(a).count("1") & 1


@given(
    st.integers(min_value=0, max_value=255),
    st.integers(min_value=0, max_value=255),
)
@settings(max_examples=60, deadline=None)
def test_comparisons_match_python(a, b):
    ev = VerilogEvaluator(
        "module m(input [7:0] a, input [7:0] b, output lt, output le,"
        " output eq, output ne);"
        " assign lt = a < b;"
        " assign le = (a <= b);"
        " assign eq = a == b;"
        " assign ne = a != b;"
        " endmodule"
    )
    out = ev.step({"a": a, "b": b})
    assert out == {"lt": int(a < b), "le": int(a <= b),
                   "eq": int(a == b), "ne": int(a != b)}


@given(
    st.integers(min_value=0, max_value=255),
    st.integers(min_value=0, max_value=7),
)
@settings(max_examples=60, deadline=None)
def test_shifts_match_python(a, k):
    ev = VerilogEvaluator(
        "module m(input [7:0] a, input [2:0] k, output [7:0] sl, output [7:0] sr);"
        " assign sl = a << k;"
        " assign sr = a >> k;"
        " endmodule"
    )
    out = ev.step({"a": a, "k": k})
    assert out == {"sl": (a << k) & 0xFF, "sr": a >> k}


# --- every enumerated site injects cleanly --------------------------------------------


def test_every_enumerated_site_is_injectable():
    total = 0
    for case_dir in all_case_dirs():
        source = (case_dir / "golden.sv").read_text()
        expected_iface = parse_module_interface(source)
        for category in BugCategory:
            try:
                sites = enumerate_sites(source, category)
            except NoSitesFound:
                continue
            for site in sites:
                bug = inject(source, site)
                assert bug.mutated_source != source
                assert parse_module_interface(bug.mutated_source) == expected_iface
                total += 1
    assert total > 100  # the pool the synthesizer samples from


# --- engine timeout paths ---------------------------------------------------------------


def test_whole_run_timeout():
    iface = parse_module_interface(
        "module m(input clk, input rst_n, output q); endmodule"
    )
    plan = StimulusPlan(seed=0, total_cycles=1000, reset_cycles=10,
                        include_corners=False)
    stimuli, mask = generate_stimuli(iface, plan)

    def slow(cycle, inputs):
        time.sleep(0.002)
        return {"q": 0}

    verdict = run_differential(
        ScriptedEndpoint(slow), ScriptedEndpoint(slow), iface, stimuli, mask,
        Limits(run_timeout_s=0.05),
    )
    assert verdict.kind is VerdictKind.TIMEOUT
    assert "run limit" in verdict.detail
    assert 0 < verdict.cycles_run < 1000
