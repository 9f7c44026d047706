"""Harness emission: structural postconditions, round-trip, frozen snapshots."""

import pathlib
import re

import pytest
from hypothesis import given, settings

from chipeval.errors import UnsupportedPort
from chipeval.harness import (
    DUT_SUFFIX,
    HarnessTemplateKind,
    emit_cxx_harness,
    emit_interface_module,
    emit_reference_stub,
    emit_sv_testbench,
    rename_module,
)
from chipeval.interface import parse_module_interface
from chipeval.stimulus import StimulusPlan

from conftest import CASES_ROOT
from test_interface import header_specs, _emit_header

SNAPSHOTS = pathlib.Path(__file__).parent / "data" / "snapshots"
PLAN = StimulusPlan(seed=0, total_cycles=1024, reset_cycles=20)


def iface_of(rel):
    return parse_module_interface((CASES_ROOT / rel / "golden.sv").read_text())


TRAFFIC = iface_of("self_contained/traffic_light")
ADDER = iface_of("self_contained/carry_lookahead_adder")


def test_tb_instantiates_both_modules_once():
    text = emit_sv_testbench(TRAFFIC, PLAN)
    assert len(re.findall(r"^\s*TopModule u_gold", text, re.M)) == 1
    assert len(re.findall(rf"^\s*TopModule{DUT_SUFFIX} u_dut", text, re.M)) == 1
    assert text.count("RESULT") == 1


def test_tb_combinational_has_no_clock_generator():
    text = emit_sv_testbench(ADDER, PLAN)
    assert "always #1" not in text
    assert "posedge" not in text


def test_tb_sequential_drives_clock_period_2():
    text = emit_sv_testbench(TRAFFIC, PLAN)
    assert "always #1 clk = ~clk;" in text
    assert "`timescale 1ns/1ns" in text


def test_tb_compares_only_after_reset():
    text = emit_sv_testbench(TRAFFIC, PLAN)
    assert "if (cycle >= RESET_CYCLES)" in text
    assert "RESET_CYCLES = 20" in text


def test_tb_mentions_every_port():
    for iface in (TRAFFIC, ADDER):
        text = emit_sv_testbench(iface, PLAN)
        for p in iface.ports:
            assert re.search(rf"\b{p.name}\b", text)


def test_tb_balanced_lexically():
    for iface in (TRAFFIC, ADDER):
        text = emit_sv_testbench(iface, PLAN)
        words = re.findall(r"\b\w+\b", text)
        assert words.count("module") == words.count("endmodule")
        assert words.count("begin") == words.count("end")


def test_tb_rejects_inout():
    iface = parse_module_interface("module m(inout [3:0] b); endmodule")
    with pytest.raises(UnsupportedPort):
        emit_sv_testbench(iface, PLAN)


def test_emission_deterministic():
    assert emit_sv_testbench(TRAFFIC, PLAN) == emit_sv_testbench(TRAFFIC, PLAN)
    assert emit_cxx_harness(TRAFFIC) == emit_cxx_harness(TRAFFIC)


def test_cxx_two_clock_toggles_for_sequential():
    text = emit_cxx_harness(TRAFFIC)
    assert text.count("top->clk = 0; top->eval();") == 1
    assert text.count("top->clk = 1; top->eval();") == 1
    assert "two clock-toggle evaluations" in text


def test_cxx_combinational_single_eval():
    text = emit_cxx_harness(ADDER)
    assert "clk" not in text.replace("// ", "")
    assert "top->eval();" in text


def test_cxx_wide_ports_use_word_access():
    iface = parse_module_interface(
        "module w(input clk, input [127:0] d, output [127:0] q); endmodule"
    )
    text = emit_cxx_harness(iface)
    assert 'read_hex_wide(line, "d", top->d, 4);' in text
    assert 'out_field_wide("q", top->q, 4)' in text


def test_cxx_braces_balanced():
    for iface in (TRAFFIC, ADDER):
        text = emit_cxx_harness(iface)
        assert text.count("{") == text.count("}")


def test_rename_module():
    src = "module alu(input a); endmodule"
    out = rename_module(src, "alu")
    assert "module alu_dut(" in out
    with pytest.raises(UnsupportedPort):
        rename_module(src, "missing")


def test_rename_only_declaration():
    src = "module leaf(); endmodule\nmodule top(); leaf u(); endmodule"
    out = rename_module(src, "top")
    assert "module top_dut(" in out
    assert out.count("leaf") == 2


def test_stub_python_loadable_and_zero(tmp_path):
    text = emit_reference_stub(TRAFFIC, HarnessTemplateKind.REF_STUB_PYTHON)
    ns = {}
    exec(compile(text, "stub.py", "exec"), ns)
    model = ns["RefModel"]()
    model.reset()
    out = model.step({"rst_n": 1})
    assert out == {"red": 0, "yellow": 0, "green": 0}


def test_stub_gray_counter_declares_q4():
    iface = iface_of("self_contained/gray_code_counter")
    text = emit_reference_stub(iface, HarnessTemplateKind.REF_STUB_PYTHON)
    assert "q: 4 bit" in text
    assert '"q": 0' in text


def test_stub_empty_interface():
    iface = parse_module_interface("module m(); endmodule")
    text = emit_reference_stub(iface, HarnessTemplateKind.REF_STUB_PYTHON)
    ns = {}
    exec(compile(text, "stub.py", "exec"), ns)
    assert ns["RefModel"]().step({}) == {}


def test_stub_flavors_exist():
    for kind in (
        HarnessTemplateKind.REF_STUB_SYSTEMC,
        HarnessTemplateKind.REF_STUB_CXXRTL,
    ):
        text = emit_reference_stub(TRAFFIC, kind)
        assert "reset" in text and "step" in text
        for p in TRAFFIC.ports:
            assert p.name in text


def test_stub_rejects_non_stub_kind():
    with pytest.raises(ValueError):
        emit_reference_stub(TRAFFIC, HarnessTemplateKind.SV_DUAL_TESTBENCH)


# --- round-trip property: parse(emit(iface)) == iface ---------------------------


def test_interface_module_round_trip_samples():
    for rel in (
        "self_contained/traffic_light",
        "self_contained/carry_lookahead_adder",
        "cpu_ip/alu",
    ):
        iface = iface_of(rel)
        assert parse_module_interface(emit_interface_module(iface)) == iface


@given(header_specs())
@settings(max_examples=150, deadline=None)
def test_interface_module_round_trip_random(specs):
    iface = parse_module_interface(_emit_header(specs, 0))
    assert parse_module_interface(emit_interface_module(iface)) == iface


def test_interface_module_empty_round_trip():
    iface = parse_module_interface("module m(); endmodule")
    assert parse_module_interface(emit_interface_module(iface)) == iface


# --- frozen snapshots -------------------------------------------------------------


@pytest.mark.parametrize(
    "rel", ["self_contained/traffic_light", "self_contained/carry_lookahead_adder",
            "non_self_contained/min_of_three"],
    ids=lambda r: r.split("/")[-1],
)
def test_snapshots_frozen(rel):
    iface = iface_of(rel)
    stem = rel.split("/")[-1]
    assert emit_sv_testbench(iface, PLAN) == (SNAPSHOTS / f"{stem}.test.sv").read_text()
    assert emit_cxx_harness(iface) == (SNAPSHOTS / f"{stem}.test.cpp").read_text()
    assert (
        emit_reference_stub(iface, HarnessTemplateKind.REF_STUB_PYTHON)
        == (SNAPSHOTS / f"{stem}.ref_stub.py").read_text()
    )
