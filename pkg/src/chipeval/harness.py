"""Emission of verification artifacts: dual-instance SystemVerilog testbench,
step-protocol C++ harness for a Verilated golden, and reference-model stubs.

All emission is plain-text template substitution, byte-deterministic for a
given interface. Compiling the emitted sources requires iverilog/verilator
and only happens in environment-gated integration runs; unit tests check the
text structurally and against frozen snapshots.
"""

from __future__ import annotations

import re
from enum import Enum

from .errors import UnsupportedPort
from .interface import ModuleInterface, PortDirection
from .stimulus import StimulusPlan

DUT_SUFFIX = "_dut"
STIMULUS_FILE = "stimulus.hex"


class HarnessTemplateKind(Enum):
    SV_DUAL_TESTBENCH = "sv_dual_testbench"
    CXX_VERILATED_PROTOCOL_HARNESS = "cxx_verilated_protocol_harness"
    REF_STUB_PYTHON = "ref_stub_python"
    REF_STUB_SYSTEMC = "ref_stub_systemc"
    REF_STUB_CXXRTL = "ref_stub_cxxrtl"


REF_STUB_KINDS = (
    HarnessTemplateKind.REF_STUB_PYTHON,
    HarnessTemplateKind.REF_STUB_SYSTEMC,
    HarnessTemplateKind.REF_STUB_CXXRTL,
)


def _reject_inout(iface: ModuleInterface) -> None:
    for p in iface.ports:
        if p.direction is PortDirection.INOUT:
            raise UnsupportedPort(f"inout port {p.name!r} is not supported")


def _range_txt(width: int) -> str:
    return f"[{width - 1}:0] " if width > 1 else ""


def emit_interface_module(iface: ModuleInterface) -> str:
    """Bare module shell re-declaring the interface with ANSI ports.

    parse_module_interface(emit_interface_module(iface)) round-trips.
    """
    if not iface.ports:
        return f"module {iface.module_name}();\nendmodule\n"
    entries = []
    for p in iface.ports:
        signed = "signed " if p.signed else ""
        entries.append(f"    {p.direction.value} {signed}{_range_txt(p.width)}{p.name}")
    body = ",\n".join(entries)
    return f"module {iface.module_name}(\n{body}\n);\nendmodule\n"


def rename_module(source: str, top: str, suffix: str = DUT_SUFFIX) -> str:
    """Mechanically rename the top module declaration (candidate side)."""
    pattern = re.compile(rf"(\bmodule\s+){re.escape(top)}\b")
    renamed, count = pattern.subn(rf"\g<1>{top}{suffix}", source, count=1)
    if count == 0:
        raise UnsupportedPort(f"no declaration of module {top!r} to rename")
    return renamed


def _instance(mod_name: str, inst_name: str, iface: ModuleInterface,
              out_suffix: str) -> str:
    conns = []
    for p in iface.ports:
        target = p.name if p.direction is PortDirection.INPUT else f"{p.name}{out_suffix}"
        conns.append(f"        .{p.name}({target})")
    joined = ",\n".join(conns)
    return f"    {mod_name} {inst_name} (\n{joined}\n    );"


def emit_sv_testbench(iface: ModuleInterface, plan: StimulusPlan) -> str:
    """Dual-instance differential testbench.

    Instantiates the golden module and the `_dut`-renamed candidate, drives a
    2-time-unit clock and the one-shot reset (both come in through the
    stimulus memory image), compares outputs once the reset mask opens, and
    prints MISMATCH lines plus one final RESULT line.
    """
    _reject_inout(iface)
    mod = iface.module_name
    driven = iface.driven_inputs()
    outputs = iface.outputs()
    in_bits = sum(p.width for p in driven)

    decls = []
    if iface.clock:
        decls.append(f"    reg {iface.clock.name};")
    for p in driven:
        decls.append(f"    reg {_range_txt(p.width)}{p.name};")
    for p in outputs:
        decls.append(f"    wire {_range_txt(p.width)}{p.name}_gold;")
        decls.append(f"    wire {_range_txt(p.width)}{p.name}_dut;")

    compares = []
    for p in outputs:
        compares.append(
            f"""                if ({p.name}_gold !== {p.name}_dut) begin
                    mismatches = mismatches + 1;
                    $display("MISMATCH cycle=%0d port={p.name}", cycle);
                end"""
        )
    compare_block = "\n".join(compares) if compares else "                ;"

    drive = ""
    stim_decl = ""
    readmem = ""
    if driven:
        concat = "{" + ", ".join(p.name for p in driven) + "}"
        stim_decl = (
            f"    reg [{in_bits - 1}:0] stim [0:TOTAL_CYCLES-1];\n"
        )
        readmem = f'        $readmemh("{STIMULUS_FILE}", stim);\n'
        drive = f"            {concat} = stim[cycle];\n"

    if iface.clock:
        clock_gen = f"    always #1 {iface.clock.name} = ~{iface.clock.name};\n"
        clock_init = f"        {iface.clock.name} = 1'b0;\n"
        advance = f"            @(posedge {iface.clock.name});\n            #1;\n"
    else:
        clock_gen = ""
        clock_init = ""
        advance = "            #2;\n"

    return f"""`timescale 1ns/1ns
// Differential testbench for {mod}: golden vs candidate ({mod}{DUT_SUFFIX}).
module tb_{mod};

    localparam integer TOTAL_CYCLES = {plan.total_cycles};
    localparam integer RESET_CYCLES = {plan.reset_cycles};

{chr(10).join(decls)}
{stim_decl}    integer cycle;
    integer mismatches;

{_instance(mod, "u_gold", iface, "_gold")}

{_instance(mod + DUT_SUFFIX, "u_dut", iface, "_dut")}

{clock_gen}    initial begin
{clock_init}        mismatches = 0;
{readmem}        for (cycle = 0; cycle < TOTAL_CYCLES; cycle = cycle + 1) begin
{drive}{advance}            if (cycle >= RESET_CYCLES) begin
{compare_block}
            end
        end
        $display("RESULT %s count=%0d",
                 (mismatches == 0) ? "PASS" : "FAIL", mismatches);
        $finish;
    end

endmodule
"""


def _cxx_port_type(width: int) -> str:
    if width <= 8:
        return "uint8_t"
    if width <= 16:
        return "uint16_t"
    if width <= 32:
        return "uint32_t"
    return "uint64_t"


def emit_cxx_harness(iface: ModuleInterface) -> str:
    """Step-protocol endpoint source binding a Verilated golden model.

    Reads one JSON message per stdin line (the engine's canonical key order),
    assigns inputs, runs two clock-toggle evaluations per step for sequential
    designs, samples outputs and replies in protocol hex. Ports wider than
    64 bits go through per-32-bit-word access on the Verilated VlWide type.
    """
    _reject_inout(iface)
    mod = iface.module_name
    driven = iface.driven_inputs()
    outputs = iface.outputs()

    assign_lines = []
    for p in driven:
        if p.width <= 64:
            assign_lines.append(
                f'        top->{p.name} = ({_cxx_port_type(p.width)})'
                f'read_hex_input(line, "{p.name}");'
            )
        else:
            words = (p.width + 31) // 32
            assign_lines.append(
                f'        read_hex_wide(line, "{p.name}", top->{p.name}, {words});'
            )

    sample_lines = []
    for i, p in enumerate(outputs):
        sep = "," if i + 1 < len(outputs) else ""
        if p.width <= 64:
            sample_lines.append(
                f'        reply += out_field("{p.name}", (unsigned long long)top->{p.name}, {p.width});'
            )
        else:
            words = (p.width + 31) // 32
            sample_lines.append(
                f'        reply += out_field_wide("{p.name}", top->{p.name}, {words});'
            )
        if sep:
            sample_lines.append('        reply += ",";')

    if iface.clock:
        step_clock = f"""        // two clock-toggle evaluations per step
        top->{iface.clock.name} = 0; top->eval();
        top->{iface.clock.name} = 1; top->eval();"""
    else:
        step_clock = "        top->eval();"

    return f"""// Step-protocol harness for the Verilated golden model of {mod}.
// Build (environment-gated):
//   verilator --cc {mod}.sv --exe test.cpp && make -C obj_dir -f V{mod}.mk
#include "V{mod}.h"
#include "verilated.h"

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <iostream>
#include <string>

// Extract the hex value of "name":"<hex>" from one canonical message line.
static unsigned long long read_hex_input(const std::string &line, const char *name) {{
    std::string key = std::string("\\"") + name + "\\":\\"";
    size_t at = line.find(key);
    if (at == std::string::npos) return 0;
    return strtoull(line.c_str() + at + key.size(), nullptr, 16);
}}

template <typename W>
static void read_hex_wide(const std::string &line, const char *name, W &port, int words) {{
    std::string key = std::string("\\"") + name + "\\":\\"";
    size_t at = line.find(key);
    for (int w = 0; w < words; ++w) port[w] = 0;
    if (at == std::string::npos) return;
    size_t start = at + key.size();
    size_t end = line.find('"', start);
    std::string hex = line.substr(start, end - start);
    // consume nibbles from the low end into 32-bit words
    int bit = 0;
    for (int i = (int)hex.size() - 1; i >= 0; --i) {{
        unsigned v = (unsigned)strtoul(hex.substr(i, 1).c_str(), nullptr, 16);
        port[bit / 32] |= v << (bit % 32);
        bit += 4;
    }}
}}

static std::string out_field(const char *name, unsigned long long value, int width) {{
    char buf[64];
    (void)width;
    snprintf(buf, sizeof buf, "\\"%s\\":\\"%llx\\"", name, value);
    return std::string(buf);
}}

template <typename W>
static std::string out_field_wide(const char *name, const W &port, int words) {{
    std::string hex;
    bool lead = true;
    for (int w = words - 1; w >= 0; --w) {{
        char buf[16];
        if (lead) {{
            if (port[w] == 0 && w > 0) continue;
            snprintf(buf, sizeof buf, "%x", (unsigned)port[w]);
            lead = false;
        }} else {{
            snprintf(buf, sizeof buf, "%08x", (unsigned)port[w]);
        }}
        hex += buf;
    }}
    if (hex.empty()) hex = "0";
    return std::string("\\"") + name + "\\":\\"" + hex + "\\"";
}}

static long long read_int_field(const std::string &line, const char *name) {{
    std::string key = std::string("\\"") + name + "\\":";
    size_t at = line.find(key);
    if (at == std::string::npos) return 0;
    return strtoll(line.c_str() + at + key.size(), nullptr, 10);
}}

int main(int argc, char **argv) {{
    Verilated::commandArgs(argc, argv);
    V{mod} *top = new V{mod};
    std::string line;
    while (std::getline(std::cin, line)) {{
        if (line.find("\\"type\\":\\"init\\"") != std::string::npos) {{
            std::cout << "{{\\"type\\":\\"ready\\"}}" << std::endl;
            continue;
        }}
        if (line.find("\\"type\\":\\"end\\"") != std::string::npos) break;
        if (line.find("\\"type\\":\\"step\\"") == std::string::npos) continue;
        long long cycle = read_int_field(line, "cycle");
{chr(10).join(assign_lines) if assign_lines else "        // no data inputs"}
{step_clock}
        std::string reply = "{{\\"type\\":\\"outputs\\",\\"cycle\\":" + std::to_string(cycle) + ",\\"outputs\\":{{";
{chr(10).join(sample_lines) if sample_lines else "        // no outputs"}
        reply += "}}}}";
        std::cout << reply << std::endl;
    }}
    top->final();
    delete top;
    return 0;
}}
"""


def _port_doc(iface: ModuleInterface, comment: str) -> str:
    lines = [f"{comment} ports of {iface.module_name}:"]
    for p in iface.ports:
        lines.append(f"{comment}   {p.direction.value:<6} {p.name}: {p.width} bit")
    return "\n".join(lines)


def emit_reference_stub(iface: ModuleInterface, kind: HarnessTemplateKind) -> str:
    """Reference-model skeleton exposing reset()/step() for one flavor.

    The emitted stub is loadable as-is: step() returns all-zero outputs, ready
    for a model author (or an LLM) to replace with real behavior.
    """
    if kind not in REF_STUB_KINDS:
        raise ValueError(f"{kind} is not a reference-stub kind")
    inputs = iface.driven_inputs()
    outputs = iface.outputs()

    if kind is HarnessTemplateKind.REF_STUB_PYTHON:
        in_doc = ", ".join(f'"{p.name}"' for p in inputs) or "none"
        zeros = ", ".join(f'"{p.name}": 0' for p in outputs)
        return f'''"""Reference model skeleton for {iface.module_name}.

{_port_doc(iface, "#")}

Fill in step(): it receives every non-clock input as an integer and must
return every output; use None for an unknown value.
"""


class RefModel:
    def reset(self):
        # initialize internal state here
        pass

    def step(self, inputs):
        # inputs keys: {in_doc}
        return {{{zeros}}}
'''

    if kind is HarnessTemplateKind.REF_STUB_SYSTEMC:
        in_decls = "\n".join(
            f"    sc_in<sc_uint<{p.width}> > {p.name};" for p in inputs
        )
        out_decls = "\n".join(
            f"    sc_out<sc_uint<{p.width}> > {p.name};" for p in outputs
        )
        out_zero = "\n".join(f"        {p.name}.write(0);" for p in outputs)
        return f"""// Reference model skeleton for {iface.module_name} (SystemC flavor).
{_port_doc(iface, "//")}
#include <systemc.h>

SC_MODULE({iface.module_name}_ref) {{
{in_decls}
{out_decls}

    void reset() {{
        // initialize internal state here
    }}

    void step() {{
        // one evaluation cycle; replace the zero outputs with real behavior
{out_zero}
    }}

    SC_CTOR({iface.module_name}_ref) {{}}
}};
"""

    in_decls = "\n".join(
        f"    uint64_t {p.name} = 0;  // {p.width} bit input" for p in inputs
    )
    out_decls = "\n".join(
        f"    uint64_t {p.name} = 0;  // {p.width} bit output" for p in outputs
    )
    return f"""// Reference model skeleton for {iface.module_name} (CXXRTL-style flavor).
{_port_doc(iface, "//")}
#include <cstdint>

struct {iface.module_name}_ref {{
{in_decls}
{out_decls}

    void reset() {{
        // initialize internal state here
    }}

    void step() {{
        // one evaluation cycle; drive the outputs from the inputs and state
    }}
}};
"""
