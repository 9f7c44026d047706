"""chipeval: verification and evaluation toolbox for AI-aided chip design.

Subsystems:

- interface: Verilog top-module I/O extraction (ports, clock, reset polarity)
- stimulus: seeded constrained-random drive sequences with a one-shot reset
  prefix and the comparison mask that goes with it
- cosim: reset-masked differential engine over the lock-step step protocol
- behavioral: cycle-level evaluator for a small synthesizable Verilog subset,
  the execution fallback when no simulator is installed
- harness: testbench / C++ harness / reference-model stub emission
- mutation: single-site bug injection across four fault categories
- llm: multi-turn generate-and-repair pipeline with cost accounting
- scoring: pass@k, category aggregation, corpus statistics, cost efficiency
- suite: corpus management, prompt construction, evaluation orchestration
- vcd: minimal Value Change Dump writer/parser for debug prompts
"""

__version__ = "0.1.0"
