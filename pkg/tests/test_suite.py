"""Corpus loading, prompt construction, and evaluation orchestration tests."""

import json
import shutil

import pytest

from chipeval.errors import EmptyCorpus, MissingArtifacts
from chipeval.mutation import BugCategory
from chipeval.suite import (
    KIND_DEBUG_ONE,
    KIND_DEBUG_ZERO,
    KIND_REF_PYTHON,
    KIND_VERILOG_GEN,
    CaseKind,
    EvalConfig,
    GoldenSelfCheckProvider,
    SolutionsProvider,
    build_prompt,
    load_corpus,
    parse_tb_output,
    run_evaluation,
    synthesize_debug_cases,
    verify_candidate,
    write_results,
)

from conftest import CASES_ROOT

EVAL_CFG = EvalConfig(
    master_seed=11, n_samples=2, total_cycles=96, reset_cycles=20,
    workers=2, ks=(1, 2),
)


@pytest.fixture(scope="module")
def corpus():
    return load_corpus(CASES_ROOT.parent)


def test_load_sample_corpus(corpus):
    assert len(corpus.cases) == 6
    assert corpus.rejects == []
    ids = {c.case_id for c in corpus.cases}
    assert {"traffic_light", "gray_code_counter", "carry_lookahead_adder",
            "up_down_counter", "min_of_three", "alu"} == ids


def test_case_categories(corpus):
    by_id = {c.case_id: c for c in corpus.cases}
    assert by_id["alu"].category == "cpu_ip"
    assert by_id["min_of_three"].category == "non_self_contained"


def test_missing_prompt_rejected(tmp_path):
    src = CASES_ROOT / "self_contained/gray_code_counter"
    dst = tmp_path / "cases/self_contained/gray_code_counter"
    shutil.copytree(src, dst)
    (dst / "prompt.txt").unlink()
    report = load_corpus(tmp_path)
    assert report.cases == []
    assert len(report.rejects) == 1
    assert "MissingFile" in report.rejects[0][1]
    assert "prompt.txt" in report.rejects[0][1]


def test_unparseable_golden_rejected(tmp_path):
    src = CASES_ROOT / "self_contained/gray_code_counter"
    dst = tmp_path / "cases/self_contained/gray_code_counter"
    shutil.copytree(src, dst)
    truncated = (src / "golden.sv").read_text().split("always")[0]
    (dst / "golden.sv").write_text(truncated)
    report = load_corpus(tmp_path)
    assert report.cases == []
    assert "ParseError" in report.rejects[0][1]


def test_empty_corpus(tmp_path):
    with pytest.raises(EmptyCorpus):
        load_corpus(tmp_path / "nothing")


def test_kind_tags_round_trip():
    for kind in (KIND_VERILOG_GEN, KIND_DEBUG_ZERO, KIND_DEBUG_ONE, KIND_REF_PYTHON):
        assert CaseKind.from_tag(kind.tag) == kind


# --- prompts -----------------------------------------------------------------------


def test_gen_prompt_nsc_contains_submodule_source(corpus):
    case = next(c for c in corpus.cases if c.case_id == "min_of_three")
    prompt = build_prompt(case, KIND_VERILOG_GEN)
    submodule_src = (case.path / "submodules/min2.sv").read_text().rstrip()
    assert submodule_src in prompt
    assert "min2" in prompt


def test_gen_prompt_self_contained_plain(corpus):
    case = next(c for c in corpus.cases if c.case_id == "alu")
    prompt = build_prompt(case, KIND_VERILOG_GEN)
    assert prompt.startswith(case.prompt_text.rstrip()[:40])
    assert "Sub-module" not in prompt


def test_ref_prompt_contains_golden_stub_contract(corpus):
    case = next(c for c in corpus.cases if c.case_id == "gray_code_counter")
    prompt = build_prompt(case, KIND_REF_PYTHON)
    assert "module gray_code_counter" in prompt
    assert "class RefModel" in prompt
    assert "reset() and step(inputs)" in prompt


@pytest.fixture(scope="module")
def debug_corpus_root(tmp_path_factory, corpus):
    root = tmp_path_factory.mktemp("debug_corpus")
    quota = {
        BugCategory.ARITHMETIC: 2,
        BugCategory.ASSIGNMENT: 2,
        BugCategory.TIMING: 2,
        BugCategory.STATE_MACHINE: 1,
    }
    synthesize_debug_cases(corpus.cases, quota, seed=3, out_root=root)
    return root


def test_debug_corpus_layout(debug_corpus_root):
    report = load_corpus(debug_corpus_root)
    assert report.rejects == []
    assert len(report.cases) == 7
    for case in report.cases:
        assert (case.path / "buggy.sv").exists()
        bug = json.loads((case.path / "bug.json").read_text())
        assert {"category", "line", "col", "original", "replacement",
                "source_case"} <= set(bug)
        assert case.category in {
            "arithmetic", "assignment", "timing", "state_machine"
        }


def test_zero_shot_prompt_no_location_hint(debug_corpus_root):
    report = load_corpus(debug_corpus_root)
    case = report.cases[0]
    prompt = build_prompt(case, KIND_DEBUG_ZERO)
    buggy = (case.path / "buggy.sv").read_text().rstrip()
    bug = json.loads((case.path / "bug.json").read_text())
    assert buggy in prompt
    assert "exactly one functional bug" in prompt
    assert f"line {bug['line']}" not in prompt
    assert str(bug["col"]) not in prompt.split("```verilog")[0]


def test_one_shot_prompt_embeds_vcd(debug_corpus_root):
    report = load_corpus(debug_corpus_root)
    case = report.cases[0]
    prompt = build_prompt(case, KIND_DEBUG_ONE)
    assert "$enddefinitions" in prompt
    assert (case.path / "wave.vcd").exists()
    # hermetic: regenerating yields the same prompt (cached wave)
    assert build_prompt(case, KIND_DEBUG_ONE) == prompt


def test_prompt_requires_supported_kind(corpus):
    case = corpus.cases[0]
    with pytest.raises(MissingArtifacts):
        build_prompt(case, KIND_DEBUG_ZERO)


# --- verification paths ---------------------------------------------------------------


def test_verify_golden_against_itself(corpus):
    case = next(c for c in corpus.cases if c.case_id == "alu")
    verdict = verify_candidate(case, KIND_VERILOG_GEN, case.golden_source,
                               seed=5, cfg=EVAL_CFG)
    assert verdict.passed, verdict.detail


def test_verify_syntax_error(corpus):
    case = next(c for c in corpus.cases if c.case_id == "alu")
    verdict = verify_candidate(case, KIND_VERILOG_GEN, "module alu(; endmodule",
                               seed=5, cfg=EVAL_CFG)
    assert verdict.kind.value == "syntax_error"


def test_verify_python_model(corpus):
    case = next(c for c in corpus.cases if c.case_id == "carry_lookahead_adder")
    code = case.model_path.read_text()
    verdict = verify_candidate(case, KIND_REF_PYTHON, code, seed=5, cfg=EVAL_CFG)
    assert verdict.passed
    bad = code.replace("total >> 4", "total >> 3")
    verdict = verify_candidate(case, KIND_REF_PYTHON, bad, seed=5, cfg=EVAL_CFG)
    assert verdict.kind.value == "fail"


def test_debug_fix_equal_to_buggy_fails(debug_corpus_root):
    report = load_corpus(debug_corpus_root)
    case = report.cases[0]
    buggy = (case.path / "buggy.sv").read_text()
    verdict = verify_candidate(case, KIND_DEBUG_ZERO, buggy, seed=5,
                               cfg=EvalConfig(total_cycles=256, reset_cycles=20))
    assert verdict.kind.value == "fail"


def test_debug_golden_fix_passes(debug_corpus_root):
    report = load_corpus(debug_corpus_root)
    case = report.cases[0]
    verdict = verify_candidate(case, KIND_DEBUG_ZERO, case.golden_source,
                               seed=5, cfg=EVAL_CFG)
    assert verdict.passed


# --- evaluation runs --------------------------------------------------------------------


def test_golden_self_check_all_pass(corpus):
    records, report = run_evaluation(
        corpus.cases, [KIND_VERILOG_GEN, KIND_REF_PYTHON],
        GoldenSelfCheckProvider(), EVAL_CFG,
    )
    assert len(records) == 6 * 2 * 2
    assert all(r.verdict == "pass" for r in records)
    for tag in ("verilog_gen", "ref_python"):
        assert report["kinds"][tag]["average"]["pass@1"] == 100.0


def test_three_of_ten_sampling(corpus):
    case = next(c for c in corpus.cases if c.case_id == "carry_lookahead_adder")
    good = case.model_path.read_text()
    bad = good.replace("total >> 4", "total >> 3")

    class ThreeOfTen:
        def get_candidate(self, case, kind, sample, seed):
            return (good if sample < 3 else bad), 0, 0

    cfg = EvalConfig(master_seed=1, n_samples=10, total_cycles=64,
                     reset_cycles=8, workers=4, ks=(1, 5, 10))
    records, report = run_evaluation([case], [KIND_REF_PYTHON], ThreeOfTen(), cfg)
    assert sum(r.verdict == "pass" for r in records) == 3
    row = report["kinds"]["ref_python"]["per_category"]["self_contained"]
    assert row["pass@1"] == 30.0
    assert row["pass@5"] == 91.67
    assert row["pass@10"] == 100.0


def test_solutions_provider_layout(tmp_path, corpus):
    case = next(c for c in corpus.cases if c.case_id == "alu")
    (tmp_path / "alu").mkdir()
    (tmp_path / "alu" / "sample_0.sv").write_text(case.golden_source)
    provider = SolutionsProvider(tmp_path)
    text, _, _ = provider.get_candidate(case, KIND_VERILOG_GEN, 0, 0)
    assert text == case.golden_source
    with pytest.raises(MissingArtifacts):
        provider.get_candidate(case, KIND_VERILOG_GEN, 1, 0)


def test_eval_isolates_provider_crash(corpus):
    case = next(c for c in corpus.cases if c.case_id == "alu")

    class Crashy:
        def get_candidate(self, case, kind, sample, seed):
            if sample == 0:
                raise RuntimeError("boom")
            return case.golden_source, 0, 0

    cfg = EvalConfig(master_seed=1, n_samples=2, total_cycles=32,
                     reset_cycles=4, ks=(1,))
    records, report = run_evaluation([case], [KIND_VERILOG_GEN], Crashy(), cfg)
    assert [r.verdict for r in records] == ["runtime_error", "pass"]


def test_eval_deterministic_files(tmp_path, corpus):
    cfg = EvalConfig(master_seed=7, n_samples=2, total_cycles=64,
                     reset_cycles=20, workers=3, ks=(1, 2))
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    for out in (out_a, out_b):
        records, report = run_evaluation(
            corpus.cases, [KIND_VERILOG_GEN, KIND_REF_PYTHON],
            GoldenSelfCheckProvider(), cfg,
        )
        write_results(records, report, out, "run")
    assert (out_a / "run.jsonl").read_bytes() == (out_b / "run.jsonl").read_bytes()
    assert (out_a / "run.jsonl").read_text().count("\n") == 24


def test_parse_tb_output():
    assert parse_tb_output("noise\nRESULT PASS count=0\n") == (True, 0)
    assert parse_tb_output("MISMATCH cycle=25 port=red\nRESULT FAIL count=3\n") == (False, 3)
    with pytest.raises(MissingArtifacts):
        parse_tb_output("no result here")


def test_write_results_report(tmp_path, corpus):
    cfg = EvalConfig(master_seed=7, n_samples=2, total_cycles=32,
                     reset_cycles=4, ks=(1,))
    records, report = run_evaluation(
        corpus.cases[:2], [KIND_REF_PYTHON], GoldenSelfCheckProvider(), cfg,
    )
    path = write_results(records, report, tmp_path, "r1")
    assert path.exists()
    assert (tmp_path / "r1.report").exists()
    assert (tmp_path / "r1.timing.jsonl").exists()
    first = json.loads(path.read_text().splitlines()[0])
    assert "wall_time_s" not in first


def test_debug_corpus_eval_deterministic(tmp_path, debug_corpus_root):
    report = load_corpus(debug_corpus_root)
    cfg = EvalConfig(master_seed=21, n_samples=2, total_cycles=80,
                     reset_cycles=20, workers=3, ks=(1, 2))
    blobs = []
    for name in ("x", "y"):
        records, score_report = run_evaluation(
            report.cases, [KIND_DEBUG_ZERO, KIND_DEBUG_ONE],
            GoldenSelfCheckProvider(), cfg,
        )
        path = write_results(records, score_report, tmp_path / name, "run")
        blobs.append(path.read_bytes())
    assert blobs[0] == blobs[1]
    # golden fix passes in both debug modes for every synthesized case
    assert all(r.verdict == "pass" for r in records)


def test_wave_vcd_contains_all_three_signal_groups(debug_corpus_root):
    from chipeval.suite import WAVE_CYCLES
    from chipeval.vcd import parse_vcd

    report = load_corpus(debug_corpus_root)
    case = report.cases[0]
    build_prompt(case, KIND_DEBUG_ONE)  # materializes wave.vcd
    doc = parse_vcd((case.path / "wave.vcd").read_text())
    names = {t.name for t in doc.traces}
    for port in case.iface.driven_inputs():
        assert port.name in names
    for port in case.iface.outputs():
        assert f"golden.{port.name}" in names
        assert f"buggy.{port.name}" in names
    assert doc.n_cycles == WAVE_CYCLES


def test_simulator_route_orchestration_with_shims(tmp_path, monkeypatch, corpus):
    """Fake iverilog/vvp on PATH: exercises the gated testbench route."""
    import os
    import stat

    bin_dir = tmp_path / "bin"
    bin_dir.mkdir()
    iverilog = bin_dir / "iverilog"
    # the shim checks every source file it was handed actually exists
    iverilog.write_text(
        "#!/bin/sh\n"
        "out=''\n"
        "while [ $# -gt 0 ]; do\n"
        "  case $1 in\n"
        "    -o) out=$2; shift 2;;\n"
        "    -*) shift;;\n"
        "    *) [ -f \"$1\" ] || exit 1; shift;;\n"
        "  esac\n"
        "done\n"
        "echo shim > \"$out\"\n"
    )
    vvp = bin_dir / "vvp"
    vvp.write_text(
        "#!/bin/sh\n"
        "[ -f \"$1\" ] || exit 1\n"
        "[ -f stimulus.hex ] || exit 1\n"
        "echo 'MISMATCH cycle=25 port=q'\n"
        "echo 'RESULT FAIL count=1'\n"
    )
    for shim in (iverilog, vvp):
        shim.chmod(shim.stat().st_mode | stat.S_IEXEC)
    monkeypatch.setenv("PATH", f"{bin_dir}{os.pathsep}{os.environ['PATH']}")

    from chipeval.suite import simulators_available

    assert simulators_available()
    case = next(c for c in corpus.cases if c.case_id == "min_of_three")
    cfg = EvalConfig(master_seed=1, n_samples=1, total_cycles=32,
                     reset_cycles=4, use_simulators="auto")
    verdict = verify_candidate(case, KIND_VERILOG_GEN, case.golden_source,
                               seed=1, cfg=cfg)
    assert verdict.kind.value == "fail"
    assert "testbench route" in verdict.detail

    # a candidate whose module cannot be renamed dies before compiling
    verdict = verify_candidate(case, KIND_VERILOG_GEN,
                               "module wrong_name(); endmodule", seed=1, cfg=cfg)
    assert verdict.kind.value == "runtime_error"
