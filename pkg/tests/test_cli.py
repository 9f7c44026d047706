"""CLI behavior: subcommands, exit codes, config precedence, determinism."""

import json
import shutil
import sys

import pytest

from chipeval.cli import EXIT_OK, EXIT_USAGE, EXIT_VERIFICATION, main
from chipeval.config import RunConfig

from conftest import CASES_ROOT

REPO = str(CASES_ROOT.parent)


def run_cli(*argv):
    return main(list(argv))


def test_iface_text(capsys):
    code = run_cli("iface", str(CASES_ROOT / "self_contained/traffic_light/golden.sv"))
    out = capsys.readouterr().out
    assert code == EXIT_OK
    assert "clk" in out and "rst_n (active-low)" in out


def test_iface_json(capsys):
    code = run_cli(
        "iface", str(CASES_ROOT / "cpu_ip/alu/golden.sv"), "--format", "json"
    )
    assert code == EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert data["module"] == "alu"
    assert data["sequential"] is False


def test_iface_missing_file():
    assert run_cli("iface", "/nonexistent.sv") == EXIT_USAGE


def test_iface_parse_error(tmp_path):
    bad = tmp_path / "bad.sv"
    bad.write_text("// no module here")
    assert run_cli("iface", str(bad)) == EXIT_USAGE


def test_gen_tb_writes_artifacts(tmp_path, capsys):
    code = run_cli("--corpus", REPO, "gen-tb", "alu", "--out", str(tmp_path))
    assert code == EXIT_OK
    assert (tmp_path / "test.sv").exists()
    assert (tmp_path / "stimulus.hex").exists()
    stim_lines = (tmp_path / "stimulus.hex").read_text().splitlines()
    assert len(stim_lines) == 1024
    iface = json.loads((tmp_path / "interface.json").read_text())
    assert iface["module"] == "alu"


def test_gen_stub(tmp_path):
    code = run_cli("--corpus", REPO, "gen-stub", "gray_code_counter",
                   "--flavor", "python", "--out", str(tmp_path))
    assert code == EXIT_OK
    assert "class RefModel" in (tmp_path / "ref_stub.py").read_text()


def test_gen_harness(tmp_path):
    code = run_cli("--corpus", REPO, "gen-harness", "alu", "--out", str(tmp_path))
    assert code == EXIT_OK
    assert "Valu" in (tmp_path / "test.cpp").read_text()


def test_mutate(tmp_path, capsys):
    code = run_cli("--corpus", REPO, "--seed", "9", "mutate", "traffic_light",
                   "--category", "assignment", "--out", str(tmp_path))
    assert code == EXIT_OK
    bug = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    assert bug["category"] == "assignment"
    assert (tmp_path / "buggy.sv").exists()


def test_unknown_case():
    assert run_cli("--corpus", REPO, "gen-tb", "ghost") == EXIT_USAGE


def test_eval_and_score_round(tmp_path, capsys):
    code = run_cli(
        "--corpus", REPO, "--cycles", "48", "--reset-cycles", "8",
        "--results-dir", str(tmp_path), "--seed", "3",
        "eval", "--kinds", "ref_python", "--samples", "2", "--run-id", "t",
    )
    assert code == EXIT_OK
    out = capsys.readouterr().out
    assert "ref_python" in out and "100.00" in out
    code = run_cli("score", str(tmp_path / "t.jsonl"), "--format", "json")
    assert code == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["kinds"]["ref_python"]["average"]["pass@1"] == 100.0


def test_eval_seed_determinism(tmp_path):
    for name in ("a", "b"):
        code = run_cli(
            "--corpus", REPO, "--cycles", "48", "--reset-cycles", "8",
            "--results-dir", str(tmp_path / name), "--seed", "5",
            "eval", "--kinds", "ref_python", "--samples", "2", "--run-id", "r",
        )
        assert code == EXIT_OK
    assert (tmp_path / "a/r.jsonl").read_bytes() == (tmp_path / "b/r.jsonl").read_bytes()


def test_cosim_subcommand_pass(tmp_path):
    # candidate endpoint: the gray-code model served over the step protocol
    worker = tmp_path / "worker.py"
    worker.write_text(
        """
import json, sys
cnt = 0
q = 0
for line in sys.stdin:
    msg = json.loads(line)
    if msg["type"] == "init":
        print(json.dumps({"type": "ready"}), flush=True)
    elif msg["type"] == "step":
        if int(msg["inputs"]["rst_n"], 16) == 0:
            cnt = 0; q = 0
        else:
            q = cnt ^ (cnt >> 1)
            cnt = (cnt + 1) & 0xF
        print(json.dumps({"type": "outputs", "cycle": msg["cycle"],
                          "outputs": {"q": format(q, "x")}}), flush=True)
    else:
        break
"""
    )
    code = run_cli(
        "--corpus", REPO, "--cycles", "64",
        "cosim", "gray_code_counter", "--candidate",
        f"{sys.executable} {worker}",
    )
    assert code == EXIT_OK


def test_cosim_subcommand_fail(tmp_path, capsys):
    worker = tmp_path / "zeros.py"
    worker.write_text(
        """
import json, sys
for line in sys.stdin:
    msg = json.loads(line)
    if msg["type"] == "init":
        print(json.dumps({"type": "ready"}), flush=True)
    elif msg["type"] == "step":
        print(json.dumps({"type": "outputs", "cycle": msg["cycle"],
                          "outputs": {"q": "0"}}), flush=True)
    else:
        break
"""
    )
    code = run_cli(
        "--corpus", REPO, "--cycles", "64",
        "cosim", "gray_code_counter", "--candidate",
        f"{sys.executable} {worker}",
    )
    assert code == EXIT_VERIFICATION


def test_synth_debug_corpus_cli(tmp_path, capsys):
    corpus = tmp_path / "corpus"
    shutil.copytree(CASES_ROOT, corpus / "cases")
    code = run_cli(
        "--corpus", str(corpus), "--seed", "4",
        "synth-debug-corpus", "--quota", "1,1,1,1", "--out", str(corpus),
    )
    assert code == EXIT_OK
    written = capsys.readouterr().out.strip().splitlines()
    assert len(written) == 4


def test_config_file_and_flag_precedence(tmp_path):
    config = tmp_path / "chipeval.toml"
    config.write_text("[run]\nmaster_seed = 42\ncycles = 77\n")
    cfg = RunConfig.load(str(config))
    assert cfg.master_seed == 42
    assert cfg.cycles == 77
    overridden = cfg.override(master_seed=7)
    assert overridden.master_seed == 7
    assert overridden.cycles == 77


def test_env_layer(tmp_path):
    config = tmp_path / "chipeval.toml"
    config.write_text("[run]\nmaster_seed = 42\n")
    cfg = RunConfig.load(str(config), env={"CHIPEVAL_MASTER_SEED": "9"})
    assert cfg.master_seed == 9


def test_config_round_trip(tmp_path):
    cfg = RunConfig.load(None).override(master_seed=13, cycles=256)
    text = cfg.to_toml()
    path = tmp_path / "c.toml"
    path.write_text(text)
    again = RunConfig.load(str(path))
    assert again.master_seed == 13
    assert again.cycles == 256
    assert again.llm.temperature == 0.85


def test_dataset_gen_mock(tmp_path, capsys):
    schedule = {"traffic_light": 1, "gray_code_counter": 2, "alu": None,
                "carry_lookahead_adder": 1, "up_down_counter": None,
                "min_of_three": None}
    sched_file = tmp_path / "sched.json"
    sched_file.write_text(json.dumps(schedule))
    code = run_cli(
        "--corpus", REPO, "--results-dir", str(tmp_path),
        "dataset-gen", "--max-iters", "2", "--mock", str(sched_file),
        "--run-id", "m",
    )
    assert code == EXIT_OK
    summary = json.loads(capsys.readouterr().out)
    assert summary["solved"] == 3
    assert summary["per_turn"] == {"1": 2, "2": 1}
    lines = (tmp_path / "dataset_m.jsonl").read_text().splitlines()
    assert len(lines) == 3


def test_help_exits_zero_and_documents_flags(capsys):
    with pytest.raises(SystemExit) as e:
        run_cli("eval", "--help")
    assert e.value.code == 0
    out = capsys.readouterr().out
    assert "--kinds" in out and "--solutions" in out
