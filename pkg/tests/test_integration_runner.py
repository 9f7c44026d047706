"""Primary engine driving the separate runner package over the step protocol.

These tests exercise the child-process External Interface end to end and skip
when the runner package is not checked out: the primary suite must stand on
scripted endpoints alone.
"""

import sys

import pytest

from chipeval.cosim import ChildProcessEndpoint, Limits, run_differential
from chipeval.stimulus import StimulusPlan, generate_stimuli
from chipeval.suite import golden_endpoint, load_corpus

from conftest import REPO_ROOT

RUNNER_DIR = REPO_ROOT / "ref_runner"

pytestmark = pytest.mark.skipif(
    not RUNNER_DIR.is_dir(), reason="secondary runner package absent"
)


def runner_endpoint(model_path):
    return ChildProcessEndpoint(
        [sys.executable, "-m", "ref_runner", str(model_path)],
        working_dir=str(RUNNER_DIR / "src"),
    )


def test_gray_model_served_by_runner_matches_golden():
    corpus = load_corpus(REPO_ROOT)
    case = next(c for c in corpus.cases if c.case_id == "gray_code_counter")
    plan = StimulusPlan(seed=31, total_cycles=128, reset_cycles=20)
    stimuli, mask = generate_stimuli(case.iface, plan)
    verdict = run_differential(
        golden_endpoint(case),
        runner_endpoint(RUNNER_DIR / "models" / "gray_code.py"),
        case.iface,
        stimuli,
        mask,
        Limits(max_divergences=3),
    )
    assert verdict.passed, verdict.to_dict()
    assert verdict.comparisons_made == 108


def test_runner_load_failure_maps_to_syntax_error(tmp_path):
    corpus = load_corpus(REPO_ROOT)
    case = next(c for c in corpus.cases if c.case_id == "gray_code_counter")
    broken = tmp_path / "broken.py"
    broken.write_text("def step(:\n")
    plan = StimulusPlan(seed=1, total_cycles=32, reset_cycles=4)
    stimuli, mask = generate_stimuli(case.iface, plan)
    verdict = run_differential(
        golden_endpoint(case),
        runner_endpoint(broken),
        case.iface,
        stimuli,
        mask,
    )
    assert verdict.kind.value == "syntax_error"
