#!/usr/bin/env python3
"""Run the full self-check evaluation over the shipped sample corpus.

Golden artifacts stand in as their own candidates, so every verdict should be
Pass and the report should read 100.00 across the board; any other outcome
means a regression in the parsing/stimulus/cosim stack.

    python3 scripts/run_sample_eval.py [--samples N] [--cycles N] [--seed N]
"""

import argparse
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from chipeval.scoring import render_text_table
from chipeval.suite import (
    KIND_REF_PYTHON,
    KIND_VERILOG_GEN,
    EvalConfig,
    GoldenSelfCheckProvider,
    load_corpus,
    run_evaluation,
    write_results,
)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--samples", type=int, default=10)
    parser.add_argument("--cycles", type=int, default=1024)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default="results")
    args = parser.parse_args()

    repo = pathlib.Path(__file__).resolve().parent.parent
    corpus = load_corpus(repo)
    print(f"loaded {len(corpus.cases)} cases, {len(corpus.rejects)} rejects")
    cfg = EvalConfig(
        master_seed=args.seed,
        n_samples=args.samples,
        total_cycles=args.cycles,
        reset_cycles=20,
        workers=4,
        ks=tuple(k for k in (1, 5, 10) if k <= args.samples),
    )
    records, report = run_evaluation(
        corpus.cases, [KIND_VERILOG_GEN, KIND_REF_PYTHON],
        GoldenSelfCheckProvider(), cfg,
    )
    path = write_results(records, report, repo / args.out, "sample_self_check")
    for tag, kind_report in report["kinds"].items():
        print(f"== {tag} ==")
        print(render_text_table(kind_report), end="")
    failures = [r for r in records if r.verdict != "pass"]
    print(f"\n{len(records)} records -> {path}")
    if failures:
        print(f"{len(failures)} non-pass verdicts (unexpected for self-check):")
        for r in failures[:10]:
            print(f"  {r.case_id}/{r.kind}#{r.sample}: {r.verdict} {r.detail}")
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
