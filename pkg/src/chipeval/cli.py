"""Command-line entry point tying the toolbox together.

Exit codes: 0 success, 1 verification failure, 2 usage/config error,
3 infrastructure error. Every subcommand honors --seed; configuration
precedence is built-in defaults < config file < environment < flags.
"""

from __future__ import annotations

import argparse
import json
import pathlib
import shlex
import sys
import time

from . import harness, mutation, scoring, suite
from .config import RunConfig
from .cosim import ChildProcessEndpoint, DifferentialRun, Limits, VerdictKind
from .errors import (
    ChipEvalError,
    ClientError,
    EmptyCorpus,
    MissingArtifacts,
    ParseError,
    QuotaUnreachable,
)
from .interface import parse_module_interface
from .llm import HttpChatClient, MockChatClient, run_dataset_generation, scripted_verifier
from .stimulus import StimulusPlan, derive_seed, export_hex, generate_stimuli

EXIT_OK = 0
EXIT_VERIFICATION = 1
EXIT_USAGE = 2
EXIT_INFRA = 3


def _say(message: str) -> None:
    print(message, file=sys.stderr)


def _load_case(cfg: RunConfig, case_id: str) -> suite.BenchCase:
    report = suite.load_corpus(cfg.corpus)
    for case in report.cases:
        if case.case_id == case_id:
            return case
    raise MissingArtifacts(
        f"case {case_id!r} not found under {cfg.corpus} "
        f"(known: {sorted(c.case_id for c in report.cases)})"
    )


def _plan(cfg: RunConfig, seed: int | None = None) -> StimulusPlan:
    return StimulusPlan(
        seed=cfg.master_seed if seed is None else seed,
        total_cycles=cfg.cycles,
        reset_cycles=cfg.reset_cycles,
    )


def _eval_cfg(cfg: RunConfig, n_samples: int | None = None,
              ks: tuple[int, ...] | None = None) -> suite.EvalConfig:
    n = cfg.n_samples if n_samples is None else n_samples
    if ks is None:
        ks = tuple(k for k in (1, 5, 10) if k <= n)
    return suite.EvalConfig(
        master_seed=cfg.master_seed,
        n_samples=n,
        total_cycles=cfg.cycles,
        reset_cycles=cfg.reset_cycles,
        max_divergences=cfg.max_divergences,
        workers=cfg.workers,
        ks=ks,
        use_simulators=cfg.use_simulators,
    )


# --- subcommand handlers -----------------------------------------------------------


def cmd_iface(cfg: RunConfig, args) -> int:
    source = pathlib.Path(args.file).read_text()
    iface = parse_module_interface(source, top=args.top)
    if args.format == "json":
        print(iface.to_json())
    else:
        print(iface.summary())
    return EXIT_OK


def _write_interface_file(case, out_dir: pathlib.Path) -> None:
    (out_dir / "interface.json").write_text(case.iface.to_json() + "\n")


def cmd_gen_tb(cfg: RunConfig, args) -> int:
    case = _load_case(cfg, args.case)
    plan = _plan(cfg)
    text = harness.emit_sv_testbench(case.iface, plan)
    stimuli, _ = generate_stimuli(case.iface, plan)
    out_dir = pathlib.Path(args.out) if args.out else case.path
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "test.sv").write_text(text)
    (out_dir / harness.STIMULUS_FILE).write_text(export_hex(case.iface, stimuli))
    _write_interface_file(case, out_dir)
    _say(f"wrote {out_dir / 'test.sv'} and {out_dir / harness.STIMULUS_FILE}")
    return EXIT_OK


def cmd_gen_harness(cfg: RunConfig, args) -> int:
    case = _load_case(cfg, args.case)
    out_dir = pathlib.Path(args.out) if args.out else case.path
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "test.cpp").write_text(harness.emit_cxx_harness(case.iface))
    _write_interface_file(case, out_dir)
    _say(f"wrote {out_dir / 'test.cpp'}")
    return EXIT_OK


_STUB_KINDS = {
    "python": (harness.HarnessTemplateKind.REF_STUB_PYTHON, "ref_stub.py"),
    "systemc": (harness.HarnessTemplateKind.REF_STUB_SYSTEMC, "ref_stub_systemc.cpp"),
    "cxxrtl": (harness.HarnessTemplateKind.REF_STUB_CXXRTL, "ref_stub_cxxrtl.cpp"),
}


def cmd_gen_stub(cfg: RunConfig, args) -> int:
    case = _load_case(cfg, args.case)
    kind, filename = _STUB_KINDS[args.flavor]
    out_dir = pathlib.Path(args.out) if args.out else case.path
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / filename).write_text(harness.emit_reference_stub(case.iface, kind))
    _say(f"wrote {out_dir / filename}")
    return EXIT_OK


def cmd_mutate(cfg: RunConfig, args) -> int:
    case = _load_case(cfg, args.case)
    category = mutation.BugCategory(args.category)
    source = case.golden_source
    sites = mutation.enumerate_sites(source, category)
    import random

    site = random.Random(derive_seed(cfg.master_seed, case.case_id,
                                     category.value)).choice(sites)
    bug = mutation.inject(source, site, rng_seed=cfg.master_seed)
    out_dir = pathlib.Path(args.out) if args.out else case.path / "mutants" / bug.case_id
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "buggy.sv").write_text(bug.mutated_source)
    (out_dir / "bug.json").write_text(
        json.dumps(bug.bug_json(case.case_id), indent=2, sort_keys=True) + "\n"
    )
    print(json.dumps(bug.bug_json(case.case_id), sort_keys=True))
    _say(f"wrote {out_dir}")
    return EXIT_OK


def cmd_synth_debug_corpus(cfg: RunConfig, args) -> int:
    report = suite.load_corpus(cfg.corpus)
    counts = [int(x) for x in args.quota.split(",")]
    if len(counts) != 4:
        raise MissingArtifacts("--quota must be 4 comma-separated counts "
                               "(arithmetic,assignment,timing,state_machine)")
    quota = dict(zip(mutation.BugCategory, counts))
    out_root = pathlib.Path(args.out) if args.out else pathlib.Path(cfg.corpus)
    written = suite.synthesize_debug_cases(
        report.cases, quota, cfg.master_seed, out_root,
        check_observability=not args.no_observability_check,
    )
    for path in written:
        print(path)
    _say(f"synthesized {len(written)} debug cases under {out_root}")
    return EXIT_OK


def cmd_cosim(cfg: RunConfig, args) -> int:
    case = _load_case(cfg, args.case)
    plan = _plan(cfg)
    stimuli, mask = generate_stimuli(case.iface, plan)
    candidate = ChildProcessEndpoint(shlex.split(args.candidate))
    run = DifferentialRun(
        suite.golden_endpoint(case),
        candidate,
        case.iface,
        stimuli,
        mask,
        Limits(max_divergences=cfg.max_divergences),
        seed=plan.seed,
    )
    verdict = run.execute()
    print(json.dumps(verdict.to_dict(), indent=2, sort_keys=True))
    if verdict.kind is VerdictKind.PASS:
        return EXIT_OK
    if verdict.kind in (VerdictKind.FAIL, VerdictKind.SYNTAX_ERROR):
        return EXIT_VERIFICATION
    return EXIT_INFRA


_ALL_KIND_TAGS = ("verilog_gen", "debug_zero", "debug_one", "ref_python",
                  "ref_systemc", "ref_cxxrtl")


def cmd_eval(cfg: RunConfig, args) -> int:
    report = suite.load_corpus(cfg.corpus)
    for rel, reason in report.rejects:
        _say(f"reject {rel}: {reason}")
    kinds = [suite.CaseKind.from_tag(t.strip()) for t in args.kinds.split(",")]
    if args.solutions:
        provider = suite.SolutionsProvider(args.solutions)
    elif args.llm:
        provider = suite.LlmProvider(HttpChatClient(cfg.llm), cfg.llm)
    else:
        provider = suite.GoldenSelfCheckProvider()
    eval_cfg = _eval_cfg(cfg, n_samples=args.samples)
    records, score_report = suite.run_evaluation(
        report.cases, kinds, provider, eval_cfg
    )
    run_id = args.run_id or time.strftime("%Y%m%d_%H%M%S")
    path = suite.write_results(records, score_report, cfg.results_dir, run_id)
    for tag, kind_report in score_report["kinds"].items():
        print(f"== {tag} ==")
        print(scoring.render_text_table(kind_report), end="")
    _say(f"records: {path}")
    return EXIT_OK


def cmd_dataset_gen(cfg: RunConfig, args) -> int:
    report = suite.load_corpus(cfg.corpus)
    cases = [suite.gen_case_for(c) for c in report.cases
             if c.supports(suite.KIND_REF_PYTHON)]
    llm_cfg = cfg.llm
    if args.max_iters is not None:
        import dataclasses

        llm_cfg = dataclasses.replace(llm_cfg, max_iters=args.max_iters)
    if args.mock:
        schedule = json.loads(pathlib.Path(args.mock).read_text())
        client = MockChatClient(schedule)

        def verify_factory(case):
            return scripted_verifier
    else:
        client = HttpChatClient(llm_cfg)
        by_id = {c.case_id: c for c in report.cases}
        eval_cfg = _eval_cfg(cfg)

        def verify_factory(case):
            bench = by_id[case.case_id]
            seed = derive_seed(cfg.master_seed, case.case_id, "dataset_gen")
            return lambda code: suite.verify_candidate(
                bench, suite.KIND_REF_PYTHON, code, seed, eval_cfg
            )

    records, summary = run_dataset_generation(
        cases, client, llm_cfg, verify_factory, workers=cfg.workers
    )
    out_dir = pathlib.Path(cfg.results_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    run_id = args.run_id or time.strftime("%Y%m%d_%H%M%S")
    records_path = out_dir / f"dataset_{run_id}.jsonl"
    records_path.write_text("".join(r.to_json_line() + "\n" for r in records))
    summary_path = out_dir / f"dataset_{run_id}.summary.json"
    summary_path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    print(json.dumps(summary, indent=2, sort_keys=True))
    _say(f"records: {records_path}")
    return EXIT_OK


def cmd_score(cfg: RunConfig, args) -> int:
    lines = pathlib.Path(args.results).read_text().splitlines()
    if not lines:
        raise MissingArtifacts("empty results file")
    by_kind: dict[str, dict[str, list]] = {}
    categories: dict[str, str] = {}
    for line in lines:
        rec = json.loads(line)
        by_kind.setdefault(rec["kind"], {}).setdefault(rec["case_id"], []).append(
            rec["verdict"] == "pass"
        )
        categories[rec["case_id"]] = rec.get("category") or "all"
    report = {"kinds": {}}
    for tag, outcomes in sorted(by_kind.items()):
        case_outcomes = [
            scoring.CaseOutcome(cid, categories[cid], len(flags), sum(flags))
            for cid, flags in sorted(outcomes.items())
        ]
        n_min = min(o.n for o in case_outcomes)
        ks = tuple(k for k in (1, 5, 10) if k <= n_min)
        report["kinds"][tag] = scoring.score_outcomes(case_outcomes, ks=ks)
    if args.format == "json":
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        for tag, kind_report in report["kinds"].items():
            print(f"== {tag} ==")
            print(scoring.render_text_table(kind_report), end="")
    return EXIT_OK


def cmd_vcd(cfg: RunConfig, args) -> int:
    case = _load_case(cfg, args.case)
    if not case.is_debug:
        raise MissingArtifacts(
            f"{case.case_id} is not a debug case (no buggy.sv to trace)"
        )
    suite.ensure_wave(case)
    print(case.path / suite.WAVE_FILE)
    return EXIT_OK


# --- parser ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chipeval",
        description="Verification and evaluation toolbox for AI-aided chip design.",
    )
    parser.add_argument("--config", help="TOML config file (chipeval.toml)")
    parser.add_argument("--corpus", help="corpus root (contains cases/)")
    parser.add_argument("--seed", type=int, help="master seed")
    parser.add_argument("--cycles", type=int, help="stimulus cycles per run")
    parser.add_argument("--reset-cycles", type=int, help="reset prefix length")
    parser.add_argument("--workers", type=int, help="parallel workers")
    parser.add_argument("--results-dir", help="where result files go")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("iface", help="print a Verilog file's top interface")
    p.add_argument("file")
    p.add_argument("--top", help="explicit top module name")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(handler=cmd_iface)

    p = sub.add_parser("gen-tb", help="emit dual-instance test.sv + stimulus.hex")
    p.add_argument("case")
    p.add_argument("--out", help="output directory (default: case dir)")
    p.set_defaults(handler=cmd_gen_tb)

    p = sub.add_parser("gen-harness", help="emit step-protocol test.cpp")
    p.add_argument("case")
    p.add_argument("--out")
    p.set_defaults(handler=cmd_gen_harness)

    p = sub.add_parser("gen-stub", help="emit a reference-model skeleton")
    p.add_argument("case")
    p.add_argument("--flavor", choices=sorted(_STUB_KINDS), default="python")
    p.add_argument("--out")
    p.set_defaults(handler=cmd_gen_stub)

    p = sub.add_parser("mutate", help="inject one seeded bug into a case golden")
    p.add_argument("case")
    p.add_argument("--category", required=True,
                   choices=[c.value for c in mutation.BugCategory])
    p.add_argument("--out")
    p.set_defaults(handler=cmd_mutate)

    p = sub.add_parser("synth-debug-corpus",
                       help="sample a debugging corpus from the goldens")
    p.add_argument("--quota", required=True,
                   help="arithmetic,assignment,timing,state_machine counts")
    p.add_argument("--out", help="corpus root to write under (default: corpus)")
    p.add_argument("--no-observability-check", action="store_true",
                   help="keep mutants even if no stimulus distinguishes them")
    p.set_defaults(handler=cmd_synth_debug_corpus)

    p = sub.add_parser("cosim", help="differential run: golden vs candidate command")
    p.add_argument("case")
    p.add_argument("--candidate", required=True,
                   help="endpoint command speaking the step protocol")
    p.set_defaults(handler=cmd_cosim)

    p = sub.add_parser("eval", help="evaluate candidates over the corpus")
    p.add_argument("--kinds", default="verilog_gen",
                   help=f"comma list of {', '.join(_ALL_KIND_TAGS)}")
    p.add_argument("--solutions", help="directory of pre-supplied solutions")
    p.add_argument("--llm", action="store_true", help="query the configured endpoint")
    p.add_argument("--samples", type=int, help="samples per case (default config)")
    p.add_argument("--run-id", help="results file stem (default timestamp)")
    p.set_defaults(handler=cmd_eval)

    p = sub.add_parser("dataset-gen",
                       help="multi-turn reference-model dataset generation")
    p.add_argument("--max-iters", type=int)
    p.add_argument("--mock", help="JSON schedule file: case_id -> first pass turn")
    p.add_argument("--run-id")
    p.set_defaults(handler=cmd_dataset_gen)

    p = sub.add_parser("score", help="score a results .jsonl file")
    p.add_argument("results")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(handler=cmd_score)

    p = sub.add_parser("vcd", help="write the golden-vs-buggy wave.vcd of a debug case")
    p.add_argument("case")
    p.set_defaults(handler=cmd_vcd)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig.load(args.config)
        cfg = cfg.override(
            corpus=args.corpus,
            master_seed=args.seed,
            cycles=args.cycles,
            reset_cycles=args.reset_cycles,
            workers=args.workers,
            results_dir=args.results_dir,
        )
        return args.handler(cfg, args)
    except (EmptyCorpus, MissingArtifacts, ParseError, QuotaUnreachable,
            FileNotFoundError, ValueError) as e:
        _say(f"error: {e}")
        return EXIT_USAGE
    except (ClientError, OSError) as e:
        _say(f"infrastructure error: {e}")
        return EXIT_INFRA
    except ChipEvalError as e:
        _say(f"error: {e}")
        return EXIT_VERIFICATION


if __name__ == "__main__":
    sys.exit(main())
