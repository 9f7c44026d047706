"""Benchmark corpus management, prompt construction, and evaluation runs.

Corpus layout on disk:

    cases/<category>/<case_id>/
        prompt.txt      task description
        golden.sv       trusted implementation
        meta.json       {category, kinds, code_lines, circuit_cells}
        model.py        behavioral golden model (scripted-endpoint fallback)
        buggy.sv        debug cases only
        bug.json        debug cases only
        submodules/     non-self-contained cases: provided child modules
        test.sv         optional committed testbench

Verification at desk scale runs through scripted endpoints: the golden side
is the case's model.py (or the interpreted golden), the candidate side is the
interpreted Verilog or the exec'd Python model. When iverilog is installed
the Verilog kinds can instead compile the emitted dual testbench
(environment-gated; `use_simulators="auto"`).
"""

from __future__ import annotations

import json
import pathlib
import shutil
import subprocess
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

from . import harness, mutation, vcd
from .behavioral import VerilogEvaluator
from .cosim import (
    DifferentialRun,
    FactoryEndpoint,
    Limits,
    SimEndpoint,
    Verdict,
    VerdictKind,
    record_traces,
)
from .errors import ChipEvalError, EmptyCorpus, MissingArtifacts
from .interface import ModuleInterface, parse_module_interface
from .llm import GenCase, LlmConfig, extract_code_block
from .scoring import CaseOutcome, score_outcomes
from .stimulus import StimulusPlan, derive_seed, generate_stimuli

GEN_CATEGORIES = ("self_contained", "non_self_contained", "cpu_ip")
DEBUG_SENTENCE = (
    "The implementation below contains exactly one functional bug. "
    "Find it and reply with the fully corrected module."
)
PROTOCOL_SUMMARY = (
    "The model must define reset() and step(inputs) -> outputs. step is "
    "called once per clock cycle with every non-clock input as an integer "
    "and must return every output port; use None for an unknown value."
)
WAVE_FILE = "wave.vcd"
WAVE_BYTE_BUDGET = 32 * 1024
WAVE_CYCLES = 120


class TaskKind(Enum):
    VERILOG_GEN = "verilog_gen"
    VERILOG_DEBUG = "verilog_debug"
    REF_MODEL_GEN = "ref_model_gen"


class DebugMode(Enum):
    ZERO_SHOT = "zero"
    ONE_SHOT = "one"


class RefFlavor(Enum):
    PYTHON = "python"
    SYSTEMC = "systemc"
    CXXRTL = "cxxrtl"


@dataclass(frozen=True)
class CaseKind:
    task: TaskKind
    mode: DebugMode | None = None
    flavor: RefFlavor | None = None

    @property
    def tag(self) -> str:
        if self.task is TaskKind.VERILOG_DEBUG:
            return f"debug_{self.mode.value}"
        if self.task is TaskKind.REF_MODEL_GEN:
            return f"ref_{self.flavor.value}"
        return "verilog_gen"

    @classmethod
    def from_tag(cls, tag: str) -> "CaseKind":
        if tag == "verilog_gen":
            return cls(TaskKind.VERILOG_GEN)
        if tag.startswith("debug_"):
            return cls(TaskKind.VERILOG_DEBUG, mode=DebugMode(tag[len("debug_"):]))
        if tag.startswith("ref_"):
            return cls(TaskKind.REF_MODEL_GEN, flavor=RefFlavor(tag[len("ref_"):]))
        raise ValueError(f"unknown kind tag {tag!r}")


KIND_VERILOG_GEN = CaseKind(TaskKind.VERILOG_GEN)
KIND_DEBUG_ZERO = CaseKind(TaskKind.VERILOG_DEBUG, mode=DebugMode.ZERO_SHOT)
KIND_DEBUG_ONE = CaseKind(TaskKind.VERILOG_DEBUG, mode=DebugMode.ONE_SHOT)
KIND_REF_PYTHON = CaseKind(TaskKind.REF_MODEL_GEN, flavor=RefFlavor.PYTHON)


@dataclass
class BenchCase:
    case_id: str
    category: str
    path: pathlib.Path
    iface: ModuleInterface
    meta: dict

    @property
    def golden_source(self) -> str:
        return (self.path / "golden.sv").read_text()

    @property
    def prompt_text(self) -> str:
        return (self.path / "prompt.txt").read_text()

    @property
    def model_path(self) -> pathlib.Path | None:
        p = self.path / "model.py"
        return p if p.exists() else None

    @property
    def is_debug(self) -> bool:
        return "verilog_debug" in self.meta.get("kinds", ())

    def submodules(self) -> dict[str, str]:
        subs = {}
        subdir = self.path / "submodules"
        if subdir.is_dir():
            for sv in sorted(subdir.glob("*.sv")):
                text = sv.read_text()
                subs[parse_module_interface(text).module_name] = text
        return subs

    def supports(self, kind: CaseKind) -> bool:
        kinds = self.meta.get("kinds", [])
        if kind.task is TaskKind.VERILOG_GEN:
            return "verilog_gen" in kinds
        if kind.task is TaskKind.VERILOG_DEBUG:
            return "verilog_debug" in kinds
        return "ref_model_gen" in kinds


@dataclass
class CorpusReport:
    cases: list[BenchCase]
    rejects: list[tuple[str, str]]  # (case dir, reason)


def load_corpus(root: str | pathlib.Path) -> CorpusReport:
    """Scan cases/<category>/<id>/, validating the per-kind required files."""
    root = pathlib.Path(root)
    base = root / "cases" if (root / "cases").is_dir() else root
    if not base.is_dir():
        raise EmptyCorpus(f"no corpus at {root}")
    cases: list[BenchCase] = []
    rejects: list[tuple[str, str]] = []
    for case_dir in sorted(base.glob("*/*/")):
        rel = str(case_dir.relative_to(base))
        missing = [
            name
            for name in ("prompt.txt", "golden.sv", "meta.json")
            if not (case_dir / name).exists()
        ]
        if missing:
            rejects.append((rel, f"MissingFile: {', '.join(missing)}"))
            continue
        try:
            meta = json.loads((case_dir / "meta.json").read_text())
        except json.JSONDecodeError as e:
            rejects.append((rel, f"BadMeta: {e}"))
            continue
        if "verilog_debug" in meta.get("kinds", ()):
            missing = [
                name for name in ("buggy.sv", "bug.json")
                if not (case_dir / name).exists()
            ]
            if missing:
                rejects.append((rel, f"MissingFile: {', '.join(missing)}"))
                continue
        try:
            iface = parse_module_interface((case_dir / "golden.sv").read_text())
        except ChipEvalError as e:
            rejects.append((rel, f"ParseError: {e}"))
            continue
        cases.append(
            BenchCase(
                case_id=case_dir.name,
                category=meta.get("category", case_dir.parent.name),
                path=case_dir,
                iface=iface,
                meta=meta,
            )
        )
    if not cases and not rejects:
        raise EmptyCorpus(f"no cases under {base}")
    return CorpusReport(cases=cases, rejects=rejects)


# --- model/endpoint plumbing ---------------------------------------------------------


def load_model_from_code(code: str, origin: str = "<generated>"):
    """Exec a reference-model file and return an object with reset()/step().

    Accepts a RefModel class or module-level reset/step functions (the
    documented model contract). Runs in-process: only use on code you are
    willing to execute (CI containers for untrusted generations).
    """
    namespace: dict = {}
    exec(compile(code, origin, "exec"), namespace)
    if "RefModel" in namespace:
        return namespace["RefModel"]()
    if callable(namespace.get("reset")) and callable(namespace.get("step")):
        class _FnModel:
            def reset(self):
                namespace["reset"]()

            def step(self, inputs):
                return namespace["step"](inputs)

        return _FnModel()
    raise MissingArtifacts(
        f"{origin}: model must define class RefModel or reset()/step() functions"
    )


def golden_endpoint(case: BenchCase) -> SimEndpoint:
    """Trusted side: the case's behavioral model, else the interpreted golden."""
    model_path = case.model_path
    if model_path is not None:
        code = model_path.read_text()
        return FactoryEndpoint(
            lambda: load_model_from_code(code, str(model_path)), name="golden-model"
        )
    subs = case.submodules()
    source = case.golden_source
    return FactoryEndpoint(
        lambda: VerilogEvaluator(source, submodules=subs or None,
                                 top=case.iface.module_name),
        name="golden-interp",
    )


def verilog_endpoint(case: BenchCase, source: str, name: str) -> SimEndpoint:
    subs = case.submodules()
    return FactoryEndpoint(
        lambda: VerilogEvaluator(source, submodules=subs or None,
                                 top=case.iface.module_name),
        name=name,
    )


def python_endpoint(code: str, name: str) -> SimEndpoint:
    return FactoryEndpoint(lambda: load_model_from_code(code), name=name)


# --- prompt construction ----------------------------------------------------------------


def _submodule_sections(case: BenchCase) -> str:
    sections = []
    subdir = case.path / "submodules"
    for sv in sorted(subdir.glob("*.sv")):
        desc = sv.with_suffix(".txt")
        sections.append(f"### Sub-module {sv.stem}")
        if desc.exists():
            sections.append(desc.read_text().rstrip())
        sections.append("```verilog\n" + sv.read_text().rstrip() + "\n```")
    return "\n\n".join(sections)


def ensure_wave(case: BenchCase) -> str:
    """Golden-vs-buggy waveform for one-shot debug prompts, cached on disk."""
    wave_path = case.path / WAVE_FILE
    if wave_path.exists():
        return wave_path.read_text()
    buggy = (case.path / "buggy.sv").read_text()
    plan = StimulusPlan(
        seed=derive_seed(1, case.case_id, "wave"),
        total_cycles=WAVE_CYCLES,
        reset_cycles=20,
    )
    stimuli, mask = generate_stimuli(case.iface, plan)
    run = DifferentialRun(
        golden_endpoint(case),
        verilog_endpoint(case, buggy, "buggy"),
        case.iface,
        stimuli,
        mask,
        Limits(max_divergences=10**9),
        capture_traces=True,
    )
    verdict = run.execute()
    if verdict.kind in (VerdictKind.SYNTAX_ERROR, VerdictKind.RUNTIME_ERROR,
                        VerdictKind.TIMEOUT):
        raise MissingArtifacts(
            f"{case.case_id}: waveform generation failed: {verdict.detail}"
        )
    golden_traces, buggy_traces, input_traces = record_traces(run)
    traces = []
    for port in case.iface.driven_inputs():
        traces.append(vcd.SignalTrace(
            port.name, port.width, tuple(input_traces[port.name])
        ))
    for port in case.iface.outputs():
        traces.append(vcd.SignalTrace(
            f"golden.{port.name}", port.width, tuple(golden_traces[port.name])
        ))
        traces.append(vcd.SignalTrace(
            f"buggy.{port.name}", port.width, tuple(buggy_traces[port.name])
        ))
    doc = vcd.VcdDocument(scope=case.iface.module_name, traces=tuple(traces))
    text = vcd.write_vcd(doc)
    wave_path.write_text(text)
    return text


def build_prompt(case: BenchCase, kind: CaseKind) -> str:
    """Task prompt for one case/kind; depends only on the case directory."""
    if not case.supports(kind):
        raise MissingArtifacts(f"{case.case_id} does not support {kind.tag}")
    if kind.task is TaskKind.VERILOG_GEN:
        prompt = case.prompt_text.rstrip() + "\n"
        if (case.path / "submodules").is_dir():
            prompt += (
                "\n## Provided sub-modules\n"
                "Instantiate these as provided; do not reimplement them.\n\n"
                + _submodule_sections(case)
                + "\n"
            )
        return prompt
    if kind.task is TaskKind.VERILOG_DEBUG:
        buggy_path = case.path / "buggy.sv"
        if not buggy_path.exists():
            raise MissingArtifacts(f"{case.case_id}: no buggy.sv")
        prompt = (
            case.prompt_text.rstrip()
            + "\n\n"
            + DEBUG_SENTENCE
            + "\n\n```verilog\n"
            + buggy_path.read_text().rstrip()
            + "\n```\n"
        )
        if kind.mode is DebugMode.ONE_SHOT:
            wave = vcd.truncate_head(ensure_wave(case), WAVE_BYTE_BUDGET)
            prompt += (
                "\n## Simulation waveform (golden vs buggy)\n"
                "```vcd\n" + wave.rstrip() + "\n```\n"
            )
        return prompt
    # reference model generation
    stub_kind = {
        RefFlavor.PYTHON: harness.HarnessTemplateKind.REF_STUB_PYTHON,
        RefFlavor.SYSTEMC: harness.HarnessTemplateKind.REF_STUB_SYSTEMC,
        RefFlavor.CXXRTL: harness.HarnessTemplateKind.REF_STUB_CXXRTL,
    }[kind.flavor]
    return (
        case.prompt_text.rstrip()
        + "\n\n## Golden implementation\n```verilog\n"
        + case.golden_source.rstrip()
        + "\n```\n\n## Model skeleton\n```"
        + kind.flavor.value
        + "\n"
        + harness.emit_reference_stub(case.iface, stub_kind).rstrip()
        + "\n```\n\n## Contract\n"
        + PROTOCOL_SUMMARY
        + "\n"
    )


def gen_case_for(case: BenchCase, flavor: str = "python") -> GenCase:
    return GenCase(
        case_id=case.case_id,
        prompt_text=case.prompt_text,
        golden_source=case.golden_source,
        interface_summary=case.iface.summary(),
        flavor=flavor,
    )


# --- evaluation -------------------------------------------------------------------------


@dataclass(frozen=True)
class EvalConfig:
    master_seed: int = 0
    n_samples: int = 10
    total_cycles: int = 1024
    reset_cycles: int = 20
    max_divergences: int = 10
    workers: int = 4
    ks: tuple[int, ...] = (1, 5, 10)
    use_simulators: str = "never"  # "never" | "auto"


@dataclass(frozen=True)
class EvalRecord:
    case_id: str
    kind: str
    sample: int
    seed: int
    verdict: str
    detail: str
    divergences: int
    cycles_run: int
    comparisons: int
    category: str = ""
    tokens_in: int = 0
    tokens_out: int = 0
    wall_time_s: float = 0.0

    def to_json_line(self) -> str:
        # wall time varies run to run; it lives in the timing sidecar so the
        # primary results file is byte-reproducible for equal seeds
        payload = {
            "case_id": self.case_id,
            "category": self.category,
            "kind": self.kind,
            "sample": self.sample,
            "seed": self.seed,
            "verdict": self.verdict,
            "detail": self.detail,
            "divergences": self.divergences,
            "cycles_run": self.cycles_run,
            "comparisons": self.comparisons,
            "tokens_in": self.tokens_in,
            "tokens_out": self.tokens_out,
        }
        return json.dumps(payload, sort_keys=True)


class SolutionsProvider:
    """Pre-supplied candidates: solutions/<case_id>/[<kind>/]sample_<i>.<ext>.

    Falls back from the kind-specific directory to the case directory to a
    single shared file, so fixture corpora stay small.
    """

    def __init__(self, root: str | pathlib.Path):
        self.root = pathlib.Path(root)

    def get_candidate(self, case: BenchCase, kind: CaseKind, sample: int,
                      seed: int) -> tuple[str, int, int]:
        ext = ".py" if kind.task is TaskKind.REF_MODEL_GEN else ".sv"
        candidates = [
            self.root / case.case_id / kind.tag / f"sample_{sample}{ext}",
            self.root / case.case_id / f"sample_{sample}{ext}",
            self.root / (case.case_id + ext),
        ]
        for path in candidates:
            if path.exists():
                return path.read_text(), 0, 0
        raise MissingArtifacts(
            f"no solution for {case.case_id}/{kind.tag} sample {sample}"
        )


class GoldenSelfCheckProvider:
    """Candidate := the golden artifact itself; every verdict should be Pass."""

    def get_candidate(self, case: BenchCase, kind: CaseKind, sample: int,
                      seed: int) -> tuple[str, int, int]:
        if kind.task is TaskKind.REF_MODEL_GEN:
            model_path = case.model_path
            if model_path is None:
                raise MissingArtifacts(f"{case.case_id}: no model.py for self-check")
            return model_path.read_text(), 0, 0
        return case.golden_source, 0, 0


class LlmProvider:
    """One single-shot completion per sample."""

    def __init__(self, client, llm_cfg: LlmConfig):
        self.client = client
        self.llm_cfg = llm_cfg

    def get_candidate(self, case: BenchCase, kind: CaseKind, sample: int,
                      seed: int) -> tuple[str, int, int]:
        flavor = kind.flavor.value if kind.flavor else "verilog"
        prompt = build_prompt(case, kind)
        response = self.client.complete(
            f"{case.case_id}:{kind.tag}:{sample}",
            [{"role": "user", "content": prompt}],
            self.llm_cfg,
        )
        code = extract_code_block(response.text, flavor)
        if code is None:
            raise MissingArtifacts("response contained no code block")
        return code, response.tokens_in, response.tokens_out


def simulators_available() -> bool:
    return shutil.which("iverilog") is not None and shutil.which("vvp") is not None


def parse_tb_output(text: str) -> tuple[bool, int]:
    """RESULT line of the emitted dual testbench -> (passed, mismatches)."""
    for line in reversed(text.splitlines()):
        if line.startswith("RESULT "):
            parts = line.split()
            passed = parts[1] == "PASS"
            count = int(parts[2].partition("=")[2])
            return passed, count
    raise MissingArtifacts("testbench output has no RESULT line")


def _verify_with_iverilog(case: BenchCase, candidate_source: str,
                          plan: StimulusPlan, stimuli) -> Verdict:
    """Environment-gated path: compile the dual TB with iverilog and run it."""
    from .stimulus import export_hex

    tb_text = harness.emit_sv_testbench(case.iface, plan)
    renamed = harness.rename_module(candidate_source, case.iface.module_name)
    with tempfile.TemporaryDirectory(prefix="chipeval_tb_") as tmp:
        tmpdir = pathlib.Path(tmp)
        (tmpdir / "tb.sv").write_text(tb_text)
        (tmpdir / "golden.sv").write_text(case.golden_source)
        (tmpdir / "candidate.sv").write_text(renamed)
        sources = ["tb.sv", "golden.sv", "candidate.sv"]
        for name, text in case.submodules().items():
            (tmpdir / f"sub_{name}.sv").write_text(text)
            sources.append(f"sub_{name}.sv")
        (tmpdir / harness.STIMULUS_FILE).write_text(export_hex(case.iface, stimuli))
        compile_cmd = ["iverilog", "-g2012", "-o", "sim.out", *sources]
        comp = subprocess.run(compile_cmd, cwd=tmp, capture_output=True,
                              text=True, timeout=60)
        if comp.returncode != 0:
            return Verdict(VerdictKind.SYNTAX_ERROR, detail=comp.stderr[-2000:])
        run = subprocess.run(["vvp", "sim.out"], cwd=tmp, capture_output=True,
                             text=True, timeout=300)
        if run.returncode != 0:
            return Verdict(VerdictKind.RUNTIME_ERROR, detail=run.stderr[-2000:])
        passed, count = parse_tb_output(run.stdout)
        if passed:
            return Verdict(VerdictKind.PASS, cycles_run=plan.total_cycles)
        return Verdict(
            VerdictKind.FAIL,
            detail=f"{count} mismatches (testbench route)",
            cycles_run=plan.total_cycles,
        )


def verify_candidate(case: BenchCase, kind: CaseKind, candidate: str,
                     seed: int, cfg: EvalConfig) -> Verdict:
    """Differential verification of one candidate text for one case/kind."""
    plan = StimulusPlan(
        seed=seed, total_cycles=cfg.total_cycles, reset_cycles=cfg.reset_cycles
    )
    stimuli, mask = generate_stimuli(case.iface, plan)
    if kind.task in (TaskKind.VERILOG_GEN, TaskKind.VERILOG_DEBUG):
        if cfg.use_simulators == "auto" and simulators_available():
            return _verify_with_iverilog(case, candidate, plan, stimuli)
        candidate_ep = verilog_endpoint(case, candidate, "candidate")
    else:
        if kind.flavor is not RefFlavor.PYTHON:
            return Verdict(
                VerdictKind.RUNTIME_ERROR,
                detail=f"no desk-scale execution path for flavor {kind.flavor.value}",
            )
        candidate_ep = python_endpoint(candidate, "candidate")
    run = DifferentialRun(
        golden_endpoint(case),
        candidate_ep,
        case.iface,
        stimuli,
        mask,
        Limits(max_divergences=cfg.max_divergences),
        seed=seed,
    )
    return run.execute()


def run_evaluation(
    cases: list[BenchCase],
    kinds: list[CaseKind],
    provider,
    cfg: EvalConfig,
) -> tuple[list[EvalRecord], dict]:
    """n samples per case and kind; per-sample failures never sink the batch."""
    jobs = [
        (case, kind, sample)
        for case in cases
        for kind in kinds
        if case.supports(kind)
        for sample in range(cfg.n_samples)
    ]
    if not jobs:
        raise EmptyCorpus("no (case, kind) pairs to evaluate")

    def run_job(job):
        case, kind, sample = job
        seed = derive_seed(cfg.master_seed, case.case_id, kind.tag, sample)
        started = time.monotonic()
        tokens_in = tokens_out = 0
        try:
            candidate, tokens_in, tokens_out = provider.get_candidate(
                case, kind, sample, seed
            )
            verdict = verify_candidate(case, kind, candidate, seed, cfg)
        except Exception as e:
            verdict = Verdict(
                VerdictKind.RUNTIME_ERROR, detail=f"{type(e).__name__}: {e}"
            )
        return EvalRecord(
            case_id=case.case_id,
            kind=kind.tag,
            sample=sample,
            seed=seed,
            verdict=verdict.kind.value,
            detail=verdict.detail,
            divergences=len(verdict.divergences),
            cycles_run=verdict.cycles_run,
            comparisons=verdict.comparisons_made,
            category=case.category,
            tokens_in=tokens_in,
            tokens_out=tokens_out,
            wall_time_s=time.monotonic() - started,
        )

    with ThreadPoolExecutor(max_workers=max(1, cfg.workers)) as pool:
        records = list(pool.map(run_job, jobs))
    records.sort(key=lambda r: (r.case_id, r.kind, r.sample))

    categories = {case.case_id: case.category for case in cases}
    report: dict = {"kinds": {}}
    for kind in kinds:
        kind_records = [r for r in records if r.kind == kind.tag]
        if not kind_records:
            continue
        outcomes = {}
        for r in kind_records:
            key = r.case_id
            n, c = outcomes.get(key, (0, 0))
            outcomes[key] = (n + 1, c + (1 if r.verdict == "pass" else 0))
        ks = tuple(k for k in cfg.ks if k <= cfg.n_samples) or (1,)
        report["kinds"][kind.tag] = score_outcomes(
            [
                CaseOutcome(case_id, categories[case_id], n, c)
                for case_id, (n, c) in sorted(outcomes.items())
            ],
            ks=ks,
        )
    return records, report


def write_results(
    records: list[EvalRecord],
    report: dict,
    results_dir: str | pathlib.Path,
    run_id: str,
) -> pathlib.Path:
    """results/<run_id>.jsonl (deterministic), .timing.jsonl, .report files."""
    results_dir = pathlib.Path(results_dir)
    results_dir.mkdir(parents=True, exist_ok=True)
    jsonl = results_dir / f"{run_id}.jsonl"
    jsonl.write_text(
        "".join(r.to_json_line() + "\n" for r in records)
    )
    timing = results_dir / f"{run_id}.timing.jsonl"
    timing.write_text(
        "".join(
            json.dumps(
                {"case_id": r.case_id, "kind": r.kind, "sample": r.sample,
                 "wall_time_s": round(r.wall_time_s, 6)},
                sort_keys=True,
            ) + "\n"
            for r in records
        )
    )
    report_path = results_dir / f"{run_id}.report"
    from .scoring import render_text_table

    sections = []
    for tag, kind_report in report["kinds"].items():
        sections.append(f"== {tag} ==\n{render_text_table(kind_report)}")
    report_path.write_text(
        "\n".join(sections) + "\njson:\n" + json.dumps(report, indent=2, sort_keys=True) + "\n"
    )
    return jsonl


# --- debug corpus synthesis on disk ---------------------------------------------------


def observability_filter(cases_by_id: dict[str, BenchCase],
                         cycles: int = 256) -> callable:
    """Differential golden-vs-mutant check; equivalent mutants come back False."""

    def observable(case_id: str, bug: mutation.BugCase) -> bool:
        case = cases_by_id[case_id]
        plan = StimulusPlan(
            seed=derive_seed(2, case_id, bug.case_id),
            total_cycles=cycles,
            reset_cycles=20,
        )
        stimuli, mask = generate_stimuli(case.iface, plan)
        verdict = DifferentialRun(
            golden_endpoint(case),
            verilog_endpoint(case, bug.mutated_source, "mutant"),
            case.iface,
            stimuli,
            mask,
            Limits(max_divergences=1),
        ).execute()
        return verdict.kind is VerdictKind.FAIL

    return observable


def synthesize_debug_cases(
    corpus: list[BenchCase],
    quota: dict[mutation.BugCategory, int],
    seed: int,
    out_root: str | pathlib.Path,
    check_observability: bool = True,
) -> list[pathlib.Path]:
    """Generate bug cases from corpus goldens and write them in suite layout."""
    sources = [(case.case_id, case.golden_source) for case in corpus
               if not case.is_debug]
    by_id = {case.case_id: case for case in corpus}
    observable = observability_filter(by_id) if check_observability else None
    chosen = mutation.synthesize_debug_corpus(sources, quota, seed, observable)
    out_base = pathlib.Path(out_root)
    written = []
    for source_case_id, bug in chosen:
        case = by_id[source_case_id]
        case_dir = out_base / "cases" / bug.category.value / bug.case_id
        case_dir.mkdir(parents=True, exist_ok=True)
        (case_dir / "golden.sv").write_text(case.golden_source)
        (case_dir / "buggy.sv").write_text(bug.mutated_source)
        (case_dir / "bug.json").write_text(
            json.dumps(bug.bug_json(source_case_id), indent=2, sort_keys=True) + "\n"
        )
        (case_dir / "prompt.txt").write_text(case.prompt_text)
        meta = {
            "category": bug.category.value,
            "kinds": ["verilog_debug"],
            "code_lines": case.meta.get("code_lines", 0),
            "circuit_cells": case.meta.get("circuit_cells", 0),
            "source_case": source_case_id,
        }
        (case_dir / "meta.json").write_text(
            json.dumps(meta, indent=2, sort_keys=True) + "\n"
        )
        if case.model_path is not None:
            shutil.copyfile(case.model_path, case_dir / "model.py")
        subdir = case.path / "submodules"
        if subdir.is_dir():
            shutil.copytree(subdir, case_dir / "submodules", dirs_exist_ok=True)
        written.append(case_dir)
    return written
