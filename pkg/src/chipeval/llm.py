"""Multi-turn generate-and-repair pipeline with token/cost accounting.

A chat-completions-style endpoint produces a reference model; every failing
turn feeds the verdict kind, up to the engine's divergence cap, and the
model's own last code back for self-correction, until the differential check
passes or the iteration budget runs out. All desk-scale tests run against the
in-repo scripted mock; live endpoints are opt-in via configuration.
"""

from __future__ import annotations

import json
import os
import re
import threading
import time
from dataclasses import dataclass, field
from concurrent.futures import ThreadPoolExecutor

from .cosim import DivergenceReport, Verdict, VerdictKind
from .errors import ClientError

API_KEY_ENV = "CHIPEVAL_API_KEY"
CHARS_PER_TOKEN_ESTIMATE = 4


@dataclass(frozen=True)
class LlmConfig:
    base_url: str = ""
    model: str = ""
    temperature: float = 0.85
    top_p: float = 0.95
    max_iters: int = 5
    price_in: float = 0.0   # $ per million input tokens
    price_out: float = 0.0  # $ per million output tokens

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")


@dataclass(frozen=True)
class ChatResponse:
    text: str
    tokens_in: int
    tokens_out: int
    estimated: bool = False  # usage metadata missing, counts are chars/4


@dataclass(frozen=True)
class GenAttempt:
    turn: int
    raw_response: str
    extracted_code: str | None
    verdict: Verdict
    tokens_in: int
    tokens_out: int


@dataclass(frozen=True)
class DatasetRecord:
    case_id: str
    prompt: str
    golden_source: str
    reference_model: str
    turns_used: int
    total_cost: float

    def to_json_line(self) -> str:
        return json.dumps(
            {
                "case_id": self.case_id,
                "prompt": self.prompt,
                "golden_source": self.golden_source,
                "reference_model": self.reference_model,
                "turns_used": self.turns_used,
                "total_cost": round(self.total_cost, 8),
            },
            sort_keys=True,
        )


@dataclass(frozen=True)
class GenCase:
    case_id: str
    prompt_text: str
    golden_source: str
    interface_summary: str
    flavor: str = "python"


@dataclass
class GenerationResult:
    solved: bool
    record: DatasetRecord | None
    attempts: list[GenAttempt] = field(default_factory=list)


def estimate_cost(tokens_in: int, tokens_out: int, cfg: LlmConfig) -> float:
    """Dollars at per-million-token prices."""
    return tokens_in * cfg.price_in / 1e6 + tokens_out * cfg.price_out / 1e6


_FENCE_RE = re.compile(r"```([^\n`]*)\n(.*?)```", re.S)

_FLAVOR_TAGS = {
    "python": {"python", "py"},
    "systemc": {"systemc", "cpp", "c++", "cxx"},
    "cxxrtl": {"cxxrtl", "cpp", "c++", "cxx"},
    "verilog": {"verilog", "systemverilog", "sv", "v"},
}


def extract_code_block(response: str, flavor: str | None = None) -> str | None:
    """Last fenced block whose info-string matches the flavor (untagged counts)."""
    tags = _FLAVOR_TAGS.get(flavor, set()) if flavor else None
    best = None
    for m in _FENCE_RE.finditer(response):
        info = m.group(1).strip().lower()
        if flavor is None or not info or (tags and info in tags):
            best = m.group(2)
    return best


# --- clients ----------------------------------------------------------------------


class HttpChatClient:
    """Chat-completions endpoint client with a 3-attempt backoff retry."""

    MAX_ATTEMPTS = 3

    def __init__(self, cfg: LlmConfig, api_key: str | None = None,
                 session=None, sleep=time.sleep):
        if not cfg.base_url:
            raise ClientError("no base_url configured")
        self.cfg = cfg
        self.api_key = api_key if api_key is not None else os.environ.get(API_KEY_ENV, "")
        self._injected_session = session
        self._local = threading.local()
        self.sleep = sleep

    @property
    def session(self):
        # requests.Session is not thread-safe; batch runs use a worker pool,
        # so each worker gets its own (injected test doubles are shared as-is)
        if self._injected_session is not None:
            return self._injected_session
        if not hasattr(self._local, "session"):
            import requests

            self._local.session = requests.Session()
        return self._local.session

    def complete(self, case_id: str, messages: list[dict], cfg: LlmConfig) -> ChatResponse:
        payload = {
            "model": cfg.model,
            "messages": messages,
            "temperature": cfg.temperature,
            "top_p": cfg.top_p,
        }
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        last_error = None
        for attempt in range(self.MAX_ATTEMPTS):
            try:
                resp = self.session.post(
                    self.cfg.base_url.rstrip("/") + "/chat/completions",
                    json=payload,
                    headers=headers,
                    timeout=120,
                )
                if resp.status_code >= 500:
                    raise ClientError(f"server error {resp.status_code}")
                if resp.status_code != 200:
                    raise ClientError(f"request failed: {resp.status_code} {resp.text[:200]}")
                data = resp.json()
                text = data["choices"][0]["message"]["content"]
                usage = data.get("usage") or {}
                if "prompt_tokens" in usage and "completion_tokens" in usage:
                    return ChatResponse(text, usage["prompt_tokens"],
                                        usage["completion_tokens"])
                prompt_chars = sum(len(m.get("content", "")) for m in messages)
                return ChatResponse(
                    text,
                    prompt_chars // CHARS_PER_TOKEN_ESTIMATE,
                    len(text) // CHARS_PER_TOKEN_ESTIMATE,
                    estimated=True,
                )
            except ClientError as e:
                last_error = e
            except Exception as e:  # transport/parse failures
                last_error = ClientError(f"{type(e).__name__}: {e}")
            if attempt + 1 < self.MAX_ATTEMPTS:
                self.sleep(2 ** attempt)
        raise last_error


class MockChatClient:
    """Scriptable client: each case first succeeds at its scheduled turn.

    `schedule` maps case_id -> first successful turn (None = never). The
    emitted code carries a PASS/FAIL marker that `scripted_verifier` checks,
    so pipeline tests run without any endpoint or model execution.
    """

    def __init__(self, schedule: dict[str, int | None],
                 tokens_per_turn: tuple[int, int] = (400, 200)):
        self.schedule = dict(schedule)
        self.tokens_per_turn = tokens_per_turn
        self.turn_seen: dict[str, int] = {}

    def complete(self, case_id: str, messages: list[dict], cfg: LlmConfig) -> ChatResponse:
        turn = self.turn_seen.get(case_id, 0) + 1
        self.turn_seen[case_id] = turn
        target = self.schedule.get(case_id)
        ok = target is not None and turn >= target
        marker = "PASS" if ok else "FAIL"
        body = f"# mock model for {case_id}\n# verdict-marker: {marker} turn {turn}\n"
        text = f"Attempt {turn}.\n```python\n{body}```\n"
        tin, tout = self.tokens_per_turn
        return ChatResponse(text, tin, tout)


def scripted_verifier(code: str) -> Verdict:
    """Pairs with MockChatClient: passes iff the code carries the PASS marker."""
    if "verdict-marker: PASS" in code:
        return Verdict(VerdictKind.PASS, cycles_run=1, comparisons_made=1)
    return Verdict(
        VerdictKind.FAIL,
        divergences=(DivergenceReport(20, "mock", 1, 0),),
        cycles_run=1,
        comparisons_made=1,
    )


# --- generation loop ----------------------------------------------------------------

_PREAMBLE = (
    "You are writing a behavioral reference model of a hardware module.\n"
    "Reply with one fenced {flavor} code block defining the model: it must\n"
    "expose reset() and step(inputs) -> outputs, where inputs and outputs map\n"
    "port names to integers (step is called once per clock cycle; the clock\n"
    "itself is never passed).\n"
)


def build_turn1_prompt(case: GenCase) -> str:
    return (
        _PREAMBLE.format(flavor=case.flavor)
        + "\n## Task description\n"
        + case.prompt_text.rstrip()
        + "\n\n## Module interface\n"
        + case.interface_summary.rstrip()
        + "\n"
    )


def build_repair_message(verdict: Verdict, last_code: str | None,
                         max_divergences: int = 10) -> str:
    lines = [f"The previous model failed verification: {verdict.kind.value}."]
    if verdict.detail:
        lines.append(f"Detail: {verdict.detail}")
    for d in verdict.divergences[:max_divergences]:
        golden = "x" if d.golden is None else format(d.golden, "x")
        got = "x" if d.candidate is None else format(d.candidate, "x")
        lines.append(
            f"cycle {d.cycle} port {d.port}: expected {golden}, got {got}"
        )
    if verdict.truncated:
        lines.append("(further mismatches truncated)")
    if last_code is not None:
        lines.append("\nYour previous code:\n```\n" + last_code.rstrip() + "\n```")
    else:
        lines.append("Your previous reply contained no fenced code block.")
    lines.append("Reply with a corrected model in one fenced code block.")
    return "\n".join(lines)


def generate_reference_model(
    case: GenCase, client, cfg: LlmConfig, verify
) -> GenerationResult:
    """Run the feedback loop for one case until Pass or the budget runs out.

    `verify(code) -> Verdict` is the differential check for extracted code;
    keeping it injected means the loop itself never touches simulators.
    """
    turn1 = build_turn1_prompt(case)
    messages = [{"role": "user", "content": turn1}]
    attempts: list[GenAttempt] = []
    total_cost = 0.0
    for turn in range(1, cfg.max_iters + 1):
        response = client.complete(case.case_id, messages, cfg)
        total_cost += estimate_cost(response.tokens_in, response.tokens_out, cfg)
        code = extract_code_block(response.text, case.flavor)
        if code is None:
            verdict = Verdict(
                VerdictKind.RUNTIME_ERROR,
                detail="malformed response: no fenced code block",
            )
        else:
            verdict = verify(code)
        attempts.append(
            GenAttempt(turn, response.text, code, verdict,
                       response.tokens_in, response.tokens_out)
        )
        if verdict.passed:
            record = DatasetRecord(
                case_id=case.case_id,
                prompt=turn1,
                golden_source=case.golden_source,
                reference_model=code,
                turns_used=turn,
                total_cost=total_cost,
            )
            return GenerationResult(True, record, attempts)
        messages.append({"role": "assistant", "content": response.text})
        messages.append(
            {"role": "user", "content": build_repair_message(verdict, code)}
        )
    return GenerationResult(False, None, attempts)


def run_dataset_generation(
    cases: list[GenCase],
    client,
    cfg: LlmConfig,
    verify_factory,
    workers: int = 4,
) -> tuple[list[DatasetRecord], dict]:
    """Apply the loop to a corpus with bounded parallelism.

    Per-case failures never abort the batch; they surface in the summary's
    error list. The summary merge is order-independent (records sorted by
    case_id at the end).
    """
    if not cases:
        raise ClientError("empty corpus")
    results: dict[str, GenerationResult] = {}
    errors: dict[str, str] = {}

    def run_one(case: GenCase):
        try:
            return case.case_id, generate_reference_model(
                case, client, cfg, verify_factory(case)
            ), None
        except Exception as e:
            return case.case_id, None, f"{type(e).__name__}: {e}"

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        for future in [pool.submit(run_one, c) for c in cases]:
            case_id, result, error = future.result()
            if error is not None:
                errors[case_id] = error
            else:
                results[case_id] = result

    records = sorted(
        (r.record for r in results.values() if r.solved),
        key=lambda rec: rec.case_id,
    )
    total_cost = 0.0
    per_turn: dict[int, int] = {}
    tokens_in = tokens_out = 0
    for result in results.values():
        for attempt in result.attempts:
            total_cost += estimate_cost(attempt.tokens_in, attempt.tokens_out, cfg)
            tokens_in += attempt.tokens_in
            tokens_out += attempt.tokens_out
        if result.solved:
            turn = result.record.turns_used
            per_turn[turn] = per_turn.get(turn, 0) + 1
    solved = len(records)
    summary = {
        "cases": len(cases),
        "solved": solved,
        "pass_rate": solved / len(cases),
        "total_cost": total_cost,
        "cost_per_solved": (total_cost / solved) if solved else None,
        "per_turn": {str(k): per_turn[k] for k in sorted(per_turn)},
        "tokens_in": tokens_in,
        "tokens_out": tokens_out,
        "max_iters": cfg.max_iters,
        "errors": errors,
    }
    return records, summary
