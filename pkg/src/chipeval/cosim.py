"""Reset-masked differential co-simulation over the lock-step step protocol.

Two endpoints (golden and candidate) receive identical per-cycle inputs; their
outputs are compared only once the reset mask opens. The engine is strictly
lock-step: one step message, one outputs reply, nothing outstanding.

Wire protocol (line-delimited JSON over child stdin/stdout, UTF-8):

    -> {"type":"init","module":m,"ports":[{"name":..,"dir":"in|out","width":..}],"seed":u64}
    <- {"type":"ready"} | {"type":"error","phase":"init","detail":text}
    -> {"type":"step","cycle":c,"inputs":{port:hex}}
    <- {"type":"outputs","cycle":c,"outputs":{port:hex|"x"}}
    -> {"type":"end"}           <- optional {"type":"stats",...}

Hex values are lowercase, unprefixed, and must fit the port width; the
literal "x" marks an unknown output.
"""

from __future__ import annotations

import json
import queue
import subprocess
import threading
import time
from dataclasses import dataclass, field
from enum import Enum

from .errors import ProtocolViolation, WidthOverflow
from .interface import ModuleInterface, PortDirection
from .stimulus import InputVector, MaskSchedule


class CompareResult(Enum):
    MATCH = "match"
    MISMATCH = "mismatch"
    GOLDEN_UNKNOWN = "golden_unknown"


def compare_values(
    golden: int | None, candidate: int | None, width: int
) -> CompareResult:
    """Bitwise comparison with the unknown-handling rules.

    A concrete pair compares bit for bit. An unknown golden is its own result
    kind (an uninitialized golden must surface, not hide); an unknown
    candidate against a concrete golden is an ordinary mismatch.
    """
    limit = 1 << width
    for side, value in (("golden", golden), ("candidate", candidate)):
        if value is not None and not (0 <= value < limit):
            raise WidthOverflow(f"{side} value {value} does not fit {width} bits")
    if golden is None:
        return CompareResult.GOLDEN_UNKNOWN
    if candidate is None or golden != candidate:
        return CompareResult.MISMATCH
    return CompareResult.MATCH


@dataclass(frozen=True)
class StepResult:
    cycle: int
    outputs: dict[str, int | None]


@dataclass(frozen=True)
class DivergenceReport:
    cycle: int
    port: str
    golden: int | None
    candidate: int | None
    kind: str = "mismatch"  # "mismatch" | "golden_unknown"

    def to_dict(self) -> dict:
        def enc(v):
            return "x" if v is None else format(v, "x")
        return {
            "cycle": self.cycle,
            "port": self.port,
            "golden": enc(self.golden),
            "candidate": enc(self.candidate),
            "kind": self.kind,
        }


class VerdictKind(Enum):
    PASS = "pass"
    FAIL = "fail"
    SYNTAX_ERROR = "syntax_error"
    RUNTIME_ERROR = "runtime_error"
    TIMEOUT = "timeout"


@dataclass(frozen=True)
class Verdict:
    kind: VerdictKind
    divergences: tuple[DivergenceReport, ...] = ()
    truncated: bool = False
    detail: str = ""
    cycles_run: int = 0
    comparisons_made: int = 0

    @property
    def passed(self) -> bool:
        return self.kind is VerdictKind.PASS

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "divergences": [d.to_dict() for d in self.divergences],
            "truncated": self.truncated,
            "detail": self.detail,
            "cycles_run": self.cycles_run,
            "comparisons_made": self.comparisons_made,
        }


@dataclass(frozen=True)
class Limits:
    step_timeout_s: float = 5.0
    run_timeout_s: float = 120.0
    max_divergences: int = 10


class EndpointInitError(Exception):
    """Endpoint reported an init-phase (compile/load) failure."""


class EndpointRuntimeError(Exception):
    """Endpoint died, replied out of protocol, or raised mid-run."""


class SimEndpoint:
    """Session contract: init once, step repeatedly, end once."""

    name = "endpoint"

    def init(self, iface: ModuleInterface, seed: int) -> None:
        raise NotImplementedError

    def step(self, cycle: int, inputs: dict[str, int], timeout_s: float) -> StepResult:
        raise NotImplementedError

    def end(self) -> None:
        pass


class ScriptedEndpoint(SimEndpoint):
    """Inline response table (or per-step callable) endpoint.

    `table` is either a list of per-cycle output maps or a callable
    (cycle, inputs) -> outputs. `fail_init` simulates a compile/load error.
    """

    def __init__(self, table, name="scripted", fail_init: str | None = None):
        self.table = table
        self.name = name
        self.fail_init = fail_init
        self._iface = None
        self._ended = False

    def init(self, iface: ModuleInterface, seed: int) -> None:
        if self.fail_init is not None:
            raise EndpointInitError(self.fail_init)
        self._iface = iface

    def step(self, cycle: int, inputs: dict[str, int], timeout_s: float) -> StepResult:
        if self._ended:
            raise EndpointRuntimeError("step after end")
        if callable(self.table):
            outputs = self.table(cycle, inputs)
        else:
            if cycle >= len(self.table):
                raise EndpointRuntimeError(f"scripted table exhausted at cycle {cycle}")
            outputs = self.table[cycle]
        return StepResult(cycle, dict(outputs))

    def end(self) -> None:
        self._ended = True


def endpoint_from_model(model, name="model") -> ScriptedEndpoint:
    """Wrap an object exposing reset()/step(inputs)->outputs as an endpoint."""

    def run(cycle, inputs):
        if cycle == 0:
            model.reset()
        return model.step(dict(inputs))

    return ScriptedEndpoint(run, name=name)


class FactoryEndpoint(SimEndpoint):
    """Builds its model at init time; construction failures become init errors.

    The factory wraps compile/load work (parsing candidate Verilog, exec'ing
    generated Python), so a broken candidate surfaces as a SyntaxError
    verdict, mirroring a simulator's compile stage.
    """

    def __init__(self, factory, name="factory"):
        self.factory = factory
        self.name = name
        self.model = None

    def init(self, iface: ModuleInterface, seed: int) -> None:
        try:
            self.model = self.factory()
            self.model.reset()
        except Exception as e:
            raise EndpointInitError(f"{type(e).__name__}: {e}") from e

    def step(self, cycle: int, inputs: dict[str, int], timeout_s: float) -> StepResult:
        return StepResult(cycle, dict(self.model.step(dict(inputs))))


class ChildProcessEndpoint(SimEndpoint):
    """Protocol endpoint in a child process, one reader thread per session."""

    def __init__(self, command: list[str], working_dir: str | None = None, name=None):
        self.command = list(command)
        self.working_dir = working_dir
        self.name = name or command[0]
        self.proc: subprocess.Popen | None = None
        self._lines: queue.Queue = queue.Queue()
        self._stderr = []

    def _pump(self, stream, sink):
        for line in stream:
            sink(line)
        self._lines.put(None)  # EOF marker

    def _send(self, message: dict) -> None:
        if self.proc is None or self.proc.poll() is not None:
            raise EndpointRuntimeError(f"{self.name}: process is not running")
        try:
            self.proc.stdin.write(json.dumps(message, sort_keys=True) + "\n")
            self.proc.stdin.flush()
        except (BrokenPipeError, OSError) as e:
            raise EndpointRuntimeError(f"{self.name}: write failed: {e}") from e

    def _recv(self, timeout_s: float) -> dict:
        try:
            line = self._lines.get(timeout=timeout_s)
        except queue.Empty:
            raise TimeoutError(f"{self.name}: no reply within {timeout_s}s")
        if line is None:
            err = "".join(self._stderr[-5:]).strip()
            raise EndpointRuntimeError(
                f"{self.name}: process closed its output stream"
                + (f" (stderr: {err})" if err else "")
            )
        try:
            msg = json.loads(line)
        except json.JSONDecodeError as e:
            raise EndpointRuntimeError(f"{self.name}: malformed reply {line!r}") from e
        if not isinstance(msg, dict) or "type" not in msg:
            raise EndpointRuntimeError(f"{self.name}: malformed reply {line!r}")
        return msg

    def init(self, iface: ModuleInterface, seed: int) -> None:
        self.proc = subprocess.Popen(
            self.command,
            cwd=self.working_dir,
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            stderr=subprocess.PIPE,
            text=True,
            bufsize=1,
        )
        threading.Thread(
            target=self._pump, args=(self.proc.stdout, self._lines.put), daemon=True
        ).start()
        threading.Thread(
            target=self._pump, args=(self.proc.stderr, self._stderr.append), daemon=True
        ).start()
        self._iface = iface
        self._send(
            {
                "type": "init",
                "module": iface.module_name,
                "ports": [
                    {
                        "name": p.name,
                        "dir": "in" if p.direction is PortDirection.INPUT else "out",
                        "width": p.width,
                    }
                    for p in iface.ports
                ],
                "seed": seed,
            }
        )
        reply = self._recv(timeout_s=30.0)
        if reply.get("type") == "error":
            raise EndpointInitError(str(reply.get("detail", "init failed")))
        if reply.get("type") != "ready":
            raise EndpointRuntimeError(f"{self.name}: expected ready, got {reply}")

    def step(self, cycle: int, inputs: dict[str, int], timeout_s: float) -> StepResult:
        self._send(
            {
                "type": "step",
                "cycle": cycle,
                "inputs": {name: format(v, "x") for name, v in inputs.items()},
            }
        )
        reply = self._recv(timeout_s)
        if reply.get("type") == "error":
            raise EndpointRuntimeError(
                f"{self.name}: error in phase {reply.get('phase')}: {reply.get('detail')}"
            )
        if reply.get("type") != "outputs" or reply.get("cycle") != cycle:
            raise EndpointRuntimeError(f"{self.name}: bad step reply {reply}")
        outputs = {}
        for name, text in dict(reply.get("outputs", {})).items():
            if text == "x":
                outputs[name] = None
            else:
                try:
                    outputs[name] = int(text, 16)
                except (TypeError, ValueError):
                    raise EndpointRuntimeError(
                        f"{self.name}: bad hex value {text!r} for port {name}"
                    )
        return StepResult(cycle, outputs)

    def end(self) -> None:
        if self.proc is None:
            return
        try:
            if self.proc.poll() is None:
                self._send({"type": "end"})
        except EndpointRuntimeError:
            pass
        try:
            self.proc.wait(timeout=5.0)
        except subprocess.TimeoutExpired:
            self.proc.kill()
            self.proc.wait()
        finally:
            for stream in (self.proc.stdin, self.proc.stdout, self.proc.stderr):
                if stream:
                    stream.close()


@dataclass
class RunTraces:
    inputs: dict[str, list[int]] = field(default_factory=dict)
    golden: dict[str, list[int | None]] = field(default_factory=dict)
    candidate: dict[str, list[int | None]] = field(default_factory=dict)


class DifferentialRun:
    """One golden-vs-candidate session pair; confine each run to one worker."""

    def __init__(
        self,
        golden: SimEndpoint,
        candidate: SimEndpoint,
        iface: ModuleInterface,
        stimuli: list[InputVector],
        mask: MaskSchedule,
        limits: Limits = Limits(),
        seed: int = 0,
        capture_traces: bool = False,
    ):
        if not stimuli:
            raise ProtocolViolation("stimuli must be nonempty")
        self.golden = golden
        self.candidate = candidate
        self.iface = iface
        self.stimuli = stimuli
        self.mask = mask
        self.limits = limits
        self.seed = seed
        self.capture = capture_traces
        self.traces = RunTraces() if capture_traces else None
        self.verdict: Verdict | None = None

    def _record(self, vec: InputVector, gold: StepResult, cand: StepResult) -> None:
        if not self.capture:
            return
        for name, value in vec.values.items():
            self.traces.inputs.setdefault(name, []).append(value)
        for p in self.iface.outputs():
            self.traces.golden.setdefault(p.name, []).append(gold.outputs.get(p.name))
            self.traces.candidate.setdefault(p.name, []).append(cand.outputs.get(p.name))

    def execute(self) -> Verdict:
        outputs = self.iface.outputs()
        divergences: list[DivergenceReport] = []
        comparisons = 0
        cycles_run = 0
        deadline = time.monotonic() + self.limits.run_timeout_s

        try:
            self.golden.init(self.iface, self.seed)
        except EndpointInitError as e:
            self.verdict = Verdict(VerdictKind.SYNTAX_ERROR, detail=f"golden: {e}")
            return self.verdict
        except Exception as e:
            self.verdict = Verdict(VerdictKind.RUNTIME_ERROR, detail=f"golden: {e}")
            return self.verdict
        try:
            self.candidate.init(self.iface, self.seed)
        except EndpointInitError as e:
            self.golden.end()
            self.verdict = Verdict(VerdictKind.SYNTAX_ERROR, detail=f"candidate: {e}")
            return self.verdict
        except Exception as e:
            self.golden.end()
            self.verdict = Verdict(VerdictKind.RUNTIME_ERROR, detail=f"candidate: {e}")
            return self.verdict

        truncated = False
        try:
            for vec in self.stimuli:
                if time.monotonic() > deadline:
                    self.verdict = Verdict(
                        VerdictKind.TIMEOUT,
                        detail=f"run limit {self.limits.run_timeout_s}s",
                        cycles_run=cycles_run,
                        comparisons_made=comparisons,
                    )
                    return self.verdict
                try:
                    gold = self.golden.step(vec.cycle, vec.values, self.limits.step_timeout_s)
                    cand = self.candidate.step(vec.cycle, vec.values, self.limits.step_timeout_s)
                except TimeoutError as e:
                    self.verdict = Verdict(
                        VerdictKind.TIMEOUT,
                        detail=f"step limit: {e}",
                        cycles_run=cycles_run,
                        comparisons_made=comparisons,
                    )
                    return self.verdict
                except Exception as e:
                    # scripted endpoints may wrap arbitrary model code
                    self.verdict = Verdict(
                        VerdictKind.RUNTIME_ERROR,
                        detail=f"{type(e).__name__}: {e}",
                        cycles_run=cycles_run,
                        comparisons_made=comparisons,
                    )
                    return self.verdict

                for side, res in (("golden", gold), ("candidate", cand)):
                    missing = [p.name for p in outputs if p.name not in res.outputs]
                    if missing:
                        self.verdict = Verdict(
                            VerdictKind.RUNTIME_ERROR,
                            detail=f"{side} reply missing ports {missing}",
                            cycles_run=cycles_run,
                            comparisons_made=comparisons,
                        )
                        return self.verdict

                self._record(vec, gold, cand)
                cycles_run += 1

                if vec.cycle >= self.mask.compare_from:
                    for p in outputs:
                        g, c = gold.outputs[p.name], cand.outputs[p.name]
                        try:
                            result = compare_values(g, c, p.width)
                        except WidthOverflow as e:
                            self.verdict = Verdict(
                                VerdictKind.RUNTIME_ERROR,
                                detail=str(e),
                                cycles_run=cycles_run,
                                comparisons_made=comparisons,
                            )
                            return self.verdict
                        comparisons += 1
                        if result is not CompareResult.MATCH:
                            divergences.append(
                                DivergenceReport(
                                    vec.cycle, p.name, g, c, kind=result.value
                                )
                            )
                            if len(divergences) >= self.limits.max_divergences:
                                truncated = True
                                break
                    if truncated:
                        break
        finally:
            self.golden.end()
            self.candidate.end()

        if divergences:
            self.verdict = Verdict(
                VerdictKind.FAIL,
                divergences=tuple(divergences),
                truncated=truncated,
                cycles_run=cycles_run,
                comparisons_made=comparisons,
            )
        else:
            self.verdict = Verdict(
                VerdictKind.PASS,
                cycles_run=cycles_run,
                comparisons_made=comparisons,
            )
        return self.verdict


def run_differential(
    golden: SimEndpoint,
    candidate: SimEndpoint,
    iface: ModuleInterface,
    stimuli: list[InputVector],
    mask: MaskSchedule,
    limits: Limits = Limits(),
    seed: int = 0,
) -> Verdict:
    return DifferentialRun(golden, candidate, iface, stimuli, mask, limits, seed).execute()


def record_traces(run: DifferentialRun) -> tuple[dict, dict, dict]:
    """Per-cycle signal histories of a completed run: (golden, candidate, inputs)."""
    if run.traces is None:
        raise ProtocolViolation("run was not started with capture_traces=True")
    return run.traces.golden, run.traces.candidate, run.traces.inputs
