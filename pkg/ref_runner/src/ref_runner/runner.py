"""Serve a Python reference model over the step protocol.

Usage: ref-runner <model.py>   (or: python3 -m ref_runner <model.py>)

The model file must define either a class named RefModel or module-level
reset()/step() functions, with:

    reset()                      initialize internal state
    step(inputs: dict) -> dict   one clock cycle; every non-clock input comes
                                 in as an integer, every output port must come
                                 back exactly once; None marks unknown

Protocol (line-delimited JSON, one reply per request, strictly lock-step):

    -> {"type":"init","module":m,"ports":[{"name","dir","width"}],"seed":u64}
    <- {"type":"ready"} | {"type":"error","phase":"init","detail":text}
    -> {"type":"step","cycle":c,"inputs":{port:hex}}
    <- {"type":"outputs","cycle":c,"outputs":{port:hex|"x"}}
       | {"type":"error","phase":"step","detail":text}   (then exit 1)
    -> {"type":"end"}            exit 0 (after an optional stats line)

Values are lowercase unprefixed hex. A model output that does not fit its
declared width is a protocol error, never a silent truncation. The model's
own prints are rerouted to stderr so the protocol stream stays clean.

The model runs in this process with no sandboxing; run untrusted models in a
container.
"""

from __future__ import annotations

import json
import sys


class ModelLoadError(Exception):
    pass


def load_model(path: str):
    """Exec the model file; return an object exposing reset()/step()."""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            source = handle.read()
    except OSError as e:
        raise ModelLoadError(f"cannot read {path}: {e}") from e
    namespace: dict = {"__name__": "ref_model", "__file__": path}
    try:
        exec(compile(source, path, "exec"), namespace)
    except Exception as e:
        raise ModelLoadError(f"{type(e).__name__}: {e}") from e
    if "RefModel" in namespace:
        try:
            return namespace["RefModel"]()
        except Exception as e:
            raise ModelLoadError(f"RefModel(): {type(e).__name__}: {e}") from e
    reset = namespace.get("reset")
    step = namespace.get("step")
    if callable(reset) and callable(step):
        class FunctionModel:
            def reset(self):
                reset()

            def step(self, inputs):
                return step(inputs)

        return FunctionModel()
    raise ModelLoadError(
        "model must define class RefModel or module-level reset()/step()"
    )


class Session:
    """One protocol session: init -> step* -> end."""

    def __init__(self, model_path: str, out):
        self.model_path = model_path
        self.out = out
        self.model = None
        self.out_widths: dict[str, int] = {}
        self.steps = 0

    def _reply(self, message: dict) -> None:
        self.out.write(json.dumps(message, sort_keys=True) + "\n")
        self.out.flush()

    def _error(self, phase: str, detail: str) -> None:
        self._reply({"type": "error", "phase": phase, "detail": detail})

    def handle_init(self, msg: dict) -> bool:
        try:
            self.model = load_model(self.model_path)
            self.model.reset()
        except (ModelLoadError, Exception) as e:
            detail = str(e) if isinstance(e, ModelLoadError) else (
                f"reset(): {type(e).__name__}: {e}"
            )
            self._error("init", detail)
            return False
        self.out_widths = {
            p["name"]: int(p["width"])
            for p in msg.get("ports", ())
            if p.get("dir") == "out"
        }
        self._reply({"type": "ready"})
        return True

    def handle_step(self, msg: dict) -> bool:
        try:
            inputs = {
                name: int(text, 16) for name, text in dict(msg["inputs"]).items()
            }
        except (KeyError, ValueError, TypeError) as e:
            self._error("step", f"bad step message: {e}")
            return False
        try:
            raw = self.model.step(inputs)
        except Exception as e:
            self._error("step", f"step(): {type(e).__name__}: {e}")
            return False
        if not isinstance(raw, dict):
            self._error("step", f"step() returned {type(raw).__name__}, not a dict")
            return False
        outputs = {}
        for name, width in self.out_widths.items():
            if name not in raw:
                self._error("step", f"step() did not produce output {name!r}")
                return False
            value = raw[name]
            if value is None:
                outputs[name] = "x"
                continue
            if not isinstance(value, int):
                self._error("step", f"output {name!r} is {type(value).__name__}")
                return False
            if not 0 <= value < (1 << width):
                self._error(
                    "step",
                    f"output {name!r} value {value} does not fit {width} bits",
                )
                return False
            outputs[name] = format(value, "x")
        extras = set(raw) - set(self.out_widths)
        if extras:
            self._error("step", f"step() produced unknown ports {sorted(extras)}")
            return False
        self.steps += 1
        self._reply({"type": "outputs", "cycle": msg.get("cycle", 0),
                     "outputs": outputs})
        return True

    def handle_end(self) -> None:
        self._reply({"type": "stats", "steps": self.steps})


def serve(model_path: str, stdin=None, stdout=None) -> int:
    stdin = stdin if stdin is not None else sys.stdin
    out = stdout if stdout is not None else sys.stdout
    # stray prints from model code must not corrupt the protocol stream
    sys.stdout = sys.stderr
    session = Session(model_path, out)
    for line in stdin:
        line = line.strip()
        if not line:
            continue
        try:
            msg = json.loads(line)
        except json.JSONDecodeError as e:
            session._error("protocol", f"bad message: {e}")
            return 1
        kind = msg.get("type")
        if kind == "init":
            if not session.handle_init(msg):
                return 1
        elif kind == "step":
            if session.model is None:
                session._error("protocol", "step before init")
                return 1
            if not session.handle_step(msg):
                return 1
        elif kind == "end":
            session.handle_end()
            return 0
        else:
            session._error("protocol", f"unknown message type {kind!r}")
            return 1
    return 0


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    if len(argv) != 1:
        print("usage: ref-runner <model.py>", file=sys.stderr)
        return 2
    return serve(argv[0])


if __name__ == "__main__":
    sys.exit(main())
