"""Run configuration: defaults < config file < environment < flags.

The config file is TOML (chipeval.toml by convention) with two tables:

    [run]
    master_seed = 0
    cycles = 1024
    reset_cycles = 20
    workers = 4
    max_divergences = 10
    n_samples = 10
    corpus = "."
    results_dir = "results"
    use_simulators = "never"

    [llm]
    base_url = ""
    model = ""
    temperature = 0.85
    top_p = 0.95
    max_iters = 5
    price_in = 0.0
    price_out = 0.0

The API key never lives in the file: it comes from $CHIPEVAL_API_KEY.
"""

from __future__ import annotations

import dataclasses
import os
import pathlib
import sys
from dataclasses import dataclass, field

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .llm import LlmConfig

ENV_PREFIX = "CHIPEVAL_"
_RUN_KEYS = (
    "master_seed", "cycles", "reset_cycles", "workers", "max_divergences",
    "n_samples", "corpus", "results_dir", "use_simulators",
)
_LLM_KEYS = (
    "base_url", "model", "temperature", "top_p", "max_iters",
    "price_in", "price_out",
)


@dataclass
class RunConfig:
    master_seed: int = 0
    cycles: int = 1024
    reset_cycles: int = 20
    workers: int = 4
    max_divergences: int = 10
    n_samples: int = 10
    corpus: str = "."
    results_dir: str = "results"
    use_simulators: str = "never"
    llm: LlmConfig = field(default_factory=LlmConfig)

    @classmethod
    def load(cls, config_path: str | None = None,
             env: dict | None = None) -> "RunConfig":
        """Apply file and environment layers over the defaults."""
        cfg = cls()
        if config_path:
            data = tomllib.loads(pathlib.Path(config_path).read_text())
            run = data.get("run", {})
            for key in _RUN_KEYS:
                if key in run:
                    setattr(cfg, key, run[key])
            llm = data.get("llm", {})
            cfg.llm = dataclasses.replace(
                cfg.llm, **{k: llm[k] for k in _LLM_KEYS if k in llm}
            )
        env = os.environ if env is None else env
        for key in _RUN_KEYS:
            raw = env.get(ENV_PREFIX + key.upper())
            if raw is None:
                continue
            current = getattr(cfg, key)
            setattr(cfg, key, type(current)(raw) if not isinstance(current, str) else raw)
        llm_env = {}
        for key in _LLM_KEYS:
            raw = env.get(ENV_PREFIX + "LLM_" + key.upper())
            if raw is None:
                continue
            default = getattr(LlmConfig(), key)
            llm_env[key] = type(default)(raw) if not isinstance(default, str) else raw
        if llm_env:
            cfg.llm = dataclasses.replace(cfg.llm, **llm_env)
        return cfg

    def override(self, **kwargs) -> "RunConfig":
        """Flag layer: highest precedence; None values leave the field alone."""
        out = dataclasses.replace(self)
        llm_updates = {}
        for key, value in kwargs.items():
            if value is None:
                continue
            if key in _LLM_KEYS:
                llm_updates[key] = value
            else:
                setattr(out, key, value)
        if llm_updates:
            out.llm = dataclasses.replace(out.llm, **llm_updates)
        return out

    def to_toml(self) -> str:
        def fmt(v):
            if isinstance(v, bool):
                return "true" if v else "false"
            if isinstance(v, str):
                return f'"{v}"'
            return repr(v)

        lines = ["[run]"]
        for key in _RUN_KEYS:
            lines.append(f"{key} = {fmt(getattr(self, key))}")
        lines.append("")
        lines.append("[llm]")
        for key in _LLM_KEYS:
            lines.append(f"{key} = {fmt(getattr(self.llm, key))}")
        return "\n".join(lines) + "\n"
