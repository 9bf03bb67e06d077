"""Experiment configuration: flat key=value files plus CLI overrides."""
from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace
from pathlib import Path

from .errors import ConfigError
from .hypercube import MAX_DIM

KINDS = ("census", "expansion", "mixing", "diameter", "cycles", "minors",
         "decompose", "sprinkle", "sweep")


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    d: tuple = (10,)
    epsilon: float | None = None
    p: float | None = None
    q2: float | None = None
    trials: int = 1
    seed: int = 0
    out: str | None = None
    workers: int = 1
    cap_exact: int = 1 << 12
    tol: float = 1e-10
    record_time: bool = False
    # kind-specific knobs
    c8: float = 1.0
    budget: int = 100_000
    target_t: int = 16
    walkers: int = 20_000
    horizon: int = 20_000
    samples: int = 200

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"kind: unknown experiment {self.kind!r}")
        if not self.d:
            raise ConfigError("d: empty range")
        for d in self.d:
            if not 2 <= d <= MAX_DIM:
                raise ConfigError(f"d: {d} outside [2, {MAX_DIM}]")
        if (self.epsilon is None) == (self.p is None):
            raise ConfigError("give exactly one of epsilon and p")
        if self.p is not None and not 0 <= self.p <= 1:
            raise ConfigError(f"p: {self.p} outside [0, 1]")
        if self.epsilon is not None:
            for d in self.d:
                if not 0 <= (1 + self.epsilon) / d <= 1:
                    raise ConfigError(f"epsilon: (1+{self.epsilon})/{d} is not a probability")
        if self.q2 is not None and not 0 <= self.q2 <= 1:
            raise ConfigError(f"q2: {self.q2} outside [0, 1]")
        if self.trials < 1:
            raise ConfigError("trials: must be >= 1")
        if self.workers < 1:
            raise ConfigError("workers: must be >= 1")
        if self.kind == "sprinkle" and self.q2 is None:
            raise ConfigError("q2: required for sprinkle experiments")

    def p_for(self, d: int) -> float:
        return self.p if self.p is not None else (1.0 + self.epsilon) / d


def parse_d(text: str) -> tuple:
    """'12', '10,12,14' or 'lo:hi[:step]' (inclusive)."""
    text = text.strip()
    try:
        if ":" in text:
            parts = [int(x) for x in text.split(":")]
            lo, hi = parts[0], parts[1]
            step = parts[2] if len(parts) > 2 else 1
            if step < 1:
                raise ValueError
            return tuple(range(lo, hi + 1, step))
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise ConfigError(f"d: cannot parse {text!r}") from None


def _bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(text)


_CASTS = {f.name: f.type for f in fields(ExperimentConfig)}


def _cast(key: str, value: str):
    if key == "d":
        return parse_d(value)
    kind = _CASTS[key]
    if kind == "bool":
        return _bool(value)
    if kind == "int":
        return int(float(value)) if "e" in value.lower() else int(value)
    if kind in ("float", "float | None"):
        return float(value)
    return value


def read_config_file(path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, value = (x.strip() for x in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _CASTS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            out[key] = _cast(key, value)
        except (ValueError, ConfigError) as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}: {value!r}") from exc
    return out


def build_config(kind: str, file_values: dict | None = None, overrides: dict | None = None):
    """File values first, then CLI overrides (None means 'not given')."""
    values = {"workers": int(os.environ.get("QPERC_WORKERS", "1"))}
    values.update(file_values or {})
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    values["kind"] = kind
    try:
        return ExperimentConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def with_updates(cfg: ExperimentConfig, **kw) -> ExperimentConfig:
    return replace(cfg, **kw)
