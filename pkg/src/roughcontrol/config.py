"""Experiment configuration as plain `key = value` text.

One assignment per line, `#` starts a comment, blank lines are ignored.
Unknown keys are rejected so typos fail fast.  Emission is canonical
(fixed key order, comma-separated lists), which makes parse/emit
round-trips idempotent.
"""

import dataclasses

from .errors import ConfigError

_LIST_FLOAT = "list_float"
_LIST_INT = "list_int"

#: key -> (type tag, default); insertion order is the canonical emit order
_SCHEMA = {
    "problem": (str, "tracking"),
    "policy": (str, "linear"),
    "hurst": (_LIST_FLOAT, [0.5]),
    "level": (_LIST_INT, [3]),
    "dt": (float, 1e-2),
    "refinement": (int, 1),
    "horizon": (float, 1.0),
    "n_train": (int, 2 ** 13),
    "n_test": (int, 2 ** 14),
    "n_steps": (int, 2000),
    "batch_size": (int, 1024),
    "lr": (float, 0.0),
    "seed": (int, 0),
    "output": (str, ""),
}


@dataclasses.dataclass
class ExperimentConfig:
    """Settings shared by the training, linearization, and dump commands.

    lr = 0 means per-policy-kind defaults; output = "" means stdout.
    """

    problem: str = "tracking"
    policy: str = "linear"
    hurst: list = dataclasses.field(default_factory=lambda: [0.5])
    level: list = dataclasses.field(default_factory=lambda: [3])
    dt: float = 1e-2
    refinement: int = 1
    horizon: float = 1.0
    n_train: int = 2 ** 13
    n_test: int = 2 ** 14
    n_steps: int = 2000
    batch_size: int = 1024
    lr: float = 0.0
    seed: int = 0
    output: str = ""

    def validate(self):
        if self.problem not in ("tracking", "execution"):
            raise ConfigError(f"unknown problem '{self.problem}'")
        if self.policy not in ("linear", "deep"):
            raise ConfigError(f"unknown policy '{self.policy}'")
        for h in self.hurst:
            if not 0.0 < h <= 1.0:
                raise ConfigError(f"hurst {h} outside (0, 1]")
        for n in self.level:
            if n < 1:
                raise ConfigError(f"level {n} must be >= 1")
        if self.dt <= 0 or self.horizon <= 0:
            raise ConfigError("dt and horizon must be positive")
        steps = self.horizon / self.dt
        if abs(steps - round(steps)) > 1e-12 * max(1.0, steps):
            raise ConfigError(
                f"dt = {self.dt} does not divide horizon = {self.horizon}")
        if self.refinement < 1:
            raise ConfigError("refinement must be >= 1")
        if self.n_train < 1 or self.n_test < 1:
            raise ConfigError("path counts must be >= 1")
        if self.n_steps < 0 or self.batch_size < 1:
            raise ConfigError("n_steps must be >= 0 and batch_size >= 1")
        return self


def _parse_value(key, tag, raw):
    try:
        if tag is str:
            return raw
        if tag is int:
            return int(raw)
        if tag is float:
            return float(raw)
        items = [p.strip() for p in raw.split(",") if p.strip()]
        if tag == _LIST_FLOAT:
            return [float(p) for p in items]
        return [int(p) for p in items]
    except ValueError:
        raise ConfigError(f"bad value for '{key}': {raw!r}")


def parse_config(text):
    """Parse config text into an ExperimentConfig; unknown keys are errors."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, raw = (part.strip() for part in line.split("=", 1))
        if key not in _SCHEMA:
            raise ConfigError(f"line {lineno}: unknown key '{key}'")
        tag, _ = _SCHEMA[key]
        values[key] = _parse_value(key, tag, raw)
    return ExperimentConfig(**values).validate()


def load_config(path):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}")
    return parse_config(text)


def emit_config(config):
    """Canonical text form; parse(emit(c)) reproduces c exactly."""
    lines = []
    for key, (tag, _) in _SCHEMA.items():
        value = getattr(config, key)
        if tag in (_LIST_FLOAT, _LIST_INT):
            rendered = ", ".join(repr(v) for v in value)
        else:
            rendered = repr(value) if tag is not str else value
        lines.append(f"{key} = {rendered}")
    return "\n".join(lines) + "\n"
