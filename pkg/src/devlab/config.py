"""``key = value`` experiment configuration files."""
from __future__ import annotations

import math
import os
from dataclasses import asdict, dataclass, field

from .errors import ConfigError
from .homogeneous import GOLDEN
from .iet import LabeledPermutation

EXPERIMENTS = ("lyapunov", "structure", "homology", "observable", "torus", "heisenberg", "end2end")
COMMON_REQUIRED = ("experiment", "seed", "trials", "t_max")
EXTRA_REQUIRED = {
    "lyapunov": ("perm",),
    "structure": ("perm",),
    "homology": ("perm",),
    "observable": ("perm",),
    "end2end": ("perm",),
    "torus": ("alpha",),
    "heisenberg": ("alpha",),
}
DEFAULT_TOLERANCE = {
    "lyapunov": 0.02,
    "structure": 0.03,
    "homology": 0.05,
    "observable": 0.05,
    "torus": 0.1,
    "heisenberg": 0.05,
    "end2end": 0.05,
}
SEED_ENV = "DEVLAB_SEED"


@dataclass
class ExperimentConfig:
    experiment: str
    seed: int
    trials: int
    t_max: int
    perm: str | None = None
    alpha: float | None = None
    beta: float | None = None
    schedule_ratio: float = 1.25
    tolerance: float | None = None
    output_dir: str = "devlab-out"
    k: int | None = None
    steps: int = 1_000_000
    observable: str | None = None
    target: float | None = None
    source_lines: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def tol(self) -> float:
        return DEFAULT_TOLERANCE[self.experiment] if self.tolerance is None else self.tolerance

    @property
    def permutation(self) -> LabeledPermutation:
        return LabeledPermutation.parse(self.perm)

    def echo(self) -> dict:
        out = asdict(self)
        out.pop("source_lines")
        return out


def _int(text):
    v = float(text)
    if not math.isfinite(v) or v != int(v):
        raise ValueError(f"{text!r} is not an integer")
    # exact for plain integer literals beyond 2**53 (64-bit seeds)
    return int(text) if text.lstrip("+").isdigit() else int(v)


def _real(text):
    if text.strip().lower() == "golden":
        return GOLDEN
    v = float(text)
    if not math.isfinite(v):
        raise ValueError(f"{text!r} is not finite")
    return v


def _perm(text):
    perm = LabeledPermutation.parse(text)
    if not perm.is_irreducible():
        raise ValueError(f"permutation {text} is reducible")
    return str(perm)


def _experiment(text):
    if text not in EXPERIMENTS:
        raise ValueError(f"unknown experiment {text!r}; choose one of {', '.join(EXPERIMENTS)}")
    return text


FIELDS = {
    "experiment": _experiment,
    "seed": _int,
    "trials": _int,
    "t_max": _int,
    "perm": _perm,
    "alpha": _real,
    "beta": _real,
    "schedule_ratio": _real,
    "tolerance": _real,
    "output_dir": str,
    "k": _int,
    "steps": _int,
    "observable": str,
    "target": _real,
}
POSITIVE = ("trials", "t_max", "schedule_ratio", "tolerance", "k", "steps", "alpha")


def parse_config(text: str, env: dict | None = None) -> ExperimentConfig:
    """Parse and validate; errors carry the offending line number or field."""
    env = os.environ if env is None else env
    values, lines = {}, {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", line=lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in FIELDS:
            raise ConfigError(f"unknown key {key!r}", line=lineno, field=key)
        if key in values:
            raise ConfigError(f"duplicate key {key!r} (first on line {lines[key]})", line=lineno, field=key)
        try:
            values[key] = FIELDS[key](value)
        except ValueError as exc:
            raise ConfigError(f"{key}: {exc}", line=lineno, field=key) from None
        if key in POSITIVE and values[key] <= 0:
            raise ConfigError(f"{key} must be positive", line=lineno, field=key)
        lines[key] = lineno

    if env.get(SEED_ENV):
        try:
            values["seed"] = _int(env[SEED_ENV])
        except ValueError:
            raise ConfigError(f"{SEED_ENV}={env[SEED_ENV]!r} is not an integer", field="seed") from None

    missing = [k for k in COMMON_REQUIRED if k not in values]
    if "experiment" in values:
        missing += [k for k in EXTRA_REQUIRED[values["experiment"]] if k not in values]
    if missing:
        raise ConfigError("missing required field(s): " + ", ".join(missing), field=missing[0])
    if not 0 <= values["seed"] < 2 ** 64:
        raise ConfigError("seed must be a 64-bit unsigned integer", line=lines.get("seed"), field="seed")
    if values.get("schedule_ratio", 1.25) <= 1:
        raise ConfigError("schedule_ratio must exceed 1", line=lines.get("schedule_ratio"),
                          field="schedule_ratio")
    exp = values["experiment"]
    if exp in ("lyapunov", "structure", "end2end") and "k" in values:
        d = LabeledPermutation.parse(values["perm"]).d
        if values["k"] > d:
            raise ConfigError(f"k must not exceed d={d}", line=lines["k"], field="k")
    if exp in ("torus", "heisenberg") and not values["alpha"] < 1:
        raise ConfigError("alpha must lie in (0, 1)", line=lines["alpha"], field="alpha")
    if exp in ("lyapunov", "structure") and values["t_max"] < 1000:
        raise ConfigError("t_max (Zorich steps) must be at least 1000", line=lines["t_max"], field="t_max")
    if exp in ("homology", "observable", "torus", "heisenberg", "end2end") and values["t_max"] < 1000:
        raise ConfigError("t_max must be at least 1000", line=lines["t_max"], field="t_max")
    return ExperimentConfig(**values, source_lines=lines)


def load_config(path, env: dict | None = None) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), env)
