"""Scenario configuration files.

Grammar (one setting per line)::

    # full-line comment
    key = value        # trailing comment

Blank lines are ignored. Keys are the field names of :class:`ScenarioConfig`;
unknown or repeated keys are errors. Values are integers, decimals (``0.05``,
``1e-3``), fractions of two numbers (``1/3``), bare words (``window``) or
comma-separated lists of numbers (``0, 0.1, 0.3``). ``tau0_grid`` also accepts
``start:stop:step`` (inclusive of ``stop``).
"""
from __future__ import annotations

import dataclasses
import hashlib
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional

from .adversary import AdversaryProfile
from .signal_model import MixtureScenario, SignalModel, build_binomial_mixture
from .social_kernel import SocialKernel, make_kernel

KERNEL_KINDS = ("window", "count", "full_history")
SWEEP_AXES = ("attack", "range", "memory")
DEFAULT_TAU0_GRID = tuple(round(0.05 * i, 10) for i in range(101))


class ConfigError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.line, self.column = line, column
        where = f"line {line}, column {column}: " if line is not None else ""
        super().__init__(where + message)


@dataclass(frozen=True)
class ScenarioConfig:
    m: int
    N: int
    q: float = 1.0 / 3.0
    r: float = 0.05
    tail_normalization: str = "exact-count"
    kernel: str = "window"
    k: int = 4
    p_b: float = 0.0
    c00: float = 0.0
    c01: float = 1.0
    tau0: float = 0.0
    alpha: float = 0.05
    tau0_grid: tuple = DEFAULT_TAU0_GRID
    sweep_axis: Optional[str] = None
    sweep_values: tuple = ()
    trials: int = 100_000
    seed: int = 0
    output: str = "out"

    def __post_init__(self):
        try:
            self.scenario()
            self.adversary()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        _require(isinstance(self.N, int) and self.N >= 1, "N", "must be a positive integer")
        _require(self.kernel in KERNEL_KINDS, "kernel", f"must be one of {KERNEL_KINDS}")
        _require(isinstance(self.k, int) and self.k >= 1, "k", "must be a positive integer")
        _require(math.isfinite(self.tau0), "tau0", "must be finite")
        _require(0.0 <= self.alpha <= 1.0, "alpha", "must lie in [0, 1]")
        _require(len(self.tau0_grid) > 0, "tau0_grid", "must not be empty")
        _require(isinstance(self.trials, int) and self.trials >= 1, "trials", "must be a positive integer")
        _require(isinstance(self.seed, int) and 0 <= self.seed < 2**64, "seed", "must be an unsigned 64-bit integer")
        if self.sweep_axis is not None:
            _require(self.sweep_axis in SWEEP_AXES, "sweep_axis", f"must be one of {SWEEP_AXES}")
            _require(len(self.sweep_values) > 0, "sweep_values", "must list at least one value")
            for v in self.sweep_values:
                try:
                    self.at_axis(self.sweep_axis, v)
                except ConfigError as exc:
                    raise ConfigError(f"sweep value {v!r} is invalid: {exc}") from None

    def scenario(self) -> MixtureScenario:
        return MixtureScenario(self.m, self.q, self.r, self.tail_normalization)

    def signal_model(self) -> SignalModel:
        return build_binomial_mixture(self.scenario())

    def social_kernel(self) -> SocialKernel:
        return make_kernel(self.kernel, self.k)

    def adversary(self) -> AdversaryProfile:
        return AdversaryProfile(self.p_b, self.c00, self.c01)

    def replace(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)

    def at_axis(self, axis: str, value) -> "ScenarioConfig":
        """Single-point copy with one sweep axis set to ``value`` and the sweep cleared."""
        point = {"sweep_axis": None, "sweep_values": ()}
        if axis == "attack":
            return self.replace(p_b=float(value), **point)
        if axis == "range":
            _require(float(value).is_integer(), "m", "must be an integer")
            return self.replace(m=int(value), **point)
        if axis == "memory":
            _require(float(value).is_integer(), "k", "must be an integer")
            return self.replace(k=int(value), **point)
        raise ConfigError(f"unknown sweep axis {axis!r}")

    def canonical_text(self) -> str:
        """Every result-affecting field; ``output`` is excluded."""
        lines = []
        for f in dataclasses.fields(self):
            if f.name == "output":
                continue
            value = getattr(self, f.name)
            if isinstance(value, tuple):
                text = ", ".join(_fmt(v) for v in value)
            elif value is None:
                text = ""
            else:
                text = _fmt(value)
            lines.append(f"{f.name} = {text}")
        return "\n".join(lines) + "\n"

    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical_text().encode()).hexdigest()[:16]


_INT_KEYS = {"m", "N", "k", "trials", "seed"}
_FLOAT_KEYS = {"q", "r", "p_b", "c00", "c01", "tau0", "alpha"}
_WORD_KEYS = {"tail_normalization", "kernel", "sweep_axis", "output"}
_LIST_KEYS = {"tau0_grid", "sweep_values"}
_KEY_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def parse_config(text: str) -> ScenarioConfig:
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        if "=" not in line:
            col = len(line) - len(line.lstrip()) + 1
            raise ConfigError("expected 'key = value'", lineno, col)
        key_part, value_part = line.split("=", 1)
        key = key_part.strip()
        key_col = len(key_part) - len(key_part.lstrip()) + 1
        value = value_part.strip()
        value_col = len(key_part) + 2 + len(value_part) - len(value_part.lstrip())
        if not _KEY_RE.match(key):
            raise ConfigError(f"invalid key {key!r}", lineno, key_col)
        if key not in _INT_KEYS | _FLOAT_KEYS | _WORD_KEYS | _LIST_KEYS:
            raise ConfigError(f"unknown key {key!r}", lineno, key_col)
        if key in values:
            raise ConfigError(f"key {key!r} given twice", lineno, key_col)
        if not value:
            raise ConfigError(f"missing value for {key!r}", lineno, value_col)
        try:
            values[key] = _convert(key, value)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key!r}: {exc}", lineno, value_col) from None
    for required in ("m", "N"):
        if required not in values:
            raise ConfigError(f"missing required key {required!r}")
    return ScenarioConfig(**values)


def load_config(path) -> ScenarioConfig:
    return parse_config(Path(path).read_text())


def _convert(key: str, text: str):
    if key in _INT_KEYS:
        value = _number(text)
        if not float(value).is_integer():
            raise ValueError(f"{text!r} is not an integer")
        return int(value)
    if key in _FLOAT_KEYS:
        return float(_number(text))
    if key in _WORD_KEYS:
        if not re.fullmatch(r"[A-Za-z0-9_.\-/]+", text):
            raise ValueError(f"{text!r} is not a bare word")
        return text
    if key == "tau0_grid" and ":" in text:
        parts = [float(_number(p.strip())) for p in text.split(":")]
        if len(parts) != 3 or parts[2] <= 0 or parts[1] < parts[0]:
            raise ValueError("expected start:stop:step with step > 0 and stop >= start")
        count = int(math.floor((parts[1] - parts[0]) / parts[2] + 1e-9)) + 1
        return tuple(round(parts[0] + i * parts[2], 10) for i in range(count))
    items = [p.strip() for p in text.split(",")]
    if any(not p for p in items):
        raise ValueError("empty list entry")
    return tuple(float(_number(p)) for p in items)


def _number(text: str):
    if "/" in text:
        num, _, den = text.partition("/")
        value = Fraction(num.strip()) / Fraction(den.strip())
        return float(value)
    try:
        return int(text)
    except ValueError:
        value = float(text)
    if not math.isfinite(value):
        raise ValueError(f"{text!r} is not finite")
    return value


def _fmt(value) -> str:
    if isinstance(value, float):
        return format_float(value)
    return str(value)


def format_float(value: float) -> str:
    """Shortest locale-free text that parses back to exactly ``value``."""
    value = float(value)
    if value == 0.0:
        return "0"
    return repr(value)


def _require(ok: bool, name: str, constraint: str):
    if not ok:
        raise ConfigError(f"{name} {constraint}")
