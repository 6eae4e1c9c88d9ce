"""Experiment configuration and its flat ``key = value`` file format.

Recognised keys (lists are comma-separated)::

    conditions  = sin, abs-sin-1/2, exp-abs
    operators   = G, S
    t           = 0.5
    n_max       = 11
    grid_count  = 1000
    output_dir  = results
    exclude     = abs-sin-3/2:G:1 ; abs-sin-5/2:S:1,2

``exclude`` holds ``CONDITION:OPERATOR:n1,n2`` items separated by ``;`` and
may be repeated on several lines. An empty n-list (``sin:G:``) clears the
default exclusion for that pair. Lines starting with ``#`` are comments.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Mapping

from .chernoff import get_operator
from .errors import ConfigError
from .functions import catalog, get_condition

__all__ = ["ExperimentConfig", "DEFAULT_EXCLUSIONS", "parse_exclusion", "load_config_file"]

# pre-asymptotic n values left out of each log-log regression by default
DEFAULT_EXCLUSIONS: dict[tuple[str, str], frozenset[int]] = {
    ("abs-sin-3/2", "G"): frozenset({1}),
    ("abs-sin-5/2", "G"): frozenset({1, 2}),
    ("abs-sin-5/2", "S"): frozenset({1, 2}),
    ("abs-sin-7/2", "G"): frozenset({1, 2}),
    ("abs-sin-7/2", "S"): frozenset({1, 2}),
    ("abs-sin-9/2", "G"): frozenset({1, 2}),
}


@dataclass(frozen=True)
class ExperimentConfig:
    conditions: tuple[str, ...] = field(default_factory=lambda: tuple(c.name for c in catalog()))
    operators: tuple[str, ...] = ("G", "S")
    t: float = 0.5
    n_max: int = 11
    grid_count: int = 1000
    exclusions: Mapping[tuple[str, str], frozenset[int]] = field(
        default_factory=lambda: dict(DEFAULT_EXCLUSIONS)
    )
    output_dir: Path = Path("results")

    def __post_init__(self):
        object.__setattr__(self, "conditions", tuple(self.conditions))
        object.__setattr__(self, "operators", tuple(self.operators))
        object.__setattr__(self, "output_dir", Path(self.output_dir))
        self.validate()

    def validate(self) -> None:
        if not self.t > 0:
            raise ConfigError(f"t must be positive, got {self.t!r}")
        if self.n_max < 3:
            raise ConfigError(f"n_max must be >= 3, got {self.n_max}")
        if self.grid_count < 2:
            raise ConfigError(f"grid_count must be >= 2, got {self.grid_count}")
        if not self.conditions or not self.operators:
            raise ConfigError("need at least one condition and one operator")
        for name in self.conditions:
            try:
                get_condition(name)
            except KeyError as exc:
                raise ConfigError(exc.args[0]) from None
        for name in self.operators:
            try:
                get_operator(name)
            except KeyError as exc:
                raise ConfigError(exc.args[0]) from None
        for cond, op in self.exclusions:
            try:
                get_condition(cond)
                get_operator(op)
            except KeyError as exc:
                raise ConfigError(f"exclusion {cond}:{op}: {exc.args[0]}") from None

    def excluded(self, condition: str, operator: str) -> frozenset[int]:
        return frozenset(self.exclusions.get((condition, operator), frozenset()))

    @property
    def n_range(self) -> list[int]:
        return list(range(1, self.n_max + 1))

    def with_overrides(self, **values) -> "ExperimentConfig":
        """Copy with the non-None ``values`` replaced; ``exclude`` items are merged."""
        extra = values.pop("exclude", None) or ()
        values = {k: v for k, v in values.items() if v is not None}
        exclusions = dict(self.exclusions)
        for item in extra:
            key, ns = parse_exclusion(item)
            exclusions[key] = ns
        return replace(self, exclusions=exclusions, **values)


def _split_list(text: str) -> tuple[str, ...]:
    return tuple(part.strip() for part in text.split(",") if part.strip())


def parse_exclusion(item: str) -> tuple[tuple[str, str], frozenset[int]]:
    """Parse ``COND:OP:n1,n2`` into ``((COND, OP), {n1, n2})``."""
    parts = item.strip().rsplit(":", 2)
    if len(parts) != 3 or not parts[0] or not parts[1]:
        raise ConfigError(f"exclusion must look like COND:OP:n1,n2, got {item!r}")
    cond, op, ns = parts
    try:
        values = frozenset(int(v) for v in _split_list(ns))
    except ValueError:
        raise ConfigError(f"exclusion n-list must be integers, got {ns!r}") from None
    return (cond.strip(), op.strip()), values


def _parse_scalar(key, text, kind):
    try:
        return kind(text)
    except ValueError:
        raise ConfigError(f"{key} must be {kind.__name__}, got {text!r}") from None


def _parse_lines(lines: Iterable[str], source: str) -> dict:
    values: dict = {}
    excludes: list[str] = []
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw.rstrip()!r}")
        key, _, value = (s.strip() for s in line.partition("="))
        if key in ("conditions", "operators"):
            values[key] = _split_list(value)
        elif key == "t":
            values[key] = _parse_scalar(key, value, float)
        elif key in ("n_max", "grid_count"):
            values[key] = _parse_scalar(key, value, int)
        elif key == "output_dir":
            values[key] = Path(value)
        elif key == "exclude":
            excludes.extend(part for part in value.split(";") if part.strip())
        else:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
    if excludes:
        values["exclude"] = excludes
    return values


def load_config_file(path) -> dict:
    """Read a config file into override values for :meth:`ExperimentConfig.with_overrides`."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc.strerror}") from None
    return _parse_lines(text.splitlines(), str(path))
