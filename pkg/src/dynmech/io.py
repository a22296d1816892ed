"""JSON instance and result files.

Python's ``json`` writes floats with ``repr``, the shortest string that
round-trips exactly, so revenues survive a write/read cycle bit for bit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .dist import DiscreteDistribution

SCHEMA_VERSION = 1


class InstanceError(ValueError):
    """An instance file is malformed or describes an invalid distribution."""


@dataclass
class Settings:
    delta_prime: float = 0.01
    alpha_grid: int = 1000
    markov_delta: float = 0.9
    seed: int = 0

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class Instance:
    periods: list[DiscreteDistribution]
    agents: list[list[DiscreteDistribution]] | None = None
    settings: Settings = field(default_factory=Settings)

    def to_dict(self) -> dict:
        out = {"schema_version": SCHEMA_VERSION,
               "periods": [d.to_dict() for d in self.periods],
               "settings": self.settings.to_dict()}
        if self.agents is not None:
            out["agents"] = [[d.to_dict() for d in a] for a in self.agents]
        return out


def parse_instance(data: dict) -> Instance:
    try:
        version = data["schema_version"]
    except (KeyError, TypeError) as exc:
        raise InstanceError("missing schema_version") from exc
    if version != SCHEMA_VERSION:
        raise InstanceError(f"unsupported schema_version {version!r}")
    try:
        periods = [DiscreteDistribution.from_dict(p) for p in data["periods"]]
        agents = None
        if data.get("agents") is not None:
            agents = [[DiscreteDistribution.from_dict(p) for p in a] for a in data["agents"]]
        raw = data.get("settings", {}) or {}
        unknown = set(raw) - set(Settings().to_dict())
        if unknown:
            raise InstanceError(f"unknown settings {sorted(unknown)}")
        settings = Settings(**raw)
    except InstanceError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise InstanceError(str(exc)) from exc
    if not periods:
        raise InstanceError("an instance needs at least one period")
    return Instance(periods, agents, settings)


def load_instance(path) -> Instance:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InstanceError(f"cannot read instance {path}: {exc}") from exc
    return parse_instance(data)


def save_json(data: dict, path) -> None:
    Path(path).write_text(json.dumps(data, indent=2, allow_nan=False) + "\n")


def load_json(path) -> dict:
    return json.loads(Path(path).read_text())
