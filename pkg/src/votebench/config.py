"""Runtime configuration: TOML file plus VOTEBENCH_* environment overrides."""

from __future__ import annotations

import os

try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib

from dataclasses import dataclass, fields
from pathlib import Path


@dataclass
class Config:
    store: str = "votebench-data/events.log"  # file path, DSN, or ":memory:"
    identity_path: str = "votebench-data/identity.json"
    mail_file: str = "votebench-data/outbox.jsonl"  # file-sink mail transport
    scheduler_period_seconds: float = 10.0
    session_ttl_hours: float = 24.0
    max_clock_skew_seconds: float = 300.0
    qv_budget: int = 100
    cumulative_points: int = 10
    bind_host: str = "127.0.0.1"
    bind_port: int = 8400
    cors_origin: str = "*"

    @classmethod
    def load(cls, path: str | Path | None = None) -> "Config":
        values: dict = {}
        if path:
            with open(path, "rb") as fh:
                values.update(tomllib.load(fh))
        for f in fields(cls):
            env = os.environ.get(f"VOTEBENCH_{f.name.upper()}")
            if env is not None:
                values[f.name] = type(getattr(cls(), f.name))(env)
        known = {f.name for f in fields(cls)}
        unknown = set(values) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**values)
