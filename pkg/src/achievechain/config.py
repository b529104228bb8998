"""Service configuration: built-in defaults, JSON config file, flag overrides.

Precedence is strict and tested per field: flag > config file > default.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, fields
from pathlib import Path

from .ledger import LedgerConfig


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class ServiceConfig:
    difficulty: int = 3
    capacity: int = 4            # transactions per block
    node_count: int = 3
    round_interval: float = 1.0  # seconds between scheduler rounds while serving
    reset_ttl: int = 8           # rounds a reset token stays usable
    session_ttl: int = 10000     # rounds a session may sit idle
    faucet_amount: int = 100     # fee units granted to a newly registered university
    tx_fee: int = 1              # gas fee the service attaches to its transactions
    data_dir: str | None = None
    port: int = 8140
    seed: int = 0
    admin_user: str = "admin"
    admin_secret: str = "admin-secret"

    def __post_init__(self):
        # LedgerConfig re-checks its own fields; surface those errors early.
        self.ledger_config()
        if self.reset_ttl < 1:
            raise ConfigError("reset_ttl must be >= 1")
        if self.tx_fee < 1:
            raise ConfigError("tx_fee must be >= 1")
        if self.faucet_amount < 0:
            raise ConfigError("faucet_amount must be >= 0")

    def ledger_config(self) -> LedgerConfig:
        try:
            return LedgerConfig(
                difficulty=self.difficulty,
                capacity=self.capacity,
                node_count=self.node_count,
                seed=self.seed,
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc


CONFIG_FIELDS = tuple(f.name for f in fields(ServiceConfig))


def load_config(path: str | None = None, overrides: dict | None = None) -> ServiceConfig:
    """Merge file values under flag overrides; None overrides mean 'not given'."""
    values: dict = {}
    if path is not None:
        file_path = Path(path)
        if not file_path.exists():
            raise ConfigError(f"config file not found: {file_path}")
        try:
            loaded = json.loads(file_path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {file_path} is not valid JSON: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ConfigError(f"config file {file_path} must hold a JSON object")
        for key in loaded:
            if key not in CONFIG_FIELDS:
                raise ConfigError(f"unknown config key {key!r} in {file_path}")
        values.update(loaded)
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key not in CONFIG_FIELDS:
            raise ConfigError(f"unknown config override {key!r}")
        values[key] = value
    try:
        return ServiceConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
