"""Search caps shared by the CLI and the attacks."""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, fields, replace

from .errors import ParameterError

CONFIG_ENV = "ICRYPT_CONFIG"

_JSON_NAMES = {"qScanMax": "q_scan_max", "degreeSweepMax": "degree_sweep_max",
               "coeffBound": "coeff_bound", "unitEnumMax": "unit_enum_max",
               "monomialCap": "monomial_cap"}


@dataclass(frozen=True)
class Config:
    q_scan_max: int = 2**20
    degree_sweep_max: int = 12
    coeff_bound: int = 3
    unit_enum_max: int = 10**6
    monomial_cap: int = 20000

    def __post_init__(self):
        for f in fields(self):
            if int(getattr(self, f.name)) < 1:
                raise ParameterError(f"config cap {f.name} must be positive")

    @classmethod
    def from_mapping(cls, data: dict) -> "Config":
        caps = data.get("caps", data)
        kw = {}
        for key, value in caps.items():
            name = _JSON_NAMES.get(key, key)
            if name not in {f.name for f in fields(cls)}:
                raise ParameterError(f"unknown config key {key!r}")
            kw[name] = int(value)
        return cls(**kw)

    def with_overrides(self, **kw) -> "Config":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


def load_config(path=None) -> Config:
    """Defaults, overridden by the JSON file at ``path`` or ``$ICRYPT_CONFIG``."""
    path = path or os.environ.get(CONFIG_ENV)
    if not path:
        return Config()
    with open(path, encoding="utf-8") as fh:
        return Config.from_mapping(json.load(fh))
