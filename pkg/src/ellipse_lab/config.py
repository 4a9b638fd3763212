"""Run configuration with lossless JSON round trip and a stable hash."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field, fields

from .billiard import EPS_SEP


@dataclass(frozen=True)
class RunConfig:
    a: float = math.sqrt(2.0)
    b: float = 1.0
    quad_tol: float = 1e-13
    root_tol: float = 1e-13
    eps_sep: float = EPS_SEP
    threads: int = 1
    out: str | None = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("quad_tol", "root_tol", "eps_sep"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be positive")
        if self.threads < 1:
            raise ValueError("threads must be at least 1")

    def to_json(self) -> str:
        # repr-exact floats keep the round trip lossless
        return json.dumps(asdict(self), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        data = json.loads(text)
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    def canonical_json(self) -> str:
        """JSON of everything that can change results (no output path or thread count)."""
        data = asdict(self)
        data.pop("out")
        data.pop("threads")
        return json.dumps(data, sort_keys=True, separators=(",", ":"))

    @property
    def hash(self) -> str:
        return hashlib.sha256(self.canonical_json().encode()).hexdigest()
