"""Verification report record and its JSON/CSV encodings."""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np

SCHEMA = 1
ANALYTIC_TOL = 1e-9
GRID_TOL = 5e-3


def _encode(value):
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, np.ndarray):
        return [_encode(v) for v in value.tolist()]
    if isinstance(value, dict):
        return {k: _encode(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_encode(v) for v in value]
    return value


def _decode_float(value) -> float:
    return float(value)  # float("-inf") handles the string encodings


def digest(payload) -> str:
    """Stable sha256 over a JSON-able description of the inputs."""
    blob = json.dumps(_encode(payload), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


@dataclass
class VerificationReport:
    relation: str
    n: int
    N: int
    lhs: float
    bound: float
    tolerance: float = ANALYTIC_TOL
    path: str = "analytic"
    inputs_digest: str = ""
    wall_time: float = 0.0
    diagnostics: dict = field(default_factory=dict)
    # det K = 0 with a finite bound (the covariance relation's bound is then 0)
    degenerate: bool = False

    @property
    def slack(self) -> float:
        return self.lhs - self.bound

    @property
    def vacuous(self) -> bool:
        return self.degenerate or self.bound == -np.inf

    @property
    def status(self) -> str:
        if self.vacuous:
            return "vacuous"
        return "pass" if self.slack >= -self.tolerance else "violation"

    def to_dict(self, timing: bool = True) -> dict:
        out = {
            "schema": SCHEMA,
            "relation": self.relation,
            "n": self.n,
            "N": self.N,
            "lhs": _encode(self.lhs),
            "bound": _encode(self.bound),
            "slack": _encode(self.slack),
            "status": self.status,
            "tolerance": self.tolerance,
            "path": self.path,
            "diagnostics": _encode(self.diagnostics),
            "inputs_digest": self.inputs_digest,
        }
        if timing:
            out["wall_time"] = self.wall_time
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "VerificationReport":
        return cls(
            relation=data["relation"],
            n=int(data["n"]),
            N=int(data["N"]),
            lhs=_decode_float(data["lhs"]),
            bound=_decode_float(data["bound"]),
            tolerance=float(data.get("tolerance", ANALYTIC_TOL)),
            path=data.get("path", "analytic"),
            inputs_digest=data.get("inputs_digest", ""),
            wall_time=float(data.get("wall_time", 0.0)),
            diagnostics=data.get("diagnostics", {}),
            degenerate=data.get("status") == "vacuous",
        )

    def to_json(self, timing: bool = True) -> str:
        return json.dumps(self.to_dict(timing), indent=2, sort_keys=True)


CSV_FIELDS = ["param", "relation", "n", "N", "lhs", "bound", "slack", "status", "path", "inputs_digest", "error"]
