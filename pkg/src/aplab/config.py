"""Run configuration shared by the CLI, the suites and the curve samplers."""

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import InvalidArgument


@dataclass(frozen=True)
class RunConfig:
    # computational window [-window_X, window_X]; a power of two keeps grids
    # aligned with the dyadic lattice rooted at the window
    window_X: float = 2.0**20
    per_octave: int = 8
    near_zero_octaves: int = 24
    # deep enough that every cell of the default grid is a lattice cube
    lattice_depth: int = 48
    quad_tol: float = 1e-8
    rdf_terms: int = 40
    rdf_bound_rule: str = "2p/(p-1)"
    # log-scale sampling used by the tail-sensitive curve samplers
    log_window: float = 2600.0
    log_step: float = 0.5
    sharp_delta: float = 0.5
    c_H: float = field(default=0.3183098861837907)  # 1/pi
    seed: int = 20160601
    out_dir: str = "out"
    jobs: int = 1

    def __post_init__(self):
        if not self.window_X > 0:
            raise InvalidArgument("window_X must be positive")
        for name in ("quad_tol", "log_window", "log_step", "c_H"):
            if not getattr(self, name) > 0:
                raise InvalidArgument(f"{name} must be > 0")
        for name in ("per_octave", "near_zero_octaves", "lattice_depth", "rdf_terms", "jobs"):
            if int(getattr(self, name)) < 1:
                raise InvalidArgument(f"{name} must be a positive integer")
        if not 0 < self.sharp_delta <= 1:
            raise InvalidArgument("sharp_delta must lie in (0, 1]")

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def to_dict(self):
        return dataclasses.asdict(self)

    def fingerprint(self):
        """Short hash of every field that influences numerical output."""
        d = self.to_dict()
        d.pop("out_dir")
        d.pop("jobs")
        blob = json.dumps(d, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    @classmethod
    def from_json(cls, path):
        data = json.loads(Path(path).read_text())
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise InvalidArgument(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)


DEFAULT = RunConfig()


def bound_Bp(p, rule=DEFAULT.rdf_bound_rule):
    """Upper bound used in place of the operator norm of M on L^p."""
    if p <= 1:
        raise InvalidArgument("bound_Bp needs p > 1")
    if rule == "2p/(p-1)":
        return 2.0 * p / (p - 1.0)
    raise InvalidArgument(f"unknown bound rule {rule!r}")
