"""Experiment configuration and the JSON encoding of constraint sets.

A constraint is a tagged JSON object, for example::

    {"type": "nonnegative"}
    {"type": "box", "lo": 0, "hi": 1}
    {"type": "fixed_entries", "mask_csv": "mask.csv", "values_csv": "vals.csv"}
    {"type": "fixed_entries", "entries": [[0, 0, 7.0]]}
    {"type": "hankel"} / {"type": "toeplitz"} / {"type": "psd"}
    {"type": "trace_hyperplane", "A": [[1, 0], [0, 1]], "b": 2}
    {"type": "trace_halfspace", "A_csv": "F1.csv", "b": 0.5}
    {"type": "intersection", "sets": [...], "tol": 1e-8, "max_sweeps": 1000}
    {"type": "unconstrained"}

Relative CSV paths are resolved against the config file's directory.
"""
import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .. import constraints as cs
from ..errors import ValidationError
from .io import read_matrix_csv

EXPERIMENTS = ("solve", "nonneg", "rho_sweep", "denoise", "fixed_points", "fsr_sdpr")

# Per-experiment defaults, applied to fields left as None.
DEFAULTS = {
    "solve": dict(rank_bound=1, rho=5.0),
    "nonneg": dict(m=100, n=80, ranks=[3, 6, 10], rho=5.0),
    "rho_sweep": dict(m=100, n=80, rank_bound=5, rho_list=[1.0, 5.0, 9.0, 15.0]),
    "denoise": dict(m=100, n=200, rank_bound=5, rho=20.0, noise_sigma=380.0,
                    pin_fraction=0.05, max_iters=5000),
    "fixed_points": dict(m=6, n=5, rank_bound=2, rho=5.0, order="rank_first"),
    "fsr_sdpr": dict(rank_bound=1, rho=5.0),
}


@dataclass
class ExperimentConfig:
    experiment: str = "solve"
    m: int = None
    n: int = None
    rank_bound: int = None
    ranks: list = None
    rho: float = None
    rho_list: list = None
    seed: int = 0
    noise_sigma: float = None
    pin_fraction: float = None
    input_image: str = None
    target: str = None
    constraint: dict = None
    output_dir: str = "out"
    order: str = None
    primal_tol: float = None
    dual_change_tol: float = None
    max_iters: int = None
    residual_threshold: float = 1e-4
    nmf_max_iters: int = 2000
    adp_max_iters: int = 2000
    require_convergence: bool = False
    base_dir: str = field(default=".", repr=False)

    def resolved(self):
        """Copy with experiment defaults filled in and fields validated."""
        if self.experiment not in EXPERIMENTS:
            raise ValidationError(f"unknown experiment {self.experiment!r}; "
                                  f"choose from {', '.join(EXPERIMENTS)}")
        values = dataclasses.asdict(self)
        for key, value in DEFAULTS[self.experiment].items():
            if values.get(key) is None:
                values[key] = value
        cfg = ExperimentConfig(**values)
        cfg._validate()
        return cfg

    def _validate(self):
        for name in ("m", "n", "rank_bound", "max_iters"):
            v = getattr(self, name)
            if v is not None and (int(v) != v or v < 1):
                raise ValidationError(f"{name} must be a positive integer, got {v}")
        for name in ("rho", "primal_tol", "dual_change_tol", "residual_threshold"):
            v = getattr(self, name)
            if v is not None and not v > 0:
                raise ValidationError(f"{name} must be positive, got {v}")
        if self.noise_sigma is not None and self.noise_sigma < 0:
            raise ValidationError("noise_sigma must be non-negative")
        if self.pin_fraction is not None and not 0.0 <= self.pin_fraction <= 1.0:
            raise ValidationError("pin_fraction must lie in [0, 1]")
        for name in ("ranks", "rho_list"):
            v = getattr(self, name)
            if v is not None and (not v or any(x <= 0 for x in v)):
                raise ValidationError(f"{name} must be a non-empty list of positive numbers")

    def path(self, value):
        p = Path(value)
        return p if p.is_absolute() else Path(self.base_dir) / p

    def solver_overrides(self):
        keys = ("order", "primal_tol", "dual_change_tol", "max_iters")
        return {k: getattr(self, k) for k in keys if getattr(self, k) is not None}


def load_config(path=None, **overrides):
    """Read a JSON config (if given) and apply non-None ``overrides`` on top."""
    data = {}
    base_dir = "."
    if path is not None:
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ValidationError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ValidationError("config file must hold a JSON object")
        base_dir = str(Path(path).parent)
    data.update({k: v for k, v in overrides.items() if v is not None})
    data.setdefault("base_dir", base_dir)
    known = {f.name for f in dataclasses.fields(ExperimentConfig)}
    unknown = set(data) - known
    if unknown:
        raise ValidationError(f"unknown config fields: {sorted(unknown)}")
    return ExperimentConfig(**data)


def _matrix(obj, key, cfg):
    if key in obj:
        return np.asarray(obj[key], dtype=float)
    if key + "_csv" in obj:
        return read_matrix_csv(cfg.path(obj[key + "_csv"]))
    raise ValidationError(f"constraint needs {key!r} or {key + '_csv'!r}")


def constraint_from_json(obj, cfg=None, shape=None):
    """Build a ConstraintSpec from its tagged JSON form."""
    cfg = cfg or ExperimentConfig()
    if not isinstance(obj, dict) or "type" not in obj:
        raise ValidationError(f"constraint must be an object with a 'type' field: {obj!r}")
    kind = obj["type"].lower()
    if kind == "unconstrained":
        return cs.Unconstrained()
    if kind == "nonnegative":
        return cs.NonNegative()
    if kind == "box":
        lo = _matrix(obj, "lo", cfg) if "lo_csv" in obj else obj.get("lo", 0.0)
        hi = _matrix(obj, "hi", cfg) if "hi_csv" in obj else obj.get("hi", 1.0)
        return cs.Box(lo, hi)
    if kind == "fixed_entries":
        if "entries" in obj:
            if shape is None:
                raise ValidationError("fixed_entries given as a list needs the target shape")
            return cs.FixedEntries.from_entries(shape, obj["entries"])
        mask = _matrix(obj, "mask", cfg) != 0
        return cs.FixedEntries(mask, _matrix(obj, "values", cfg))
    if kind == "hankel":
        return cs.HankelStructure()
    if kind == "toeplitz":
        return cs.ToeplitzStructure()
    if kind == "psd":
        return cs.PsdCone()
    if kind == "trace_hyperplane":
        return cs.TraceHyperplane(_matrix(obj, "A", cfg), obj["b"])
    if kind == "trace_halfspace":
        return cs.TraceHalfSpace(_matrix(obj, "A", cfg), obj["b"])
    if kind == "intersection":
        sets = [constraint_from_json(s, cfg, shape) for s in obj.get("sets", [])]
        return cs.Intersection(tuple(sets),
                               tol=obj.get("tol", cs.DYKSTRA_TOL),
                               max_sweeps=obj.get("max_sweeps", cs.DYKSTRA_MAX_SWEEPS))
    raise ValidationError(f"unknown constraint type {obj['type']!r}")
