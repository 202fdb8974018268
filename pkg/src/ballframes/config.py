"""Experiment configuration (JSON on disk)."""
from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .bergman import HoloFunction, psi
from .errors import ConfigError


@dataclass
class ExperimentConfig:
    n: int = 1
    sigma: float = 3.0
    alpha: float = 0.0
    p: float = 2.0
    epsilon: float = 0.1
    box_radius: float = 1.5
    K: int = 8
    quadrature: dict = field(default_factory=dict)  # optional R, M, L
    atom: object = "psi"  # "psi" or a list of {"gamma", "re", "im"} terms
    seed: int = 0
    output: str = "out"
    capacity: int = 200_000
    solver: str = "spectral"

    def __post_init__(self):
        self.validate()

    def validate(self) -> "ExperimentConfig":
        errs = {}
        if not isinstance(self.n, int) or isinstance(self.n, bool) or self.n < 1:
            errs["n"] = "must be a positive integer"
        nums = {"sigma": self.sigma, "alpha": self.alpha, "p": self.p,
                "epsilon": self.epsilon, "box_radius": self.box_radius}
        for k, v in nums.items():
            if not isinstance(v, (int, float)) or isinstance(v, bool) or not math.isfinite(v):
                errs[k] = "must be a finite number"
        if errs:
            raise ConfigError(errs)
        n = self.n
        if not self.sigma > n:
            errs["sigma"] = f"must exceed n={n}"
        if not 1 <= self.p:
            errs["p"] = "must be >= 1"
        upper = self.p * (self.sigma - n) - 1
        if not -1 < self.alpha < upper:
            errs["alpha"] = f"need -1 < alpha < p(sigma-n)-1 = {upper:g}"
        if not self.epsilon > 0:
            errs["epsilon"] = "must be positive"
        if not self.box_radius >= 0:
            errs["box_radius"] = "must be non-negative"
        if not isinstance(self.K, int) or isinstance(self.K, bool) or self.K < 0:
            errs["K"] = "must be a non-negative integer"
        bad_q = [k for k in self.quadrature if k not in ("R", "M", "L")]
        if bad_q:
            errs["quadrature"] = f"unknown keys {bad_q}"
        elif any(not isinstance(v, int) or v < 1 for v in self.quadrature.values()):
            errs["quadrature"] = "orders must be positive integers"
        if self.atom != "psi":
            try:
                self.atom_function()
            except (ConfigError, KeyError, TypeError, ValueError) as exc:
                errs["atom"] = f"must be 'psi' or a term list ({exc})"
        if not isinstance(self.seed, int):
            errs["seed"] = "must be an integer"
        if self.solver not in ("spectral", "cg"):
            errs["solver"] = "must be 'spectral' or 'cg'"
        if errs:
            raise ConfigError(errs)
        return self

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - names)
        if unknown:
            raise ConfigError({k: "unknown field" for k in unknown})
        return cls(**data)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError({"config": str(exc)}) from exc
        if not isinstance(data, dict):
            raise ConfigError({"config": "top level must be an object"})
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def replace(self, **kw) -> "ExperimentConfig":
        return dataclasses.replace(self, **kw)

    def atom_function(self) -> HoloFunction:
        if self.atom == "psi":
            return psi(self.n)
        return function_from_terms(self.atom, self.n)

    def quadrature_orders(self, degree: int):
        """(R, M, L) from the config, defaulting to a rule exact for ``degree``."""
        R = self.quadrature.get("R", degree // 2 + 1)
        return R, self.quadrature.get("M", degree + 1), self.quadrature.get("L", R)


def function_from_terms(terms, n: int | None = None) -> HoloFunction:
    """Polynomial from [{"gamma": [...], "re": x, "im": y}, ...]."""
    if not isinstance(terms, list) or not terms:
        raise ConfigError({"function": "expected a non-empty list of terms"})
    coeffs = {}
    for t in terms:
        g = tuple(int(k) for k in t["gamma"])
        coeffs[g] = coeffs.get(g, 0) + complex(float(t.get("re", 0.0)), float(t.get("im", 0.0)))
    dims = {len(g) for g in coeffs}
    if len(dims) != 1 or (n is not None and dims != {n}):
        raise ConfigError({"function": f"multi-indices must all have length n={n}"})
    return HoloFunction(dims.pop(), coeffs)


def load_function(path, n: int | None = None) -> HoloFunction:
    data = json.loads(Path(path).read_text())
    terms = data["terms"] if isinstance(data, dict) else data
    return function_from_terms(terms, n)
