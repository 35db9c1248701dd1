"""JSON run configuration for the command-line front end."""
from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from pathlib import Path

from .bathymetry import BathymetryProfile
from .errors import ConfigError
from .fourier import Truncation
from .dno import MAX_ORDER


@dataclass
class RunConfig:
    h: float = 1.0
    eps: float = 0.0
    c0: float = 1e-3
    preset: str | None = None
    beta: list | None = None           # [[k, re, im], ...]
    N: int = 24
    order: int = 4
    theta_points: int = 257
    n_max: int = 5
    # gap-scan / gap-scaling
    eps_ladder: list | None = None
    gaps: list = field(default_factory=lambda: [1, 2])
    synthetic_widths: list | None = None
    # validate-oracle / evolve
    theta: float = 0.0
    psi: list | None = None
    seed: int = 0
    oracle_nx: int = 128
    oracle_nsigma: int = 48
    richardson: bool = True
    # evolve
    g: float = 1.0
    eta0: list | None = None
    eta1: list | None = None
    times: list | None = None
    grid_size: int = 64

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        cfg = cls(**data)
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path) -> "RunConfig":
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from None
        return cls.from_dict(data)

    def validate(self):
        self.profile()
        Truncation(self.N)
        if not isinstance(self.order, int) or not 1 <= self.order <= MAX_ORDER:
            raise ConfigError(f"order must be an integer in 1..{MAX_ORDER}")
        if not isinstance(self.n_max, int) or self.n_max < 1:
            raise ConfigError("n_max must be a positive integer")
        if not isinstance(self.theta_points, int) or self.theta_points < 3 or self.theta_points % 2 == 0:
            raise ConfigError("theta_points must be an odd integer >= 3")
        if self.eps_ladder is not None:
            if any(not isinstance(e, (int, float)) or e <= 0 for e in self.eps_ladder):
                raise ConfigError("eps_ladder entries must be positive numbers")
            for e in self.eps_ladder:
                self.profile(eps=e)
        if any(not isinstance(n, int) or n < 1 for n in self.gaps):
            raise ConfigError("gaps must be positive integers")
        if self.g <= 0:
            raise ConfigError("gravity g must be positive")
        if self.grid_size < 2 * self.N + 2:
            raise ConfigError(f"grid_size must be >= 2N+2 = {2 * self.N + 2}")
        if self.times is not None and any(not isinstance(t, (int, float)) for t in self.times):
            raise ConfigError("times must be numbers")
        for name in ("psi", "eta0", "eta1"):
            trip = getattr(self, name)
            if trip is not None:
                for t in trip:
                    if not (isinstance(t, (list, tuple)) and len(t) == 3) or abs(int(t[0])) > self.N:
                        raise ConfigError(f"{name} entries must be [k, re, im] with |k| <= N")

    def profile(self, eps: float | None = None) -> BathymetryProfile:
        eps = self.eps if eps is None else eps
        if (self.preset is None) == (self.beta is None):
            raise ConfigError("give exactly one of 'preset' or 'beta'")
        if self.preset is not None:
            return BathymetryProfile.preset(self.preset, self.h, eps, self.c0)
        return BathymetryProfile.from_triples(self.beta, self.h, eps, self.c0)
