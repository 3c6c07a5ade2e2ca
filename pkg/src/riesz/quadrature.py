"""Direction/weight rules on the unit sphere S^(n-1).

* n = 2: uniform angular grid (trapezoidal rule, spectrally accurate for
  smooth periodic integrands).
* n = 3: Fibonacci lattice with equal weights.
* n >= 4: seeded Monte Carlo directions with equal weights.

Weights always sum to the sphere area sigma_{n-1}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .specfun import gamma

DEFAULT_SIZE = {2: 65536, 3: 200_000}
DEFAULT_MC_SIZE = 1_000_000


def sphere_area(n: int) -> float:
    """sigma_{n-1} = 2 pi^(n/2) / Gamma(n/2), the area of S^(n-1)."""
    if n < 1:
        raise ValueError(f"sphere dimension needs n >= 1, got {n}")
    return 2.0 * math.pi ** (n / 2.0) / gamma(n / 2.0)


@dataclass(frozen=True, eq=False)
class SphereQuadrature:
    directions: np.ndarray
    weights: np.ndarray
    kind: str = "custom"
    seed: int | None = None

    def __post_init__(self):
        d = np.asarray(self.directions, dtype=float)
        w = np.asarray(self.weights, dtype=float)
        if d.ndim != 2 or d.shape[0] != w.shape[0] or d.shape[1] < 2:
            raise ValueError("directions must be (N, n) with N matching weights")
        if np.any(w <= 0):
            raise ValueError("quadrature weights must be positive")
        if np.max(np.abs(np.linalg.norm(d, axis=1) - 1.0)) > 1e-12:
            raise ValueError("quadrature directions must be unit vectors")
        if abs(w.sum() - sphere_area(d.shape[1])) > 1e-9:
            raise ValueError("quadrature weights must sum to the sphere area")
        d.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "directions", d)
        object.__setattr__(self, "weights", w)

    @property
    def dim(self) -> int:
        return self.directions.shape[1]

    @property
    def size(self) -> int:
        return self.directions.shape[0]

    @property
    def is_random(self) -> bool:
        return self.kind == "monte-carlo"


def circle_rule(n_dirs: int = DEFAULT_SIZE[2]) -> SphereQuadrature:
    theta = 2.0 * np.pi * np.arange(n_dirs) / n_dirs
    d = np.column_stack([np.cos(theta), np.sin(theta)])
    return SphereQuadrature(d, np.full(n_dirs, 2.0 * np.pi / n_dirs), "trapezoid")


def fibonacci_rule(n_dirs: int = DEFAULT_SIZE[3]) -> SphereQuadrature:
    golden = (1.0 + 5.0 ** 0.5) / 2.0
    i = np.arange(n_dirs)
    z = 1.0 - (2.0 * i + 1.0) / n_dirs
    rho = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    phi = 2.0 * np.pi * i / golden
    d = np.column_stack([rho * np.cos(phi), rho * np.sin(phi), z])
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    return SphereQuadrature(d, np.full(n_dirs, 4.0 * np.pi / n_dirs), "fibonacci")


def monte_carlo_rule(n: int, n_dirs: int = DEFAULT_MC_SIZE, seed: int = 0) -> SphereQuadrature:
    rng = np.random.default_rng(seed)
    d = rng.standard_normal((n_dirs, n))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    return SphereQuadrature(d, np.full(n_dirs, sphere_area(n) / n_dirs), "monte-carlo", seed)


def default_rule(n: int, size: int | None = None, seed: int = 0) -> SphereQuadrature:
    """The documented default rule for dimension ``n``."""
    if n == 2:
        return circle_rule(size or DEFAULT_SIZE[2])
    if n == 3:
        return fibonacci_rule(size or DEFAULT_SIZE[3])
    if n >= 4:
        return monte_carlo_rule(n, size or DEFAULT_MC_SIZE, seed)
    raise ValueError(f"no sphere rule for n={n}")


def quadrature_error(values: np.ndarray, quad: SphereQuadrature) -> float:
    """Error estimate for ``sum(weights * values)``.

    Monte Carlo: the standard error. Deterministic rules: the difference to
    the same rule restricted to every other direction (a conservative bound).
    """
    w = quad.weights
    full = float(np.sum(w * values))
    if quad.is_random:
        area = float(w.sum())
        return area * float(np.std(values, ddof=1)) / math.sqrt(values.size)
    half = 2.0 * float(np.sum(w[::2] * values[::2])) * (w.size / (2 * ((w.size + 1) // 2)))
    return abs(full - half)
