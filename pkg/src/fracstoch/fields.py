"""Uniformly sampled scalar fields and the grids they live on."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "PeriodicGrid",
    "Field",
    "sample_on_grid",
    "kink_field",
    "lacunary_field",
]


def _is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class PeriodicGrid:
    """Periodic box [0, length)^dim sampled at ``points`` per axis.

    ``points`` must be a power of two (>= 8) so spectral operators can
    assume clean FFT sizes.
    """

    length: float
    points: int
    dim: int = 1

    def __post_init__(self) -> None:
        if not self.length > 0:
            raise ValueError(f"length must be positive, got {self.length}")
        if self.points < 8 or not _is_pow2(self.points):
            raise ValueError(f"points must be a power of two >= 8, got {self.points}")
        if self.dim not in (1, 2):
            raise ValueError(f"dim must be 1 or 2, got {self.dim}")

    @property
    def spacing(self) -> float:
        return self.length / self.points

    def coords(self) -> np.ndarray:
        return np.arange(self.points) * self.spacing


@dataclass
class Field:
    """Scalar field samples plus domain metadata.

    1D fields have shape (P,), 2D fields (P, P); samples sit at
    origin + j * spacing per axis.  Periodic fields wrap at
    origin + P * spacing.
    """

    values: np.ndarray
    spacing: float
    origin: float = 0.0
    periodic: bool = True

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim not in (1, 2):
            raise ValueError("Field supports 1D and 2D sample arrays only")
        if not self.spacing > 0:
            raise ValueError(f"spacing must be positive, got {self.spacing}")

    @property
    def dim(self) -> int:
        return self.values.ndim

    @property
    def points(self) -> int:
        return self.values.shape[0]

    @property
    def length(self) -> float:
        return self.points * self.spacing

    def coords(self) -> np.ndarray:
        return self.origin + np.arange(self.points) * self.spacing

    def copy_with(self, values: np.ndarray) -> "Field":
        return Field(values, self.spacing, self.origin, self.periodic)


def sample_on_grid(grid: PeriodicGrid, fn) -> Field:
    """Sample ``fn(*coords)`` on a periodic grid."""
    x = grid.coords()
    if grid.dim == 1:
        vals = np.asarray(fn(x), dtype=float)
    else:
        vals = np.asarray(fn(x[:, None], x[None, :]), dtype=float)
    return Field(vals, grid.spacing, 0.0, periodic=True)


def kink_field(alpha: float):
    """|sin x|^alpha: 2pi-periodic, Hoelder-alpha with kinks at multiples of pi.

    The sup-norm approximation error of a unit-mass smoothing kernel on
    this field is dominated by the kink neighbourhoods and decays like
    n^{-alpha}.
    """
    if not 0 < alpha <= 1:
        raise ValueError("alpha must be in (0, 1]")

    def fn(x):
        return np.abs(np.sin(x)) ** alpha

    return fn


def lacunary_field(alpha: float, seed: int = 0, levels: int = 10):
    """Random-phase lacunary sum  sum_j 2^{-j alpha} cos(2^j x + theta_j).

    Uniformly Hoelder-alpha (rough at every point), so its L2
    mollification error decays like n^{-alpha}; an isolated kink would
    instead give the faster n^{-alpha-1/2}.
    """
    if not 0 < alpha < 1:
        raise ValueError("alpha must be in (0, 1)")
    rng = np.random.default_rng(seed)
    thetas = rng.uniform(0.0, 2.0 * np.pi, size=levels)
    js = np.arange(levels)

    def fn(x):
        x = np.asarray(x, dtype=float)
        acc = np.zeros_like(x)
        for j, theta in zip(js, thetas):
            acc += 2.0 ** (-j * alpha) * np.cos(2.0**j * x + theta)
        return acc

    return fn
