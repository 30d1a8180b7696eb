"""Caputo derivative, fractional Sobolev norms, and spectral (-Lap)^s.

The Caputo derivative of order alpha in (0, 1) with lower limit a,

    D^alpha f(x) = (1/Gamma(1-alpha)) * int_a^x f'(t) (x - t)^{-alpha} dt,

is discretized with the classical L1 scheme on a uniform grid.  The
fractional Laplacian acts on periodic fields as the Fourier multiplier
|xi|^{2s} with the zero mode annihilated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fields import Field

__all__ = [
    "FracOrder",
    "TimeGrid",
    "gamma_fn",
    "mittag_leffler",
    "caputo_l1",
    "gagliardo_seminorm",
    "frac_sobolev_norm",
    "frac_laplacian",
]


@dataclass(frozen=True)
class FracOrder:
    """Fractional order alpha, strictly inside (0, 1)."""

    alpha: float

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie strictly in (0, 1), got {self.alpha}")


def _alpha_of(alpha) -> float:
    return alpha.alpha if isinstance(alpha, FracOrder) else FracOrder(float(alpha)).alpha


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid on [t0, t1] with ``steps`` intervals (steps+1 nodes)."""

    t0: float
    t1: float
    steps: int

    def __post_init__(self) -> None:
        if not self.t1 > self.t0:
            raise ValueError(f"need t1 > t0, got [{self.t0}, {self.t1}]")
        if self.steps < 2:
            raise ValueError(f"steps must be >= 2, got {self.steps}")

    @property
    def h(self) -> float:
        return (self.t1 - self.t0) / self.steps

    def nodes(self) -> np.ndarray:
        return self.t0 + self.h * np.arange(self.steps + 1)


def gamma_fn(x: float) -> float:
    """Gamma function on (0, inf); rejects nonpositive arguments."""
    x = float(x)
    if not x > 0:
        raise ValueError(f"gamma_fn requires a positive argument, got {x}")
    return math.gamma(x)


def mittag_leffler(alpha, z: float, tol: float = 1e-12, max_terms: int = 1000) -> float:
    """E_alpha(z) = sum_j z^j / Gamma(alpha j + 1) for z <= 0.

    Kahan-compensated series with a monitored alternating tail; raises
    when cancellation would push the absolute error above ~1e-10.
    """
    a = _alpha_of(alpha)
    z = float(z)
    if z > 0:
        raise ValueError("mittag_leffler is restricted to the decay regime z <= 0")
    if z == 0.0:
        return 1.0

    total = 0.0
    comp = 0.0
    max_abs = 0.0
    log_absz = math.log(-z)
    prev_abs = math.inf
    decreasing = 0
    for j in range(max_terms):
        log_term = j * log_absz - math.lgamma(a * j + 1.0)
        term_abs = math.exp(log_term)
        term = term_abs if j % 2 == 0 else -term_abs
        # Kahan step
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
        max_abs = max(max_abs, term_abs)
        if max_abs > 1e5:
            raise ValueError(
                f"series for E_alpha({a}, {z}) loses too many digits to cancellation"
            )
        decreasing = decreasing + 1 if term_abs < prev_abs else 0
        prev_abs = term_abs
        # alternating + decreasing => remainder bounded by next term
        if decreasing >= 3 and term_abs < tol:
            return total
    raise ValueError(f"series for E_alpha({a}, {z}) did not converge in {max_terms} terms")


def caputo_l1(f: np.ndarray, grid: TimeGrid, alpha) -> np.ndarray:
    """L1-scheme Caputo derivative of samples ``f`` on ``grid``.

    Node j carries  h^{-alpha}/Gamma(2-alpha) * sum_i b_{j-1-i} (f_{i+1}-f_i)
    with b_r = (r+1)^{1-alpha} - r^{1-alpha}; node 0 is 0 by convention.
    Exact for affine f; O(h^{2-alpha}) for C^2 integrands.
    """
    a = _alpha_of(alpha)
    f = np.asarray(f, dtype=float)
    if f.ndim != 1 or f.size < 2:
        raise ValueError("caputo_l1 needs a 1D array with at least 2 samples")
    if f.size != grid.steps + 1:
        raise ValueError(f"expected {grid.steps + 1} samples for this grid, got {f.size}")

    h = grid.h
    m = grid.steps
    r = np.arange(m, dtype=float)
    b = (r + 1.0) ** (1.0 - a) - r ** (1.0 - a)
    df = np.diff(f)
    out = np.zeros(m + 1)
    # (df * b)[j-1] = sum_i df_i b_{j-1-i}
    out[1:] = np.convolve(df, b)[:m] * h ** (-a) / math.gamma(2.0 - a)
    return out


def gagliardo_seminorm(f: np.ndarray, x: np.ndarray, alpha, chunk: int = 512) -> float:
    """Discrete sup of |f(xi) - f(xj)| / |xi - xj|^alpha over sample pairs.

    A lower bound for the true Hoelder-alpha seminorm; tightens as the
    sampling refines.
    """
    a = _alpha_of(alpha)
    f = np.asarray(f, dtype=float)
    x = np.asarray(x, dtype=float)
    if f.shape != x.shape or f.ndim != 1:
        raise ValueError("f and x must be 1D arrays of equal length")
    if f.size < 2:
        raise ValueError("need at least 2 samples")

    best = 0.0
    for lo in range(0, f.size - 1, chunk):
        hi = min(lo + chunk, f.size - 1)
        # pairs (i, j) with lo <= i < hi, j > i
        fi = f[lo:hi, None]
        xi = x[lo:hi, None]
        num = np.abs(f[None, lo + 1 :] - fi[:, : f.size - lo - 1])
        den = np.abs(x[None, lo + 1 :] - xi[:, : f.size - lo - 1])
        mask = den > 0
        if np.any(mask):
            best = max(best, float(np.max(num[mask] / den[mask] ** a)))
    return best


def frac_sobolev_norm(f: np.ndarray, grid: TimeGrid, alpha) -> float:
    """W^{alpha,inf} norm: max |f| plus max |Caputo L1 derivative|."""
    f = np.asarray(f, dtype=float)
    d = caputo_l1(f, grid, alpha)
    return float(np.max(np.abs(f)) + np.max(np.abs(d)))


def _wavenumbers(points: int, length: float) -> np.ndarray:
    return 2.0 * np.pi * np.fft.rfftfreq(points, d=length / points)


def frac_laplacian(u: Field, s: float) -> Field:
    """Spectral (-Lap)^s on a periodic field: multiply mode xi by |xi|^{2s}.

    The zero mode maps to 0, so constants are annihilated.  Output is real
    by construction (rfft round trip).
    """
    if not s > 0:
        raise ValueError(f"s must be positive, got {s}")
    if not u.periodic:
        raise ValueError("frac_laplacian requires a periodic field")
    P = u.points
    if P < 8 or (P & (P - 1)) != 0:
        raise ValueError(f"grid size must be a power of two >= 8, got {P}")

    if u.dim == 1:
        xi = _wavenumbers(P, u.length)
        mult = np.zeros_like(xi)
        mult[1:] = xi[1:] ** (2.0 * s)
        out = np.fft.irfft(np.fft.rfft(u.values) * mult, n=P)
    else:
        if u.values.shape[1] != P:
            raise ValueError("2D fields must be square")
        k_full = 2.0 * np.pi * np.fft.fftfreq(P, d=u.spacing)
        k_half = _wavenumbers(P, u.length)
        xi_sq = k_full[:, None] ** 2 + k_half[None, :] ** 2
        mult = np.zeros_like(xi_sq)
        nz = xi_sq > 0
        mult[nz] = xi_sq[nz] ** s
        out = np.fft.irfft2(np.fft.rfft2(u.values) * mult, s=u.values.shape)
    return u.copy_with(out)
