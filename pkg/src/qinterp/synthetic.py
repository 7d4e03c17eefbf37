"""Synthetic scalar fields for tests, demos and benchmarks."""

from __future__ import annotations

from typing import Sequence

import numpy as np


def separable_waves(shape: Sequence[int] = (64, 64, 64), period: float | None = None) -> np.ndarray:
    """``sin(2 pi x/L) sin(2 pi y/L) + 0.5 cos(2 pi z/L)`` on integer coordinates.

    `period` defaults to the first extent, so one full wave spans the domain.
    """
    shape = tuple(shape)
    L = float(shape[0] if period is None else period)
    axes = np.meshgrid(*[np.arange(n, dtype=np.float64) for n in shape], indexing="ij")
    waves = [np.sin(2 * np.pi * a / L) for a in axes]
    out = waves[0]
    if len(axes) > 1:
        out = out * waves[1]
    if len(axes) > 2:
        out = out + 0.5 * np.cos(2 * np.pi * axes[2] / L)
    return out


def random_smooth_field(rng: np.random.Generator, shape: Sequence[int],
                        n_waves: int = 3, noise: float | None = None) -> np.ndarray:
    """Sum of randomly oriented sinusoids plus Gaussian noise.

    Wavelengths range from a quarter of the domain to twice its size;
    `noise` is the noise standard deviation (random in ``[0, 0.05]`` if not
    given).
    """
    shape = tuple(shape)
    axes = np.meshgrid(*[np.arange(n, dtype=np.float64) for n in shape], indexing="ij")
    span = max(shape)
    out = np.zeros(shape)
    for _ in range(n_waves):
        k = rng.normal(size=len(shape))
        k /= np.linalg.norm(k)
        wavelength = rng.uniform(0.25, 2.0) * span
        phase = rng.uniform(0, 2 * np.pi)
        arg = sum(ki * a for ki, a in zip(k, axes)) * (2 * np.pi / wavelength) + phase
        out += rng.uniform(0.2, 1.0) * np.sin(arg)
    sigma = rng.uniform(0.0, 0.05) if noise is None else noise
    return out + sigma * rng.standard_normal(shape)


def step_edge(shape: Sequence[int] = (16, 16, 16), axis: int = 0, at: int | None = None,
              low: float = 0.0, high: float = 1.0) -> np.ndarray:
    """Two constant half-spaces separated by a plane normal to `axis`."""
    shape = tuple(shape)
    at = shape[axis] // 2 if at is None else at
    coord = np.arange(shape[axis]).reshape([-1 if i == axis else 1 for i in range(len(shape))])
    return np.broadcast_to(np.where(coord < at, low, high), shape).astype(np.float64)
