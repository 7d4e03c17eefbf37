"""Exact Euclidean distance and feature transform in linear time.

Each axis is swept with the partial-Voronoi construction of Maurer, Qi and
Raghavan (2003).  Distances stay integer squared values throughout; the
feature transform additionally carries, for every surviving site, the
linear index of the foreground voxel it stands for, so the final pass knows
which foreground voxel is nearest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numba
import numpy as np

from .grid import as_mask

INF = np.iinfo(np.int64).max
NONE = -1


@dataclass(frozen=True)
class FeatureTransform:
    """Squared distance to, and linear index of, the nearest foreground voxel.

    ``dist_sq`` holds :data:`INF` and ``nearest`` holds :data:`NONE` when the
    mask has no foreground at all.  ``nearest`` is ``None`` when the transform
    was computed without feature tracking.
    """

    dist_sq: np.ndarray
    nearest: np.ndarray | None

    @property
    def dims(self) -> tuple[int, ...]:
        return self.dist_sq.shape

    def distances(self) -> np.ndarray:
        """Euclidean distances as float64, ``inf`` where no foreground exists."""
        out = np.full(self.dist_sq.shape, np.inf)
        finite = self.dist_sq != INF
        out[finite] = np.sqrt(self.dist_sq[finite].astype(np.float64))
        return out


@numba.njit(cache=True)
def _sweep_line(dist, feat, track, g, h, f):
    n = dist.shape[0]
    l = 0
    for i in range(n):
        fi = dist[i]
        if fi == INF:
            continue
        while l >= 2:
            a = h[l - 1] - h[l - 2]
            b = i - h[l - 1]
            c = i - h[l - 2]
            if c * g[l - 1] - b * g[l - 2] - a * fi - a * b * c > 0:
                l -= 1
            else:
                break
        g[l] = fi
        h[l] = i
        if track:
            f[l] = feat[i]
        l += 1
    ns = l
    if ns == 0:
        return
    l = 0
    for i in range(n):
        while l < ns - 1 and g[l] + (h[l] - i) ** 2 > g[l + 1] + (h[l + 1] - i) ** 2:
            l += 1
        dist[i] = g[l] + (h[l] - i) ** 2
        if track:
            feat[i] = f[l]


@numba.njit(cache=True)
def _sweep_lines(dist, feat, track):
    n = dist.shape[1]
    g = np.empty(n, np.int64)
    h = np.empty(n, np.int64)
    f = np.empty(n, np.int64)
    for r in range(dist.shape[0]):
        _sweep_line(dist[r], feat[r], track, g, h, f)


def voronoi_pass(dist_line, feature_line=None) -> tuple[np.ndarray, np.ndarray | None]:
    """One lower-envelope sweep along a single line.

    Parameters
    ----------
    dist_line : array_like of int
        Squared distances accumulated over the axes already processed,
        :data:`INF` where unresolved.
    feature_line : array_like of int, optional
        Nearest-foreground index recorded at each position.

    Returns
    -------
    dist, feature : ndarray
        Updated copies.  A line without any finite entry is returned as is.
    """
    dist = np.array(dist_line, dtype=np.int64).reshape(1, -1)
    track = feature_line is not None
    if track:
        feat = np.array(feature_line, dtype=np.int64).reshape(1, -1)
    else:
        feat = np.zeros((1, 1), np.int64)
    _sweep_lines(dist, feat, track)
    return dist[0], (feat[0] if track else None)


def feature_transform(mask, indices: bool = True,
                      axis_order: Sequence[int] | None = None) -> FeatureTransform:
    """Exact squared EDT of a binary mask, optionally with nearest indices.

    Axes are processed in `axis_order` (default ``0, 1, ..., k-1``).  Distances
    do not depend on the order; nearest indices may differ between equally
    distant foreground voxels.
    """
    mask = as_mask(mask)
    shape = mask.shape
    dist = np.where(mask, 0, INF).astype(np.int64)
    feat = np.where(mask, np.arange(mask.size).reshape(shape), NONE).astype(np.int64) if indices else None
    order = range(mask.ndim) if axis_order is None else axis_order
    if sorted(order) != list(range(mask.ndim)):
        raise ValueError(f"axis_order {tuple(order)} is not a permutation")
    for axis in order:
        d = np.ascontiguousarray(np.moveaxis(dist, axis, -1))
        moved_shape = d.shape
        d2 = d.reshape(-1, moved_shape[-1])
        if indices:
            f2 = np.ascontiguousarray(np.moveaxis(feat, axis, -1)).reshape(d2.shape)
        else:
            f2 = np.zeros((d2.shape[0], 1), np.int64)  # untouched placeholder
        _sweep_lines(d2, f2, indices)
        dist = np.moveaxis(d2.reshape(moved_shape), -1, axis)
        if indices:
            feat = np.moveaxis(f2.reshape(moved_shape), -1, axis)
    dist = np.ascontiguousarray(dist)
    return FeatureTransform(dist, np.ascontiguousarray(feat) if indices else None)


def distance(ft: FeatureTransform, i: int) -> float:
    """Euclidean distance at linear index `i`; ``math.inf`` if no foreground exists."""
    d = int(ft.dist_sq.reshape(-1)[i])
    return math.inf if d == INF else math.sqrt(d)
