"""Lattice helpers shared by every other module.

Grids are plain :class:`numpy.ndarray` objects in C (row-major) order, so
the last axis varies fastest.  Scalar data is held as ``float64`` and
masks as ``bool``; the helpers here validate those conventions and provide
index arithmetic, face neighborhoods and halo-padded block extraction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


class ContractError(ValueError):
    """Inputs violate a documented precondition (shape, range, kind)."""


class DegenerateInputError(ValueError):
    """Inputs are well formed but the requested quantity is undefined."""


def as_dims(dims: Sequence[int]) -> tuple[int, ...]:
    dims = tuple(int(n) for n in dims)
    if not 1 <= len(dims) <= 3:
        raise ContractError(f"expected 1 to 3 dimensions, got {len(dims)}")
    if any(n < 1 for n in dims):
        raise ContractError(f"extents must be positive, got {dims}")
    return dims


def as_grid(values, dims: Sequence[int] | None = None) -> np.ndarray:
    """Return `values` as a finite float64 grid, reshaped to `dims` if given."""
    arr = np.asarray(values, dtype=np.float64)
    if dims is not None:
        dims = as_dims(dims)
        if arr.size != int(np.prod(dims)):
            raise ContractError(f"{arr.size} values do not fill dims {dims}")
        arr = arr.reshape(dims)
    else:
        as_dims(arr.shape)
    if not np.all(np.isfinite(arr)):
        raise ContractError("grid contains NaN or Inf")
    return np.ascontiguousarray(arr)


def as_mask(flags, dims: Sequence[int] | None = None) -> np.ndarray:
    arr = np.asarray(flags)
    if dims is not None:
        arr = arr.reshape(as_dims(dims))
    else:
        as_dims(arr.shape)
    return np.ascontiguousarray(arr != 0)


def linear_index(coords: Sequence[int], dims: Sequence[int]) -> int:
    """Row-major linear index of `coords`; raises IndexError when out of range."""
    dims = as_dims(dims)
    if len(coords) != len(dims):
        raise IndexError(f"coords {tuple(coords)} do not match dims {dims}")
    index = 0
    for c, n in zip(coords, dims):
        c = int(c)
        if not 0 <= c < n:
            raise IndexError(f"coordinate {c} outside [0, {n})")
        index = index * n + c
    return index


def coords_of(index: int, dims: Sequence[int]) -> tuple[int, ...]:
    """Inverse of :func:`linear_index`."""
    dims = as_dims(dims)
    index = int(index)
    total = int(np.prod(dims))
    if not 0 <= index < total:
        raise IndexError(f"index {index} outside [0, {total})")
    coords = []
    for n in reversed(dims):
        index, c = divmod(index, n)
        coords.append(c)
    return tuple(reversed(coords))


def face_neighbors(coords: Sequence[int], dims: Sequence[int]) -> list[tuple[int, ...]]:
    """In-domain axis-aligned neighbors, ordered axis0+, axis1+, ..., axis0-, axis1-, ..."""
    dims = as_dims(dims)
    coords = tuple(int(c) for c in coords)
    linear_index(coords, dims)
    out = []
    for step in (1, -1):
        for axis, n in enumerate(dims):
            c = coords[axis] + step
            if 0 <= c < n:
                out.append(coords[:axis] + (c,) + coords[axis + 1 :])
    return out


def interior(ndim: int) -> tuple[slice, ...]:
    """Slices selecting voxels that are not on the domain boundary."""
    return (slice(1, -1),) * ndim


@dataclass(frozen=True)
class BlockSpec:
    """Axis-aligned sub-block of a parent grid plus a requested halo width."""

    origin: tuple[int, ...]
    shape: tuple[int, ...]
    halo: int = 0

    def __post_init__(self):
        object.__setattr__(self, "origin", tuple(int(o) for o in self.origin))
        object.__setattr__(self, "shape", tuple(int(s) for s in self.shape))
        if len(self.origin) != len(self.shape):
            raise ContractError("origin and shape must have the same length")
        if self.halo < 0:
            raise ContractError("halo must be nonnegative")

    @property
    def slices(self) -> tuple[slice, ...]:
        return tuple(slice(o, o + s) for o, s in zip(self.origin, self.shape))

    def check(self, dims: Sequence[int]) -> None:
        dims = as_dims(dims)
        if len(dims) != len(self.origin):
            raise ContractError(f"block rank {len(self.origin)} != grid rank {len(dims)}")
        for o, s, n in zip(self.origin, self.shape, dims):
            if o < 0 or s < 1 or o + s > n:
                raise ContractError(f"block {self} lies outside dims {dims}")

    def attained_halo(self, dims: Sequence[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """Halo widths actually available on the low and high side of each axis."""
        self.check(dims)
        lo = tuple(min(self.halo, o) for o in self.origin)
        hi = tuple(min(self.halo, n - o - s) for o, s, n in zip(self.origin, self.shape, dims))
        return lo, hi


@dataclass(frozen=True)
class Block:
    """Data copied out of a parent grid, with bookkeeping of the halo it carries."""

    data: np.ndarray
    spec: BlockSpec
    lo: tuple[int, ...]
    hi: tuple[int, ...]

    @property
    def inner(self) -> tuple[slice, ...]:
        """Slices of :attr:`data` that select the block proper (no halo)."""
        return tuple(slice(l, l + s) for l, s in zip(self.lo, self.spec.shape))

    def interior_values(self) -> np.ndarray:
        return self.data[self.inner]


def extract_block(grid: np.ndarray, spec: BlockSpec) -> Block:
    """Copy `spec` out of `grid` with its halo, clipped at the domain boundary."""
    grid = np.asarray(grid)
    lo, hi = spec.attained_halo(grid.shape)
    sl = tuple(
        slice(o - l, o + s + h) for o, s, l, h in zip(spec.origin, spec.shape, lo, hi)
    )
    return Block(grid[sl].copy(), spec, lo, hi)


def insert_block(parent: np.ndarray, block: Block) -> None:
    """Write the block's interior (halo dropped) back into `parent` in place."""
    parent[block.spec.slices] = block.interior_values()
