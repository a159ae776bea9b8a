"""Grid distance fields from the eikonal equation |grad d| = 1.

For obstacles without a closed-form depth the distance to the complement is
computed by first-order fast marching on a regular Cartesian grid.  Nodes are
indexed ``values[i, j]`` with world position ``origin + (i*h, j*h)``.
"""
from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import geometry
from .errors import GridTooCoarse


@dataclass(frozen=True)
class Grid2D:
    origin: tuple[float, float]
    spacing: float
    nx: int
    ny: int

    def __post_init__(self):
        if not self.spacing > 0:
            raise ValueError("grid spacing must be positive")
        if self.nx < 2 or self.ny < 2:
            raise ValueError("grid needs at least 2x2 nodes")
        object.__setattr__(self, "origin", (float(self.origin[0]), float(self.origin[1])))

    @classmethod
    def covering(cls, box, spacing: float, margin: float | None = None) -> "Grid2D":
        """Smallest grid of the given spacing covering ``box`` plus ``margin``
        (default 2 spacings) on every side."""
        if margin is None:
            margin = 2.0 * spacing
        xmin, ymin, xmax, ymax = box
        x0, y0 = xmin - margin, ymin - margin
        nx = int(math.ceil((xmax + margin - x0) / spacing - 1e-9)) + 1
        ny = int(math.ceil((ymax + margin - y0) / spacing - 1e-9)) + 1
        return cls((x0, y0), spacing, max(nx, 2), max(ny, 2))

    def nodes(self) -> np.ndarray:
        """Node coordinates, shape ``(nx, ny, 2)``."""
        xs = self.origin[0] + self.spacing * np.arange(self.nx)
        ys = self.origin[1] + self.spacing * np.arange(self.ny)
        X, Y = np.meshgrid(xs, ys, indexing="ij")
        return np.stack([X, Y], axis=-1)


class Raster(NamedTuple):
    grid: Grid2D
    inside: np.ndarray  # bool (nx, ny)
    frozen: np.ndarray  # bool (nx, ny), subset of inside
    frozen_values: np.ndarray  # float (nx, ny), meaningful on frozen nodes


@dataclass(frozen=True, eq=False)
class DistanceField:
    grid: Grid2D
    values: np.ndarray
    inside_mask: np.ndarray
    # flat node indices in the order fast marching finalised them
    order: np.ndarray


def _has_closed_form(obstacle) -> bool:
    if isinstance(obstacle, geometry.Sampled):
        return False
    if isinstance(obstacle, geometry.Union):
        return all(_has_closed_form(m) for m in obstacle.members)
    return True


def rasterize(obstacle, grid: Grid2D) -> Raster:
    """Mark grid nodes inside ``obstacle`` and seed the boundary layer.

    Inside nodes with at least one outside 4-neighbour form the frozen set.  They
    start from the analytic depth when the obstacle has one, else from h/2.
    """
    nodes = grid.nodes().reshape(-1, 2)
    depth = geometry.penetration(nodes, obstacle).reshape(grid.nx, grid.ny)
    inside = depth > 0
    empty = isinstance(obstacle, geometry.Union) and not geometry.members(obstacle)
    if not inside.any():
        if empty:
            zeros = np.zeros_like(depth)
            return Raster(grid, inside, inside.copy(), zeros)
        raise GridTooCoarse(f"obstacle contains no node of a grid with spacing {grid.spacing}")

    padded = np.pad(inside, 1, constant_values=False)
    all_nbrs_inside = padded[:-2, 1:-1] & padded[2:, 1:-1] & padded[1:-1, :-2] & padded[1:-1, 2:]
    frozen = inside & ~all_nbrs_inside
    if _has_closed_form(obstacle):
        seed = np.where(frozen, depth, 0.0)
    else:
        seed = np.where(frozen, 0.5 * grid.spacing, 0.0)
    return Raster(grid, inside, frozen, seed)


def _upwind(values, accepted, i, j, h):
    nx, ny = values.shape
    a = math.inf
    if i > 0 and accepted[i - 1, j]:
        a = values[i - 1, j]
    if i + 1 < nx and accepted[i + 1, j] and values[i + 1, j] < a:
        a = values[i + 1, j]
    b = math.inf
    if j > 0 and accepted[i, j - 1]:
        b = values[i, j - 1]
    if j + 1 < ny and accepted[i, j + 1] and values[i, j + 1] < b:
        b = values[i, j + 1]
    if a > b:
        a, b = b, a
    if b == math.inf or b - a >= h:
        return a + h
    return 0.5 * (a + b + math.sqrt(2.0 * h * h - (b - a) ** 2))


def fast_march(raster: Raster) -> DistanceField:
    """Solve the first-order upwind eikonal discretisation on inside nodes.

    Each node is finalised exactly once, in non-decreasing value order.  Ties in
    the queue are broken first-in first-out.  Outside nodes hold 0; inside nodes
    not connected to the frozen set stay at +inf.
    """
    grid, inside, frozen, seed = raster
    h = grid.spacing
    nx, ny = inside.shape
    values = np.where(inside, math.inf, 0.0)
    values[frozen] = seed[frozen]
    accepted = np.zeros_like(inside)
    counter = itertools.count()
    heap = []
    for i, j in zip(*np.nonzero(frozen)):
        heapq.heappush(heap, (values[i, j], next(counter), int(i), int(j)))

    order = []
    while heap:
        v, _, i, j = heapq.heappop(heap)
        if accepted[i, j] or v > values[i, j]:
            continue
        accepted[i, j] = True
        order.append(i * ny + j)
        for di, dj in ((-1, 0), (1, 0), (0, -1), (0, 1)):
            ni, nj = i + di, j + dj
            if not (0 <= ni < nx and 0 <= nj < ny):
                continue
            if not inside[ni, nj] or accepted[ni, nj] or frozen[ni, nj]:
                continue
            cand = _upwind(values, accepted, ni, nj, h)
            if cand < values[ni, nj]:
                values[ni, nj] = cand
                heapq.heappush(heap, (cand, next(counter), ni, nj))

    values.setflags(write=False)
    return DistanceField(grid, values, inside.copy(), np.asarray(order, dtype=np.int64))


def distance_field(obstacle, spacing: float, box=None) -> DistanceField:
    """Rasterise and fast-march ``obstacle`` on a grid covering ``box``
    (default: the obstacle's bounding box) with a two-node margin."""
    if box is None:
        box = geometry.bounding_box(obstacle)
        if box is None:
            box = (-1.0, -1.0, 1.0, 1.0)
    grid = Grid2D.covering(box, spacing)
    return fast_march(rasterize(obstacle, grid))


def sample(field: DistanceField, q):
    """Bilinear interpolation of the field; zero outside the grid and on nodes
    that are outside the obstacle or were never reached."""
    pts = np.asarray(q, dtype=float)
    single = pts.ndim == 1
    pts = np.atleast_2d(pts)
    g = field.grid
    vals = np.where(field.inside_mask & np.isfinite(field.values), field.values, 0.0)

    fx = (pts[:, 0] - g.origin[0]) / g.spacing
    fy = (pts[:, 1] - g.origin[1]) / g.spacing
    ok = (fx >= 0) & (fx <= g.nx - 1) & (fy >= 0) & (fy <= g.ny - 1)
    i = np.clip(np.floor(fx).astype(int), 0, g.nx - 2)
    j = np.clip(np.floor(fy).astype(int), 0, g.ny - 2)
    tx = np.clip(fx - i, 0.0, 1.0)
    ty = np.clip(fy - j, 0.0, 1.0)
    out = ((1 - tx) * (1 - ty) * vals[i, j] + tx * (1 - ty) * vals[i + 1, j]
           + (1 - tx) * ty * vals[i, j + 1] + tx * ty * vals[i + 1, j + 1])
    out = np.where(ok, out, 0.0)
    return float(out[0]) if single else out
