"""Distance and boundary arithmetic shared by the engine's Python side.

The compiled kernel re-implements these rules in C; the two are held
together by the backend equivalence tests.
"""

from __future__ import annotations

import math

from geosim.kernels import ops as K

METRIC_NAMES = {"moore": K.METRIC_CHEBYSHEV,
                "vonneumann": K.METRIC_MANHATTAN,
                "euclidean": K.METRIC_EUCLIDEAN}
METRIC_IDS = {v: k for k, v in METRIC_NAMES.items()}


def lattice_delta(a: float, b: float, size: int, torus: bool) -> float:
    d = abs(a - b)
    if torus:
        d = min(d, size - d)
    return d


def lattice_distance(metric: int, ax, ay, bx, by, width, height, torus) -> float:
    dx = lattice_delta(ax, bx, width, torus)
    dy = lattice_delta(ay, by, height, torus)
    if metric == K.METRIC_CHEBYSHEV:
        return max(dx, dy)
    if metric == K.METRIC_MANHATTAN:
        return dx + dy
    return math.sqrt(dx * dx + dy * dy)


def euclidean(ax, ay, bx, by) -> float:
    dx = ax - bx
    dy = ay - by
    return math.sqrt(dx * dx + dy * dy)


def cells_within(x: int, y: int, r: int, width: int, height: int,
                 torus: bool) -> list[tuple[int, int]]:
    """Unique lattice cells whose Chebyshev distance from (x, y) is <= r.

    On a torus the scan window is clipped so no cell appears twice even
    when the radius wraps the lattice. Row-major order, the cell (x, y)
    itself included.
    """
    if torus:
        xs = (range(width) if 2 * r + 1 >= width
              else [(x + dx) % width for dx in range(-r, r + 1)])
        ys = (range(height) if 2 * r + 1 >= height
              else [(y + dy) % height for dy in range(-r, r + 1)])
    else:
        xs = range(max(0, x - r), min(width, x + r + 1))
        ys = range(max(0, y - r), min(height, y + r + 1))
    out = [(cx, cy) for cy in sorted(ys) for cx in sorted(xs)]
    return out


def resolve_lattice(x: int, y: int, width: int, height: int, torus: bool):
    """Apply the boundary mode to a raw integer lattice coordinate."""
    if torus:
        return x % width, y % height
    return min(max(x, 0), width - 1), min(max(y, 0), height - 1)


def resolve_continuous(x: float, y: float, x0, y0, x1, y1, torus: bool):
    """Clamp into [x0, x1], or wrap into the half-open box under torus."""
    if torus:
        w = x1 - x0
        h = y1 - y0
        x = math.fmod(x - x0, w)
        if x < 0.0:
            x += w
        y = math.fmod(y - y0, h)
        if y < 0.0:
            y += h
        return x0 + x, y0 + y
    return min(max(x, x0), x1), min(max(y, y0), y1)
