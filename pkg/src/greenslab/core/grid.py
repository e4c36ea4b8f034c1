"""Domain discretization, quadrature weights and grid functions."""

from __future__ import annotations

import logging
from typing import Sequence, Tuple, Union

import numpy as np

from .errors import GridError, GridMismatchError, NonFiniteValueError
from .models import Field, Grid, PointFunction, Weights

logger = logging.getLogger(__name__)

MIN_COUNT = 3

Bounds = Union[Sequence[float], Sequence[Sequence[float]]]


def _normalise_bounds(dimension: int, bounds: Bounds) -> Tuple[Tuple[float, float], ...]:
    flat = np.asarray(bounds, dtype=float).reshape(-1)
    if flat.size != 2 * dimension:
        raise GridError(f"expected {2 * dimension} bound values for dimension {dimension}, got {flat.size}")
    pairs = tuple((float(flat[2 * k]), float(flat[2 * k + 1])) for k in range(dimension))
    for a, b in pairs:
        if not (np.isfinite(a) and np.isfinite(b)):
            raise GridError(f"bounds must be finite: ({a}, {b})")
        if not b > a:
            raise GridError(f"inverted or degenerate bounds: ({a}, {b})")
    return pairs


def make_grid(dimension: int, bounds: Bounds, counts: Union[int, Sequence[int]]) -> Grid:
    if dimension not in (1, 2):
        raise GridError(f"unsupported dimension {dimension}")
    pairs = _normalise_bounds(dimension, bounds)
    count_tuple = (int(counts),) * dimension if np.isscalar(counts) else tuple(int(c) for c in counts)
    if len(count_tuple) != dimension:
        raise GridError(f"expected {dimension} counts, got {len(count_tuple)}")
    if min(count_tuple) < MIN_COUNT:
        raise GridError(f"need at least {MIN_COUNT} interior nodes per axis, got {count_tuple}")

    spacing = tuple((b - a) / (n + 1) for (a, b), n in zip(pairs, count_tuple))
    axes = [a + h * np.arange(1, n + 1) for (a, _), h, n in zip(pairs, spacing, count_tuple)]
    if dimension == 1:
        nodes = axes[0].reshape(-1, 1)
    else:
        # x fastest: node k = i + Nx * j
        xs, ys = np.meshgrid(axes[0], axes[1], indexing="xy")
        nodes = np.column_stack([xs.reshape(-1), ys.reshape(-1)])
    logger.debug("grid dim=%d counts=%s spacing=%s", dimension, count_tuple, spacing)
    return Grid(dimension=dimension, bounds=pairs, counts=count_tuple, spacing=spacing, nodes=nodes)


def quadrature_weights(grid: Grid) -> Weights:
    """Uniform product rule: every interior node carries h^n."""
    return Weights(grid=grid, w=np.full(grid.size, grid.cell_volume))


def _sample_per_node(grid: Grid, function: PointFunction) -> np.ndarray:
    values = np.empty(grid.size)
    for index, node in enumerate(grid.nodes):
        try:
            values[index] = float(function(*node))
        except ZeroDivisionError:
            values[index] = np.nan
        except (TypeError, ValueError) as exc:
            raise GridError(f"function is not scalar-valued at node {index} {grid.coordinates(index)}: {exc}") from exc
    return values


def sample_field(grid: Grid, function: PointFunction) -> Field:
    """Evaluate `function` at every node.

    Array-aware functions are called once with coordinate arrays; scalar-only
    callables (math.*, Python branches) fall back to one call per node.
    """
    try:
        values = np.asarray(function(*grid.nodes.T), dtype=float)
    except (TypeError, ValueError, ZeroDivisionError):
        values = None
    if values is None or (values.ndim > 0 and values.size != grid.size):
        logger.debug("function is not vectorized; sampling node by node")
        values = _sample_per_node(grid, function)
    elif values.ndim == 0:
        values = np.full(grid.size, float(values))
    values = values.reshape(-1).copy()
    if not np.all(np.isfinite(values)):
        bad = int(np.flatnonzero(~np.isfinite(values))[0])
        raise NonFiniteValueError(f"non-finite sample at node {bad} {grid.coordinates(bad)}")
    return Field(grid=grid, values=values)


def field_from_values(grid: Grid, values: np.ndarray) -> Field:
    array = np.array(values, dtype=float).reshape(-1)
    if array.size != grid.size:
        raise GridMismatchError(f"field has {array.size} values, grid has {grid.size} nodes")
    if not np.all(np.isfinite(array)):
        raise NonFiniteValueError("field contains non-finite values")
    return Field(grid=grid, values=array)


def ensure_same_grid(left: Grid, right: Grid):
    if not left.same_as(right):
        raise GridMismatchError(f"grid mismatch: {left.key} vs {right.key}")


def integrate(field: Field, weights: Weights) -> float:
    ensure_same_grid(field.grid, weights.grid)
    return float(np.dot(weights.w, field.values))
