"""Inverse-distance-weighted interpolation from point gauges."""
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.spatial import cKDTree

from floodcast.errors import InvalidConfigError, LengthMismatchError, NoGaugesError

COINCIDENT_M = 1e-9


class IdwInterpolator:
    """Interpolate gauge values at fixed targets.

    The weights depend only on the geometry, so they are computed once and
    reused for every quantity and every hour.

    Parameters
    ----------
    gauge_xy     Gauge coordinates, shape (n_gauges, 2), meters.
    target_xy    Target coordinates, shape (n_targets, 2), meters.
    power        Distance exponent, weights are ``dist ** -power``.
    n_neighbors  Only the nearest gauges take part. ``None`` uses all gauges.
    """

    def __init__(
        self,
        gauge_xy: np.ndarray,
        target_xy: np.ndarray,
        power: float = 2.0,
        n_neighbors: Optional[int] = None,
    ):
        gauge_xy = np.atleast_2d(np.asarray(gauge_xy, dtype=float))
        target_xy = np.atleast_2d(np.asarray(target_xy, dtype=float))
        if gauge_xy.size == 0:
            raise NoGaugesError("IDW needs at least one gauge")
        if not power > 0:
            raise InvalidConfigError(f"power must be > 0, got {power}")
        n_gauges = gauge_xy.shape[0]
        k = n_gauges if n_neighbors is None else min(n_neighbors, n_gauges)
        if k < 1:
            raise InvalidConfigError(f"n_neighbors must be >= 1, got {n_neighbors}")
        self.power = power
        self.n_gauges = n_gauges

        tree = cKDTree(gauge_xy)
        distances, indices = tree.query(target_xy, k=k)
        distances = np.asarray(distances, dtype=float).reshape(len(target_xy), k)
        indices = np.asarray(indices).reshape(len(target_xy), k)

        weights = np.zeros((len(target_xy), n_gauges))
        coincident = distances < COINCIDENT_M
        with np.errstate(divide="ignore"):
            raw = np.where(coincident, 0.0, distances ** (-power))
        rows = np.arange(len(target_xy))[:, None]
        weights[rows, indices] = raw
        # A target sitting on a gauge takes that gauge's value exactly.
        hit = coincident.any(axis=1)
        if hit.any():
            first = np.argmax(coincident[hit], axis=1)
            weights[hit] = 0.0
            weights[np.flatnonzero(hit), indices[hit, first]] = 1.0
        self.weights = weights / weights.sum(axis=1, keepdims=True)

    def __call__(self, values: np.ndarray) -> np.ndarray:
        """Interpolate ``values`` of shape (n_gauges, ...) at every target.

        Accumulates gauge by gauge, in the same order for every column, so an
        elementwise ordering between two inputs is kept in the outputs.
        """
        values = np.asarray(values, dtype=float)
        if values.shape[0] != self.n_gauges:
            raise LengthMismatchError(
                f"expected {self.n_gauges} gauge rows, got {values.shape[0]}"
            )
        extra = (1,) * (values.ndim - 1)
        shape = (self.weights.shape[0],) + values.shape[1:]
        result = np.zeros(shape)
        low = np.full(shape, np.inf)
        high = np.full(shape, -np.inf)
        for g in range(self.n_gauges):
            w = self.weights[:, g].reshape((-1,) + extra)
            result += w * values[g]
            used = w > 0
            low = np.where(used, np.minimum(low, values[g]), low)
            high = np.where(used, np.maximum(high, values[g]), high)
        # Rounding must not leave the range of the contributing gauges.
        return np.clip(result, low, high)


def idw_interpolate(
    gauge_values: Sequence[Tuple[float, float, float]],
    target: Tuple[float, float],
    power: float = 2.0,
) -> float:
    """Interpolate one value at ``target`` from ``(x_m, y_m, value)`` gauges."""
    if not gauge_values:
        raise NoGaugesError("IDW needs at least one gauge")
    points = np.asarray(gauge_values, dtype=float)
    interpolator = IdwInterpolator(points[:, :2], np.asarray([target]), power=power)
    return float(interpolator(points[:, 2])[0])
