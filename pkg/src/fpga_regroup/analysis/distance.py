"""Weighted Manhattan distance over site / tile / clock-region coordinates."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..model import PlacementTriple


@dataclass(frozen=True)
class DistanceWeights:
    """Per-level multipliers ``1, w, w**2`` (site, tile, clock region).

    ``w_slr = w**3`` is kept for multi-SLR devices but no coordinate uses it yet.
    """

    w: int = 5

    def __post_init__(self):
        if int(self.w) != self.w or self.w < 2:
            # w == 1 would break w_site < w_tile < w_clk_region
            raise ValueError(f"base weight must be an integer >= 2, got {self.w}")

    @property
    def w_site(self) -> int:
        return 1

    @property
    def w_tile(self) -> int:
        return self.w

    @property
    def w_clk_region(self) -> int:
        return self.w ** 2

    @property
    def w_slr(self) -> int:
        return self.w ** 3

    def vector(self) -> np.ndarray:
        """Weights aligned with :meth:`PlacementTriple.coords`."""
        s, t, r = self.w_site, self.w_tile, self.w_clk_region
        return np.array([s, s, t, t, r, r], dtype=np.int64)


def spatial_distance(a: PlacementTriple, b: PlacementTriple, weights: DistanceWeights = DistanceWeights()) -> int:
    s, t, r = weights.w_site, weights.w_tile, weights.w_clk_region
    return (
        s * (abs(a.site_xy[0] - b.site_xy[0]) + abs(a.site_xy[1] - b.site_xy[1]))
        + t * (abs(a.tile_xy[0] - b.tile_xy[0]) + abs(a.tile_xy[1] - b.tile_xy[1]))
        + r * (abs(a.clock_region_xy[0] - b.clock_region_xy[0]) + abs(a.clock_region_xy[1] - b.clock_region_xy[1]))
    )


def distances_to(a: PlacementTriple, coords: np.ndarray, weights: DistanceWeights) -> np.ndarray:
    """Vectorised :func:`spatial_distance` from ``a`` to each row of ``coords`` (n x 6)."""
    return np.abs(coords - np.asarray(a.coords(), dtype=np.int64)) @ weights.vector()
