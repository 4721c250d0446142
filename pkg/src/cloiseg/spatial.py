"""Fixed-radius neighbor index over 3D point positions.

Queries use the closed ball (d <= r, Euclidean); results are exact, equal to
the brute-force neighbor set. The index never mutates after construction and
is safe to share across threads.
"""

from __future__ import annotations

import numpy as np
from scipy.spatial import cKDTree


class RadiusIndex:
    """Balanced spatial partition supporting exact fixed-radius queries."""

    def __init__(self, positions: np.ndarray):
        positions = np.ascontiguousarray(positions, dtype=np.float64)
        if positions.size == 0:
            positions = positions.reshape(0, 3)
        if positions.ndim != 2 or positions.shape[1] != 3:
            raise ValueError(f"positions must have shape (N, 3), got {positions.shape}")
        if not np.isfinite(positions).all():
            raise ValueError("positions must be finite")
        self.positions = positions
        self._tree = cKDTree(positions)

    def __len__(self) -> int:
        return self.positions.shape[0]

    def radius_query(self, i: int, r: float) -> np.ndarray:
        """Indices j != i with d(P_i, P_j) <= r, sorted ascending."""
        if not 0 <= i < len(self):
            raise ValueError(f"point index {i} out of range for index of size {len(self)}")
        if not r > 0:
            raise ValueError(f"radius must be positive, got {r}")
        found = self._tree.query_ball_point(self.positions[i], r)
        out = np.asarray([j for j in found if j != i], dtype=np.int64)
        out.sort()
        return out

    def pairs_within(self, r: float) -> np.ndarray:
        """All index pairs (i, j), i < j, with d(P_i, P_j) <= r; shape (M, 2)."""
        if not r > 0:
            raise ValueError(f"radius must be positive, got {r}")
        if len(self) == 0:
            return np.empty((0, 2), dtype=np.int64)
        return self._tree.query_pairs(r, output_type="ndarray").astype(np.int64, copy=False)
