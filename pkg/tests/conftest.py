from __future__ import annotations

import numpy as np
import pytest

from cloiseg import LabeledPointCloud


def make_cloud(positions, classes=None, gt=None, pred=None) -> LabeledPointCloud:
    positions = np.asarray(positions, dtype=np.float64).reshape(-1, 3)
    n = positions.shape[0]
    if classes is None:
        classes = np.zeros(n, dtype=np.int64)
    elif np.isscalar(classes):
        classes = np.full(n, classes, dtype=np.int64)
    return LabeledPointCloud(positions, classes, gt, pred)


def random_cloud(rng: np.random.Generator, n: int, scale: float = 1.0,
                 n_classes: int = 8, with_gt: bool = False) -> LabeledPointCloud:
    positions = rng.random((n, 3)) * scale
    classes = rng.integers(0, n_classes, n)
    gt = None
    if with_gt:
        # group points into blobs of equal class so gt instances stay pure
        gt = np.zeros(n, dtype=np.int64)
        k = max(1, n // 50)
        gt = rng.integers(0, k, n)
        classes = (gt % n_classes).astype(np.int64)
    return make_cloud(positions, classes, gt)


def clouds_equal(a: LabeledPointCloud, b: LabeledPointCloud) -> bool:
    if len(a) != len(b):
        return False
    same = (
        np.array_equal(a.positions, b.positions)
        and np.array_equal(a.class_labels, b.class_labels)
        and np.array_equal(a.gt_instance, b.gt_instance)
    )
    if (a.pred_instance is None) != (b.pred_instance is None):
        return False
    if a.pred_instance is not None and not np.array_equal(a.pred_instance, b.pred_instance):
        return False
    return same


def grid_blob(center, count, spacing=0.01) -> np.ndarray:
    """Compact cubic lattice of `count` points around center; max nn gap = spacing."""
    side = int(np.ceil(count ** (1.0 / 3.0)))
    axes = np.arange(side) * spacing
    pts = np.stack(np.meshgrid(axes, axes, axes, indexing="ij"), axis=-1).reshape(-1, 3)
    pts = pts[:count]
    return pts - pts.mean(axis=0) + np.asarray(center, dtype=np.float64)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
