"""Instance segmentation by graph connectivity over same-class interior points.

Pipeline: detect class boundaries, connect interior points of equal class
within the link radius, take connected components as provisional instances,
reattach each boundary point to its nearest same-class instance (capped at
3x the link radius), drop instances smaller than the minimum size to NOISE,
then renumber canonically. Deterministic for a given input, independent of
the number of worker threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse import csgraph
from scipy.spatial import cKDTree

from .boundary import BoundaryParams, detect_class_boundaries
from .model import NOISE, LabeledPointCloud, canonical_instance_ids
from .spatial import RadiusIndex

#: Boundary points farther than this multiple of epsilon from every
#: same-class instance become NOISE instead of joining one.
REATTACH_CAP_FACTOR = 3.0


@dataclass(frozen=True)
class SegmentationParams:
    """Link radius epsilon (m), minimum instance size mu (points), boundary radius (m).

    ``boundary_radius=None`` tracks epsilon. Defaults are the tuned optimum
    for industrial scans: epsilon 4cm, mu 20 points.
    """

    epsilon: float = 0.04
    mu: int = 20
    boundary_radius: float | None = None

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if self.mu < 1:
            raise ValueError(f"mu must be >= 1, got {self.mu}")
        if self.boundary_radius is not None and not self.boundary_radius > 0:
            raise ValueError(f"boundary radius must be positive, got {self.boundary_radius}")

    @property
    def resolved_boundary_radius(self) -> float:
        return self.epsilon if self.boundary_radius is None else self.boundary_radius


@dataclass(frozen=True)
class InstanceLabeling:
    """A partition of point indices into class-pure instances plus a NOISE pool.

    ``assignment[i]`` is the instance id of point i or NOISE. Instances are
    numbered canonically (ascending smallest member index) and stored as
    sorted index arrays with their class label. Treat as immutable.
    """

    assignment: np.ndarray
    instances: tuple[np.ndarray, ...]
    instance_classes: np.ndarray

    @classmethod
    def from_assignment(cls, assignment: np.ndarray, class_labels: np.ndarray) -> "InstanceLabeling":
        assignment = canonical_instance_ids(np.asarray(assignment, dtype=np.int64))
        class_labels = np.asarray(class_labels, dtype=np.int64)
        if assignment.shape != class_labels.shape:
            raise ValueError("assignment and class labels must have equal length")
        k = int(assignment.max()) + 1 if assignment.size and assignment.max() >= 0 else 0
        members: list[np.ndarray] = []
        inst_cls = np.empty(k, dtype=np.int64)
        order = np.argsort(assignment, kind="stable")
        assigned = order[assignment[order] >= 0]
        bounds = np.searchsorted(assignment[assigned], np.arange(k + 1))
        for g in range(k):
            idx = np.sort(assigned[bounds[g]:bounds[g + 1]])
            classes = np.unique(class_labels[idx])
            if classes.size != 1:
                raise ValueError(f"instance {g} mixes class labels {classes.tolist()}")
            members.append(idx)
            inst_cls[g] = classes[0]
        return cls(assignment, tuple(members), inst_cls)

    @property
    def n_instances(self) -> int:
        return len(self.instances)

    def sizes(self) -> np.ndarray:
        return np.array([m.size for m in self.instances], dtype=np.int64)


@dataclass(frozen=True)
class SegmentationDetails:
    """Diagnostics from one segmentation run."""

    boundary_flags: np.ndarray
    provisional_count: int
    reattached_count: int
    boundary_noise_count: int


@dataclass(frozen=True)
class SingleObjectResult:
    """Fragmentation of one object's points at a given link radius."""

    component_count: int
    largest_fraction: float


def connected_components(
    index: RadiusIndex,
    epsilon: float,
    subset: np.ndarray | None = None,
    predicate=None,
) -> list[np.ndarray]:
    """Components of the graph with edges d <= epsilon, optionally restricted.

    ``subset`` limits the vertex set; ``predicate(i, j)`` is a vectorized
    symmetric edge filter over index arrays. The resulting partition equals
    the transitive closure of the edge relation; components are sorted by
    smallest member and returned as sorted index arrays.
    """
    n = len(index)
    if subset is None:
        vertices = np.arange(n, dtype=np.int64)
    else:
        vertices = np.unique(np.asarray(subset, dtype=np.int64))
        if vertices.size and (vertices[0] < 0 or vertices[-1] >= n):
            raise ValueError("subset index out of range")
    if vertices.size == 0:
        return []
    in_subset = np.zeros(n, dtype=bool)
    in_subset[vertices] = True

    pairs = index.pairs_within(epsilon)
    if pairs.size:
        keep = in_subset[pairs[:, 0]] & in_subset[pairs[:, 1]]
        pairs = pairs[keep]
    if pairs.size and predicate is not None:
        keep = np.asarray(predicate(pairs[:, 0], pairs[:, 1]), dtype=bool)
        pairs = pairs[keep]

    labels = _component_labels(n, pairs)
    return _group_by_label(labels, vertices)


def _component_labels(n: int, pairs: np.ndarray) -> np.ndarray:
    """Connected-component label per vertex of an n-vertex graph."""
    if pairs.size == 0:
        return np.arange(n, dtype=np.int64)
    data = np.ones(pairs.shape[0], dtype=np.int8)
    graph = coo_matrix((data, (pairs[:, 0], pairs[:, 1])), shape=(n, n))
    _, labels = csgraph.connected_components(graph, directed=False)
    return labels.astype(np.int64)


def _group_by_label(labels: np.ndarray, vertices: np.ndarray) -> list[np.ndarray]:
    """Group ``vertices`` by label, ordered by smallest member, members sorted."""
    if vertices.size == 0:
        return []
    sub = labels[vertices]
    order = np.argsort(sub, kind="stable")
    sorted_v = vertices[order]
    _, starts = np.unique(sub[order], return_index=True)
    groups = [np.sort(sorted_v[s:e]) for s, e in zip(starts, np.append(starts[1:], sub.size))]
    groups.sort(key=lambda g: int(g[0]))
    return groups


def segment(
    cloud: LabeledPointCloud, params: SegmentationParams | None = None, workers: int | None = None
) -> InstanceLabeling:
    """Segment a class-labeled cloud into instances; see module docstring."""
    labeling, _ = segment_with_details(cloud, params, workers)
    return labeling


def segment_with_details(
    cloud: LabeledPointCloud, params: SegmentationParams | None = None, workers: int | None = None
) -> tuple[InstanceLabeling, SegmentationDetails]:
    params = params or SegmentationParams()
    n = len(cloud)
    if n == 0:
        empty = InstanceLabeling.from_assignment(np.empty(0, dtype=np.int64), cloud.class_labels)
        return empty, SegmentationDetails(np.zeros(0, dtype=bool), 0, 0, 0)
    workers = workers or -1
    eps = params.epsilon
    r_b = params.resolved_boundary_radius
    classes = cloud.class_labels

    index = RadiusIndex(cloud.positions)
    if r_b == eps:
        pairs = index.pairs_within(eps)
        flags = np.zeros(n, dtype=bool)
        if pairs.size:
            differ = classes[pairs[:, 0]] != classes[pairs[:, 1]]
            flags[pairs[differ].ravel()] = True
        eps_pairs = pairs
    else:
        flags = detect_class_boundaries(cloud, index, BoundaryParams(r_b))
        eps_pairs = index.pairs_within(eps)

    interior = ~flags
    if eps_pairs.size:
        keep = (
            interior[eps_pairs[:, 0]]
            & interior[eps_pairs[:, 1]]
            & (classes[eps_pairs[:, 0]] == classes[eps_pairs[:, 1]])
        )
        eps_pairs = eps_pairs[keep]

    # provisional instances: components over interior points, canonical ids
    labels = _component_labels(n, eps_pairs)
    assignment = np.full(n, NOISE, dtype=np.int64)
    interior_idx = np.nonzero(interior)[0]
    assignment[interior_idx] = labels[interior_idx]
    assignment = canonical_instance_ids(assignment)
    provisional_count = int(assignment.max()) + 1 if interior_idx.size else 0

    reattached, boundary_noise = _reattach_boundary_points(
        cloud.positions, classes, flags, assignment, cap=REATTACH_CAP_FACTOR * eps,
        workers=workers,
    )

    # minimum-size filter runs after reattachment so boundary points count
    if assignment.max() >= 0:
        sizes = np.bincount(assignment[assignment >= 0], minlength=assignment.max() + 1)
        small = sizes[assignment[assignment >= 0]] < params.mu
        victims = np.nonzero(assignment >= 0)[0][small]
        assignment[victims] = NOISE

    labeling = InstanceLabeling.from_assignment(assignment, classes)
    details = SegmentationDetails(flags, provisional_count, reattached, boundary_noise)
    return labeling, details


def _reattach_boundary_points(
    positions: np.ndarray,
    classes: np.ndarray,
    flags: np.ndarray,
    assignment: np.ndarray,
    cap: float,
    workers: int,
) -> tuple[int, int]:
    """Join each boundary point to the nearest same-class instance within cap.

    Nearest is measured to any member point; exact ties go to the lowest
    instance id. Mutates ``assignment`` in place; returns (joined, noise)
    counts. Boundary points never bridge instances.
    """
    boundary_idx = np.nonzero(flags)[0]
    if boundary_idx.size == 0:
        return 0, 0
    reattached = 0
    joined = np.full(boundary_idx.size, NOISE, dtype=np.int64)
    for c in np.unique(classes[boundary_idx]):
        b_sel = np.nonzero(classes[boundary_idx] == c)[0]
        b_idx = boundary_idx[b_sel]
        members = np.nonzero((classes == c) & (assignment >= 0))[0]
        if members.size == 0:
            continue
        tree = cKDTree(positions[members])
        dist, _ = tree.query(positions[b_idx], k=1, distance_upper_bound=cap, workers=workers)
        hit = np.isfinite(dist)
        if not hit.any():
            continue
        # re-query a hair wider, then resolve exact argmins ourselves so the
        # result does not depend on tree internals or worker count
        radii = dist[hit] * (1.0 + 1e-9)
        candidate_lists = tree.query_ball_point(positions[b_idx[hit]], radii, workers=workers)
        hit_rows = np.nonzero(hit)[0]
        for row, cands in zip(hit_rows, candidate_lists):
            cand = members[np.asarray(cands, dtype=np.int64)]
            delta = positions[cand] - positions[b_idx[row]]
            sq = np.einsum("ij,ij->i", delta, delta)
            best = sq.min()
            joined[b_sel[row]] = int(assignment[cand[sq == best]].min())
        reattached += int(hit.sum())
    assignment[boundary_idx] = joined
    return reattached, int(boundary_idx.size) - reattached


def segment_single_object(positions: np.ndarray, epsilon: float) -> SingleObjectResult:
    """Fragmentation of one object: plain distance components, no class or boundary rules."""
    positions = np.asarray(positions, dtype=np.float64)
    if positions.size == 0:
        raise ValueError("object has no points")
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    n = positions.shape[0]
    tree = cKDTree(positions)
    pairs = tree.query_pairs(epsilon, output_type="ndarray").astype(np.int64, copy=False)
    labels = _component_labels(n, pairs)
    sizes = np.bincount(labels)
    sizes = sizes[sizes > 0]
    return SingleObjectResult(int(sizes.size), float(sizes.max() / n))
