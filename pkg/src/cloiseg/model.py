"""Core data model and file I/O for class-labeled industrial point clouds.

A cloud is stored columnar (numpy arrays) for speed; per-point access goes
through :class:`PointRecord`. Instance ids are kept in canonical form:
instances are numbered 0..K-1 by ascending smallest member point index,
``NOISE`` (-1) marks unassigned/absent.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import IntEnum
from pathlib import Path
from typing import Iterable, Iterator, Mapping

import numpy as np

NOISE = -1

_HEADER_RE = re.compile(r"^cloi-pts v1 n=(\d+)\s*$")


class ClassLabel(IntEnum):
    """The seven CLOI object classes plus the other/clutter class."""

    OTHER = 0
    ANGLE = 1
    CHANNEL = 2
    CYLINDER = 3
    ELBOW = 4
    IBEAM = 5
    FLANGE = 6
    VALVE = 7


#: The seven CLOI classes; OTHER is excluded from mean metrics.
CLOI_CLASSES = tuple(c for c in ClassLabel if c is not ClassLabel.OTHER)


class PtsParseError(ValueError):
    """Malformed CLOI-PTS (or PLY) content; carries the offending line."""

    def __init__(self, path, line_no: int | None, message: str):
        self.path = str(path)
        self.line_no = line_no
        where = f"{self.path}:{line_no}" if line_no is not None else self.path
        super().__init__(f"{where}: {message}")


@dataclass(frozen=True)
class Point3:
    """A finite 3D position in meters."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        for v in (self.x, self.y, self.z):
            if not np.isfinite(v):
                raise ValueError(f"coordinates must be finite, got {(self.x, self.y, self.z)}")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=np.float64)


@dataclass(frozen=True)
class PointRecord:
    """One point of a labeled cloud.

    ``gt_instance``/``pred_instance`` are ``None`` when the cloud carries no
    such column; ``pred_instance == NOISE`` means segmented but unassigned.
    """

    position: Point3
    class_label: ClassLabel
    gt_instance: int | None = None
    boundary: bool = False
    pred_instance: int | None = None


def canonical_instance_ids(ids: np.ndarray) -> np.ndarray:
    """Relabel non-negative ids to 0..K-1 by ascending smallest member index.

    NOISE entries are preserved. Idempotent.
    """
    ids = np.asarray(ids, dtype=np.int64)
    out = np.full(ids.shape, NOISE, dtype=np.int64)
    mask = ids >= 0
    if not mask.any():
        return out
    _, first, inv = np.unique(ids[mask], return_index=True, return_inverse=True)
    order = np.argsort(first, kind="stable")
    rank = np.empty_like(order)
    rank[order] = np.arange(order.size)
    out[mask] = rank[inv]
    return out


def _first_class_conflict(class_labels: np.ndarray, instance_ids: np.ndarray) -> int | None:
    """Index of the first point whose class disagrees with its instance, or None."""
    mask = instance_ids >= 0
    if not mask.any():
        return None
    cls = class_labels[mask]
    _, first, inv = np.unique(instance_ids[mask], return_index=True, return_inverse=True)
    bad = np.nonzero(cls != cls[first][inv])[0]
    if bad.size == 0:
        return None
    return int(np.nonzero(mask)[0][bad[0]])


class LabeledPointCloud:
    """Ordered set of labeled 3D points.

    Attributes are plain numpy arrays and must be treated as immutable after
    construction; all deriving operations return new clouds. Ground-truth and
    predicted instance ids are canonicalized on construction.
    """

    def __init__(
        self,
        positions: np.ndarray,
        class_labels: np.ndarray,
        gt_instance: np.ndarray | None = None,
        pred_instance: np.ndarray | None = None,
        boundary: np.ndarray | None = None,
    ):
        positions = np.ascontiguousarray(positions, dtype=np.float64)
        if positions.ndim != 2 or positions.shape[1] != 3:
            raise ValueError(f"positions must have shape (N, 3), got {positions.shape}")
        n = positions.shape[0]
        if not np.isfinite(positions).all():
            i = int(np.nonzero(~np.isfinite(positions).all(axis=1))[0][0])
            raise ValueError(f"non-finite coordinate at point {i}")

        class_labels = np.asarray(class_labels, dtype=np.int64)
        if class_labels.shape != (n,):
            raise ValueError("class_labels must have one entry per point")
        if n and (class_labels.min() < 0 or class_labels.max() > 7):
            i = int(np.nonzero((class_labels < 0) | (class_labels > 7))[0][0])
            raise ValueError(f"class code out of range [0,7] at point {i}")

        if gt_instance is None:
            gt_instance = np.full(n, NOISE, dtype=np.int64)
        else:
            gt_instance = np.asarray(gt_instance, dtype=np.int64)
            if gt_instance.shape != (n,):
                raise ValueError("gt_instance must have one entry per point")
            if n and gt_instance.min() < NOISE:
                i = int(np.nonzero(gt_instance < NOISE)[0][0])
                raise ValueError(f"instance id must be >= -1 at point {i}")
        conflict = _first_class_conflict(class_labels, gt_instance)
        if conflict is not None:
            raise ValueError(f"mixed-class ground-truth instance at point {conflict}")

        if pred_instance is not None:
            pred_instance = np.asarray(pred_instance, dtype=np.int64)
            if pred_instance.shape != (n,):
                raise ValueError("pred_instance must have one entry per point")
            pred_instance = canonical_instance_ids(pred_instance)

        if boundary is None:
            boundary = np.zeros(n, dtype=bool)
        else:
            boundary = np.asarray(boundary, dtype=bool)
            if boundary.shape != (n,):
                raise ValueError("boundary must have one entry per point")

        self.positions = positions
        self.class_labels = class_labels
        self.gt_instance = canonical_instance_ids(gt_instance)
        self.pred_instance = pred_instance
        self.boundary = boundary

    def __len__(self) -> int:
        return self.positions.shape[0]

    def __iter__(self) -> Iterator[PointRecord]:
        return (self.record(i) for i in range(len(self)))

    @property
    def has_ground_truth(self) -> bool:
        """True when every point carries a ground-truth instance id."""
        return len(self) > 0 and bool((self.gt_instance >= 0).all())

    @property
    def has_predictions(self) -> bool:
        return self.pred_instance is not None

    def record(self, i: int) -> PointRecord:
        if not 0 <= i < len(self):
            raise IndexError(f"point index {i} out of range for cloud of size {len(self)}")
        gt = int(self.gt_instance[i])
        pred = None if self.pred_instance is None else int(self.pred_instance[i])
        return PointRecord(
            position=Point3(*self.positions[i]),
            class_label=ClassLabel(int(self.class_labels[i])),
            gt_instance=None if gt == NOISE else gt,
            boundary=bool(self.boundary[i]),
            pred_instance=pred,
        )

    def take(self, indices) -> "LabeledPointCloud":
        """New cloud of the given points, in the given order."""
        idx = np.asarray(indices, dtype=np.int64)
        return LabeledPointCloud(
            self.positions[idx],
            self.class_labels[idx],
            self.gt_instance[idx],
            None if self.pred_instance is None else self.pred_instance[idx],
            self.boundary[idx],
        )

    def with_predictions(self, assignment: np.ndarray) -> "LabeledPointCloud":
        return LabeledPointCloud(
            self.positions, self.class_labels, self.gt_instance, assignment, self.boundary
        )

    def with_boundary(self, flags: np.ndarray) -> "LabeledPointCloud":
        return LabeledPointCloud(
            self.positions, self.class_labels, self.gt_instance, self.pred_instance, flags
        )

    @classmethod
    def from_records(cls, records: Iterable[PointRecord]) -> "LabeledPointCloud":
        records = list(records)
        n = len(records)
        positions = np.array([[r.position.x, r.position.y, r.position.z] for r in records],
                             dtype=np.float64).reshape(n, 3)
        classes = np.array([int(r.class_label) for r in records], dtype=np.int64)
        gt = np.array([NOISE if r.gt_instance is None else r.gt_instance for r in records],
                      dtype=np.int64)
        has_pred = any(r.pred_instance is not None for r in records)
        pred = None
        if has_pred:
            pred = np.array([NOISE if r.pred_instance is None else r.pred_instance
                             for r in records], dtype=np.int64)
        flags = np.array([r.boundary for r in records], dtype=bool)
        return cls(positions, classes, gt, pred, flags)


# ---------------------------------------------------------------------------
# CLOI-PTS text format
# ---------------------------------------------------------------------------

def _validate_table(path, table: np.ndarray, first_data_line: int) -> LabeledPointCloud:
    """Build a cloud from a parsed (N, 5|6) float table, reporting bad lines."""
    n, ncol = table.shape
    if ncol not in (5, 6):
        raise PtsParseError(path, first_data_line,
                            f"expected 5 or 6 columns, got {ncol}")
    coords = table[:, :3]
    bad = ~np.isfinite(coords).all(axis=1)
    if bad.any():
        row = int(np.nonzero(bad)[0][0])
        raise PtsParseError(path, first_data_line + row, "non-finite coordinate")

    def _int_column(col: np.ndarray, name: str, lo: int) -> np.ndarray:
        ok = np.isfinite(col) & (col == np.floor(col)) & (np.abs(col) < 2**53)
        if not ok.all():
            row = int(np.nonzero(~ok)[0][0])
            raise PtsParseError(path, first_data_line + row, f"non-integer {name}")
        ival = col.astype(np.int64)
        below = ival < lo
        if below.any():
            row = int(np.nonzero(below)[0][0])
            raise PtsParseError(path, first_data_line + row, f"{name} below {lo}")
        return ival

    classes = _int_column(table[:, 3], "class code", 0)
    if n and classes.max() > 7:
        row = int(np.nonzero(classes > 7)[0][0])
        raise PtsParseError(path, first_data_line + row, "class code outside [0,7]")
    gt = _int_column(table[:, 4], "instance id", NOISE)
    pred = _int_column(table[:, 5], "instance id", NOISE) if ncol == 6 else None

    conflict = _first_class_conflict(classes, gt)
    if conflict is not None:
        raise PtsParseError(path, first_data_line + conflict,
                            "ground-truth instance mixes class labels")
    return LabeledPointCloud(coords, classes, gt, pred)


def _parse_body_slow(path, lines: list[str], first_data_line: int) -> np.ndarray:
    """Line-by-line fallback parser that pinpoints the malformed line."""
    rows = []
    ncol = None
    for offset, line in enumerate(lines):
        line_no = first_data_line + offset
        tokens = line.split()
        if not tokens:
            raise PtsParseError(path, line_no, "blank line in point data")
        if ncol is None:
            if len(tokens) not in (5, 6):
                raise PtsParseError(path, line_no,
                                    f"expected 5 or 6 columns, got {len(tokens)}")
            ncol = len(tokens)
        elif len(tokens) != ncol:
            raise PtsParseError(path, line_no,
                                f"expected {ncol} columns, got {len(tokens)}")
        try:
            rows.append([float(t) for t in tokens])
        except ValueError:
            raise PtsParseError(path, line_no, f"unparseable number in {tokens!r}") from None
    return np.array(rows, dtype=np.float64).reshape(len(rows), ncol or 5)


def load_pts(path) -> LabeledPointCloud:
    """Load a CLOI-PTS file (header ``cloi-pts v1 n=<N>`` + one line per point)."""
    path = Path(path)
    with path.open("r", encoding="utf-8") as f:
        header = f.readline()
        m = _HEADER_RE.match(header)
        if not m:
            raise PtsParseError(path, 1, f"bad header {header.rstrip()!r}")
        n = int(m.group(1))
        body = f.read()
    lines = body.splitlines()
    # trailing blank lines are tolerated; interior blanks are errors
    while lines and not lines[-1].strip():
        lines.pop()
    if len(lines) != n:
        raise PtsParseError(path, None, f"header declares n={n} but file has {len(lines)} data lines")
    if n == 0:
        return LabeledPointCloud(np.empty((0, 3)), np.empty(0, dtype=np.int64))
    try:
        table = np.loadtxt(lines, dtype=np.float64, ndmin=2)
        if table.shape[0] != n:
            raise ValueError("row count mismatch")
    except PtsParseError:
        raise
    except Exception:
        table = _parse_body_slow(path, lines, first_data_line=2)
    return _validate_table(path, table, first_data_line=2)


def save_pts(cloud: LabeledPointCloud, path, include_predictions: bool = False) -> None:
    """Write a cloud as CLOI-PTS. Coordinates round-trip bit-exactly via repr."""
    if include_predictions and cloud.pred_instance is None:
        raise ValueError("cloud has no predictions to write")
    path = Path(path)
    pos, cls, gt = cloud.positions, cloud.class_labels, cloud.gt_instance
    pred = cloud.pred_instance

    def lines():
        yield f"cloi-pts v1 n={len(cloud)}\n"
        for i in range(len(cloud)):
            x, y, z = pos[i]
            row = f"{float(x)!r} {float(y)!r} {float(z)!r} {cls[i]} {gt[i]}"
            if include_predictions:
                row += f" {pred[i]}"
            yield row + "\n"

    with path.open("w", encoding="utf-8") as f:
        f.writelines(lines())


# ---------------------------------------------------------------------------
# ASCII PLY convenience importer
# ---------------------------------------------------------------------------

def load_ply(path) -> LabeledPointCloud:
    """Import an ASCII PLY vertex cloud (properties x, y, z[, class][, instance])."""
    path = Path(path)
    with path.open("r", encoding="utf-8") as f:
        if f.readline().strip() != "ply":
            raise PtsParseError(path, 1, "not a PLY file")
        fmt = f.readline().strip()
        if fmt != "format ascii 1.0":
            raise PtsParseError(path, 2, f"only ASCII PLY is supported, got {fmt!r}")
        n_vertex = None
        properties: list[str] = []
        in_vertex = False
        line_no = 2
        for line in f:
            line_no += 1
            tokens = line.split()
            if not tokens or tokens[0] == "comment":
                continue
            if tokens[0] == "element":
                in_vertex = tokens[1] == "vertex"
                if in_vertex:
                    n_vertex = int(tokens[2])
            elif tokens[0] == "property" and in_vertex:
                properties.append(tokens[-1])
            elif tokens[0] == "end_header":
                break
        else:
            raise PtsParseError(path, line_no, "missing end_header")
        if n_vertex is None:
            raise PtsParseError(path, line_no, "missing vertex element")
        for req in ("x", "y", "z"):
            if req not in properties:
                raise PtsParseError(path, line_no, f"missing vertex property {req!r}")
        rows = []
        for i in range(n_vertex):
            line = f.readline()
            line_no += 1
            tokens = line.split()
            if len(tokens) != len(properties):
                raise PtsParseError(path, line_no,
                                    f"expected {len(properties)} values, got {len(tokens)}")
            try:
                rows.append([float(t) for t in tokens])
            except ValueError:
                raise PtsParseError(path, line_no, f"unparseable number in {tokens!r}") from None
    data = np.array(rows, dtype=np.float64).reshape(n_vertex, len(properties))
    col = {name: i for i, name in enumerate(properties)}
    coords = data[:, [col["x"], col["y"], col["z"]]]
    classes = (data[:, col["class"]].astype(np.int64)
               if "class" in col else np.zeros(n_vertex, dtype=np.int64))
    gt = (data[:, col["instance"]].astype(np.int64)
          if "instance" in col else np.full(n_vertex, NOISE, dtype=np.int64))
    try:
        return LabeledPointCloud(coords, classes, gt)
    except ValueError as exc:
        raise PtsParseError(path, None, str(exc)) from exc


# ---------------------------------------------------------------------------
# Subsampling and statistics
# ---------------------------------------------------------------------------

def farthest_point_subsample(cloud: LabeledPointCloud, k: int, seed: int) -> LabeledPointCloud:
    """Farthest-point subsample of ``k`` points.

    The first point is a seeded uniform draw; every further point maximizes
    its minimum distance to the selected set (ties broken by lowest index).
    Labels are carried through unchanged; output is in selection order.
    """
    n = len(cloud)
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    pos = cloud.positions
    selected = np.empty(k, dtype=np.int64)
    selected[0] = int(rng.integers(n))
    dist = np.linalg.norm(pos - pos[selected[0]], axis=1)
    dist[selected[0]] = -np.inf
    for m in range(1, k):
        i = int(np.argmax(dist))
        selected[m] = i
        dist = np.minimum(dist, np.linalg.norm(pos - pos[i], axis=1))
        dist[i] = -np.inf
    return cloud.take(selected)


def class_histogram(cloud: LabeledPointCloud) -> Mapping[ClassLabel, tuple[int, int]]:
    """Per-class (instance count, point count); requires ground truth."""
    if len(cloud) and not cloud.has_ground_truth:
        raise ValueError("class_histogram requires ground-truth instance ids on every point")
    out: dict[ClassLabel, tuple[int, int]] = {}
    for label in ClassLabel:
        mask = cloud.class_labels == int(label)
        n_points = int(mask.sum())
        n_instances = int(np.unique(cloud.gt_instance[mask]).size) if n_points else 0
        out[label] = (n_instances, n_points)
    return out
