"""Instance-level scoring: IoU, threshold matching, precision/recall reports.

Matching is greedy one-to-one by descending IoU (ties: lower pred id, then
lower gt id) over class-consistent pairs with IoU >= t. Precision and recall
with an empty denominator are reported as NaN and excluded from means; mean
metrics cover the seven CLOI classes only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .model import CLOI_CLASSES, NOISE, ClassLabel
from .segmentation import InstanceLabeling, SingleObjectResult

THRESHOLDS = (0.25, 0.50, 0.75)


def iou(pred_set, gt_set) -> float:
    """Intersection over union of two non-empty point-index sets."""
    a = np.unique(np.asarray(list(pred_set) if isinstance(pred_set, (set, frozenset)) else pred_set,
                             dtype=np.int64))
    b = np.unique(np.asarray(list(gt_set) if isinstance(gt_set, (set, frozenset)) else gt_set,
                             dtype=np.int64))
    if a.size == 0 or b.size == 0:
        raise ValueError("iou requires non-empty sets")
    inter = np.intersect1d(a, b, assume_unique=True).size
    return inter / (a.size + b.size - inter)


@dataclass(frozen=True)
class MatchedPair:
    pred_id: int
    gt_id: int
    iou: float


@dataclass(frozen=True)
class MatchResult:
    pairs: tuple[MatchedPair, ...]
    unmatched_preds: tuple[int, ...]
    unmatched_gts: tuple[int, ...]
    threshold: float


def _candidate_pairs(pred: InstanceLabeling, gt: InstanceLabeling, threshold: float):
    """(pred_id, gt_id, iou) for every class-consistent pair with IoU >= t."""
    pa, ga = pred.assignment, gt.assignment
    both = (pa != NOISE) & (ga != NOISE)
    if not both.any():
        return []
    n_gt = gt.n_instances
    codes = pa[both] * n_gt + ga[both]
    uniq, counts = np.unique(codes, return_counts=True)
    p_ids = uniq // n_gt
    g_ids = uniq % n_gt
    p_sizes = pred.sizes()
    g_sizes = gt.sizes()
    out = []
    for p, g, inter in zip(p_ids, g_ids, counts):
        if pred.instance_classes[p] != gt.instance_classes[g]:
            continue
        v = inter / (p_sizes[p] + g_sizes[g] - inter)
        if v >= threshold:
            out.append((int(p), int(g), float(v)))
    return out


def match_instances(pred: InstanceLabeling, gt: InstanceLabeling, threshold: float) -> MatchResult:
    """Greedy one-to-one matching of predicted to ground-truth instances."""
    if pred.assignment.shape != gt.assignment.shape:
        raise ValueError("labelings cover clouds of different sizes")
    if not 0 < threshold <= 1:
        raise ValueError(f"threshold must be in (0, 1], got {threshold}")
    candidates = _candidate_pairs(pred, gt, threshold)
    candidates.sort(key=lambda c: (-c[2], c[0], c[1]))
    pred_taken = set()
    gt_taken = set()
    pairs = []
    for p, g, v in candidates:
        if p in pred_taken or g in gt_taken:
            continue
        pred_taken.add(p)
        gt_taken.add(g)
        pairs.append(MatchedPair(p, g, v))
    unmatched_p = tuple(p for p in range(pred.n_instances) if p not in pred_taken)
    unmatched_g = tuple(g for g in range(gt.n_instances) if g not in gt_taken)
    return MatchResult(tuple(pairs), unmatched_p, unmatched_g, threshold)


@dataclass(frozen=True)
class ClassMetrics:
    tp: int
    fp: int
    fn: int

    @property
    def precision(self) -> float:
        return self.tp / (self.tp + self.fp) if self.tp + self.fp else math.nan

    @property
    def recall(self) -> float:
        return self.tp / (self.tp + self.fn) if self.tp + self.fn else math.nan


@dataclass(frozen=True)
class ThresholdMetrics:
    threshold: float
    per_class: dict[ClassLabel, ClassMetrics]

    def _mean(self, attr: str) -> float:
        values = [getattr(self.per_class[c], attr) for c in CLOI_CLASSES]
        defined = [v for v in values if not math.isnan(v)]
        return sum(defined) / len(defined) if defined else math.nan

    @property
    def mean_precision(self) -> float:
        return self._mean("precision")

    @property
    def mean_recall(self) -> float:
        return self._mean("recall")


@dataclass(frozen=True)
class EvalReport:
    """Per-class and mean precision/recall at each IoU threshold."""

    thresholds: tuple[float, ...]
    by_threshold: dict[float, ThresholdMetrics]

    def to_rows(self) -> tuple[list[str], list[dict]]:
        """Tidy CSV projection: one row per class plus a mean row."""
        fields = ["class"]
        for t in self.thresholds:
            fields += [f"prec@{t:g}", f"rec@{t:g}"]
        for t in self.thresholds:
            fields += [f"tp@{t:g}", f"fp@{t:g}", f"fn@{t:g}"]
        rows = []
        for c in ClassLabel:
            row: dict = {"class": c.name.lower()}
            for t in self.thresholds:
                m = self.by_threshold[t].per_class[c]
                row[f"prec@{t:g}"] = m.precision
                row[f"rec@{t:g}"] = m.recall
                row[f"tp@{t:g}"] = m.tp
                row[f"fp@{t:g}"] = m.fp
                row[f"fn@{t:g}"] = m.fn
            rows.append(row)
        mean_row: dict = {"class": "mean"}
        for t in self.thresholds:
            tm = self.by_threshold[t]
            mean_row[f"prec@{t:g}"] = tm.mean_precision
            mean_row[f"rec@{t:g}"] = tm.mean_recall
            for name in ("tp", "fp", "fn"):
                mean_row[f"{name}@{t:g}"] = sum(
                    getattr(tm.per_class[c], name) for c in CLOI_CLASSES
                )
        rows.append(mean_row)
        return fields, rows


def score(
    pred: InstanceLabeling,
    gt: InstanceLabeling,
    thresholds: Sequence[float] = THRESHOLDS,
) -> EvalReport:
    """Score a prediction against ground truth at each IoU threshold."""
    thresholds = tuple(thresholds)
    by_threshold = {}
    pred_classes = pred.instance_classes
    gt_classes = gt.instance_classes
    for t in thresholds:
        match = match_instances(pred, gt, t)
        per_class = {}
        for c in ClassLabel:
            tp = sum(1 for pair in match.pairs if pred_classes[pair.pred_id] == int(c))
            fp = sum(1 for p in match.unmatched_preds if pred_classes[p] == int(c))
            fn = sum(1 for g in match.unmatched_gts if gt_classes[g] == int(c))
            per_class[c] = ClassMetrics(tp, fp, fn)
        by_threshold[t] = ThresholdMetrics(t, per_class)
    return EvalReport(thresholds, by_threshold)


def rec_ins(results: Sequence[SingleObjectResult], threshold: float) -> float:
    """Fraction of objects whose largest single-object component reaches the IoU threshold."""
    if not results:
        raise ValueError("rec_ins requires at least one ground-truth instance")
    if not 0 < threshold <= 1:
        raise ValueError(f"threshold must be in (0, 1], got {threshold}")
    hits = sum(1 for r in results if r.largest_fraction >= threshold)
    return hits / len(results)
