from __future__ import annotations

import csv
import io
import math

import pytest

from cloiseg import (
    ClassLabel,
    InstanceLabeling,
    SegmentationParams,
    ShapeSpec,
    SceneSpec,
    SweepSpec,
    facility_bias_report,
    generate_scene,
    make_benchmark_suite,
    score,
    segment,
    sweep_epsilon,
    sweep_mu,
    sweep_radius_per_object,
    write_csv,
)
from cloiseg.sweep import rows_to_csv_text


@pytest.fixture(scope="module")
def dense_cloud():
    (spec, _), = make_benchmark_suite("dense", seed=7)
    return generate_scene(spec)


def _gt(cloud):
    return InstanceLabeling.from_assignment(cloud.gt_instance, cloud.class_labels)


def test_sweep_spec_validation():
    with pytest.raises(ValueError):
        SweepSpec(epsilons=())
    with pytest.raises(ValueError):
        SweepSpec(epsilons=(0.02, 0.01))
    with pytest.raises(ValueError):
        SweepSpec(mus=(0,))
    spec = SweepSpec()
    assert spec.epsilons[0] == 0.01 and spec.mus[-1] == 200


def test_sweep_mu_flat_on_clean_scene(dense_cloud):
    rows = sweep_mu(dense_cloud, epsilon=0.04, mus=(10, 20, 50, 100, 150, 200), threshold=0.5)
    first = rows[0]
    for row in rows[1:]:
        for key, val in first.items():
            if key == "mu":
                continue
            same = (math.isnan(val) and math.isnan(row[key])) or row[key] == val
            assert same, f"{key} changed across mu"


def test_sweep_mu_single_point_grid_matches_direct_run(dense_cloud):
    (row,) = sweep_mu(dense_cloud, epsilon=0.04, mus=(20,), threshold=0.5)
    pred = segment(dense_cloud, SegmentationParams(epsilon=0.04, mu=20))
    tm = score(pred, _gt(dense_cloud), thresholds=(0.5,)).by_threshold[0.5]
    assert row["m_prec"] == tm.mean_precision
    assert row["m_rec"] == tm.mean_recall


def _fragment_scene():
    """Cylinders whose far tail splits off as a ~30-40 point false instance."""
    shapes = []
    for i in range(3):
        shapes.append(ShapeSpec(
            ClassLabel.CYLINDER, (i * 1.0, 0.0, 0.0),
            {"radius": 0.04, "length": 0.5},
            density=6000.0, gaps=((0.85, 0.97),),
        ))
    return generate_scene(SceneSpec(tuple(shapes), seed=13))


def test_sweep_mu_trends_on_noisy_scene():
    cloud = _fragment_scene()
    rows = sweep_mu(cloud, epsilon=0.04, mus=(10, 20, 30, 50), threshold=0.5)
    precs = [r["m_prec"] for r in rows]
    recs = [r["m_rec"] for r in rows]
    assert all(b >= a - 1e-12 for a, b in zip(precs, precs[1:]))
    assert all(b <= a + 1e-12 for a, b in zip(recs, recs[1:]))
    assert precs[-1] > precs[0]  # the 30-point tails are filtered by mu=50


def test_sweep_mu_recall_non_increasing_with_unsorted_grid_rejected(dense_cloud):
    with pytest.raises(ValueError):
        sweep_mu(dense_cloud, 0.04, mus=(50, 10))


def test_sweep_epsilon_well_separated_scene_plateaus(dense_cloud):
    rows = sweep_epsilon(dense_cloud, epsilons=(0.01, 0.02, 0.03, 0.04), mu=20)
    rec = [r["m_rec@0.5"] for r in rows]
    assert rec[-1] == 1.0
    counts = [r["instances_prefilter"] for r in rows]
    assert counts[0] >= counts[-1]
    assert rows[-1]["instances"] == int(dense_cloud.gt_instance.max()) + 1


def test_sweep_epsilon_merging_degrades_recall():
    # two same-class cylinders with a 2.8cm surface gap merge once the
    # radius reaches ~3cm, halving recall at the 0.5 threshold
    shapes = (
        ShapeSpec(ClassLabel.CYLINDER, (0.0, 0.0, 0.0), {"radius": 0.04, "length": 0.5},
                  density=30000.0),
        ShapeSpec(ClassLabel.CYLINDER, (0.108, 0.0, 0.0), {"radius": 0.04, "length": 0.5},
                  density=30000.0),
    )
    cloud = generate_scene(SceneSpec(shapes, seed=21))
    rows = sweep_epsilon(cloud, epsilons=(0.02, 0.03, 0.04, 0.05), mu=20, thresholds=(0.5,))
    rec = {r["epsilon"]: r["m_rec@0.5"] for r in rows}
    assert rec[0.02] == 1.0
    assert rec[0.04] < 1.0
    assert rec[0.05] < 1.0


def test_sweep_epsilon_rows_reproducible(dense_cloud, rng):
    rows = sweep_epsilon(dense_cloud, epsilons=(0.02, 0.04, 0.06), mu=20)
    for row in [rows[i] for i in rng.choice(len(rows), 3, replace=False)]:
        params = SegmentationParams(epsilon=row["epsilon"], mu=20)
        pred = segment(dense_cloud, params)
        tm = score(pred, _gt(dense_cloud), thresholds=(0.5,)).by_threshold[0.5]
        assert row["m_rec@0.5"] == tm.mean_recall
        assert row["m_prec@0.5"] == tm.mean_precision


def test_sweep_radius_dense_scene_perfect_from_one_cm(dense_cloud):
    rows, selected = sweep_radius_per_object(dense_cloud, epsilons=(0.01, 0.02, 0.04))
    assert all(r["m_rec_ins@0.5"] == 1.0 for r in rows)
    assert selected == 0.01
    assert all(b["m_rec_ins@0.5"] >= a["m_rec_ins@0.5"] for a, b in zip(rows, rows[1:]))


def test_sweep_radius_gapped_profile_selects_four_cm():
    (spec, manifest), = make_benchmark_suite("gapped", seed=5)
    cloud = generate_scene(spec)
    rows, selected = sweep_radius_per_object(cloud)
    assert selected == manifest["expected_radius_selection"]
    below = [r for r in rows if r["epsilon"] < 0.04]
    assert all(r["m_rec_ins@0.5"] < 0.9 for r in below)
    vals = [r["m_rec_ins@0.5"] for r in rows]
    assert all(b >= a for a, b in zip(vals, vals[1:]))


def test_sweep_radius_reports_per_class_rec_ins(dense_cloud):
    rows, _ = sweep_radius_per_object(dense_cloud, epsilons=(0.04,))
    row = rows[0]
    assert row["rec_ins_cylinder@0.5"] == 1.0
    assert math.isnan(row["rec_ins_other@0.5"])  # no clutter in the dense scene


def test_facility_bias_identical_clouds(dense_cloud):
    rows, summary = facility_bias_report(
        [("a", dense_cloud), ("b", dense_cloud)], SegmentationParams(), 0.5)
    assert summary["m_prec_std"] == 0.0
    assert summary["m_rec_std"] == 0.0
    assert rows[0]["m_prec"] == rows[1]["m_prec"]


def test_facility_bias_requires_two_clouds(dense_cloud):
    with pytest.raises(ValueError):
        facility_bias_report([("a", dense_cloud)], SegmentationParams(), 0.5)


def test_facility_bias_across_four_synthetic_facilities():
    named = []
    for profile in ("dense", "sparse", "cluttered", "refinery-like"):
        (spec, _), = make_benchmark_suite(profile, seed=3)
        named.append((profile, generate_scene(spec)))
    rows, summary = facility_bias_report(named, SegmentationParams(), 0.5)
    assert len(rows) == 4
    recs = [r["m_rec"] for r in rows]
    assert summary["m_rec_mean"] == pytest.approx(sum(recs) / 4, abs=1e-12)
    assert summary["m_rec_std"] >= 0.0  # descriptive spread, no pass/fail level


def test_write_csv_roundtrip_and_mean_consistency(tmp_path, dense_cloud):
    rows = sweep_mu(dense_cloud, 0.04, mus=(10, 20), threshold=0.5)
    path = tmp_path / "out.csv"
    write_csv(rows, path)
    with open(path, newline="") as f:
        back = list(csv.DictReader(f))
    assert len(back) == 2
    for raw, row in zip(back, rows):
        class_cols = [c for c in raw if c.startswith("prec_") and c != "prec_other"]
        emitted = float(raw["m_prec"])
        vals = [float(raw[c]) for c in class_cols]
        defined = [v for v in vals if not math.isnan(v)]
        assert abs(emitted - sum(defined) / len(defined)) < 1e-9
        assert float(raw["m_prec"]) == row["m_prec"]  # full-precision floats


def test_rows_to_csv_text_header_order(dense_cloud):
    rows = sweep_epsilon(dense_cloud, epsilons=(0.04,), mu=20, thresholds=(0.5,))
    text = rows_to_csv_text(rows)
    header = text.splitlines()[0].split(",")
    assert header[0] == "epsilon"
    assert "instances_prefilter" in header


def test_write_csv_rejects_empty():
    buf = io.StringIO()
    with pytest.raises(ValueError):
        write_csv([], buf)
