import math

import numpy as np
import pytest

import spoilseg


def test_flat_hillshade_is_sine_of_altitude():
    shade = spoilseg.hillshade(np.zeros((8, 8)))
    assert shade.shape == (8, 8)
    assert np.allclose(shade, math.sin(math.radians(45.0)))


def test_identical_maps_score_fully_correct():
    gt = np.zeros((10, 10), dtype=np.uint32)
    gt[:, :5] = 1
    gt[:, 5:] = 2
    result = spoilseg.evaluate(gt, gt, 0.8)
    assert result["correct_detection"] == 1.0
    assert result["noise"] == 0.0
    assert result["counts"]["correct"] == 2
    assert sorted(result["instances"]["correct"]) == [(1, 1), (2, 2)]


def test_voronoi_recovers_synthetic_piles():
    dsm, gt, centers = spoilseg.synth_pilefield(120, 120, 4, 5.0, 7)
    assert dsm.shape == (120, 120) and gt.dtype == np.uint32
    assert len(centers) == 4
    labels = spoilseg.voronoi_segment(spoilseg.relief8(dsm), sigma=3.0)
    assert labels.shape == gt.shape
    assert spoilseg.evaluate(gt, labels, 0.5)["correct_detection"] >= 0.75


def test_segmenters_return_label_maps():
    rng = np.random.default_rng(3)
    image = np.zeros((24, 24, 3), dtype=np.uint8)
    image[:, 12:] = 200
    image = np.clip(image.astype(int) + rng.integers(-5, 6, image.shape), 0, 255).astype(np.uint8)
    ms = spoilseg.mean_shift_segment(image, spatial_radius=3, range_radius=20, min_region_size=20)
    assert len(np.unique(ms)) == 2
    sp = spoilseg.slic(image, superpixels=4, compactness=10)
    assert sp.min() >= 1 and sp.max() <= 8
    lab = spoilseg.rgb_to_lab(image)
    assert lab.shape == (24, 24, 3)


def test_otsu_and_relabel():
    img = np.array([[10, 10, 200, 200]], dtype=np.uint8)
    t, mask = spoilseg.otsu_threshold(img)
    assert t == 10
    assert mask.tolist() == [[False, False, True, True]]
    labels = np.array([[5, 0, 5]], dtype=np.uint32)
    assert spoilseg.relabel_connected(labels).tolist() == [[1, 0, 2]]


def test_errors_carry_kind():
    with pytest.raises(spoilseg.SpoilsegError) as info:
        spoilseg.evaluate(np.zeros((3, 3), np.uint32), np.zeros((4, 4), np.uint32))
    assert info.value.kind == "dimension_mismatch"
    with pytest.raises(spoilseg.SpoilsegError) as info:
        spoilseg.otsu_threshold(np.full((4, 4), 7, np.uint8))
    assert info.value.kind == "degenerate_input"


def test_sweep_on_arrays_picks_a_best_row():
    dsm, gt, _ = spoilseg.synth_pilefield(120, 120, 4, 5.0, 7)
    report = spoilseg.sweep("voronoi", {"sigma": [1.0, 3.0]}, gt, hillshade=spoilseg.relief8(dsm))
    assert [row["params"]["sigma"] for row in report["rows"]] == [1.0, 3.0]
    assert report["optimum"] is not None


def test_pgm16_round_trip(tmp_path):
    labels = np.arange(12, dtype=np.uint32).reshape(3, 4)
    path = tmp_path / "labels.pgm"
    spoilseg.write_pgm16(labels, path)
    assert np.array_equal(spoilseg.read_pgm16(path), labels)
