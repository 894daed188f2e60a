import numpy as np
import pytest

from lpattr.data import generate_dataset, label_residual, load_dataset, save_dataset
from lpattr.encodings import make_encoding
from lpattr.errors import CoverageError, ValidationError
from lpattr.fixtures import lp_box, lp_tri
from lpattr.lp import feasible_mask


BOX_BBOX = np.array([[0.0, 3.0], [0.0, 4.5]])


def test_balanced_feasibility_counts():
    lp = lp_box()
    ds = generate_dataset(lp, make_encoding(lp, "feasibility"), 1000, bbox=BOX_BBOX, seed=7)
    feasible = int(ds.y.sum())
    assert 450 <= feasible <= 550
    assert feasible == 500  # stratified pools fill exactly when both regions are large
    assert ds.feasible_fraction == pytest.approx(0.5)
    assert not ds.balance_warning


def test_empty_dataset():
    lp = lp_box()
    ds = generate_dataset(lp, make_encoding(lp, "feasibility"), 0, seed=1)
    assert len(ds) == 0
    assert ds.X.shape == (0, 2)


def test_determinism():
    lp = lp_box()
    enc = make_encoding(lp, "boundary-distance")
    a = generate_dataset(lp, enc, 500, seed=42)
    b = generate_dataset(lp, enc, 500, seed=42)
    np.testing.assert_array_equal(a.X, b.X)
    np.testing.assert_array_equal(a.y, b.y)
    np.testing.assert_array_equal(a.train_indices, b.train_indices)
    c = generate_dataset(lp, enc, 500, seed=43)
    assert not np.array_equal(a.X, c.X)


def test_labels_recomputable():
    lp = lp_box()
    for kind in ("feasibility", "gain-penalty", "vertex-distance"):
        enc = make_encoding(lp, kind)
        ds = generate_dataset(lp, enc, 300, seed=5)
        assert label_residual(ds, lp) == 0.0


def test_default_bbox_is_inflated_vertex_box():
    lp = lp_box()
    ds = generate_dataset(lp, make_encoding(lp, "feasibility"), 100, seed=3)
    np.testing.assert_allclose(ds.bbox, BOX_BBOX)
    assert (ds.X >= 0).all()
    assert (ds.X <= ds.bbox[:, 1]).all()


def test_split_sizes_and_disjointness():
    lp = lp_box()
    ds = generate_dataset(lp, make_encoding(lp, "feasibility"), 1000, seed=9)
    assert len(ds.val_indices) == 100
    assert len(ds.train_indices) == 900
    assert not set(ds.train_indices) & set(ds.val_indices)
    assert set(ds.train_indices) | set(ds.val_indices) == set(range(1000))


def test_coverage_error_when_bbox_misses_polytope():
    lp = lp_tri()
    bad = np.array([[5.0, 6.0], [5.0, 6.0]])  # entirely infeasible region
    with pytest.raises(CoverageError):
        generate_dataset(lp, make_encoding(lp, "feasibility"), 100, bbox=bad, seed=1)


def test_balance_warning_on_thin_feasible_region():
    lp = lp_tri()
    wide = np.array([[0.0, 40.0], [0.0, 40.0]])  # feasible region is 0.5% of the box
    ds = generate_dataset(lp, make_encoding(lp, "feasibility"), 4000, bbox=wide, seed=2)
    assert len(ds) == 4000
    assert ds.balance_warning
    assert ds.feasible_fraction < 0.45


def test_bbox_validation():
    lp = lp_box()
    enc = make_encoding(lp, "feasibility")
    with pytest.raises(ValidationError):
        generate_dataset(lp, enc, 10, bbox=np.array([[0.0, 1.0]]), seed=1)
    with pytest.raises(ValidationError):
        generate_dataset(lp, enc, 10, bbox=np.array([[1.0, 0.0], [0.0, 1.0]]), seed=1)
    with pytest.raises(ValidationError):
        generate_dataset(lp, enc, 10, bbox=np.array([[-1.0, 1.0], [0.0, 1.0]]), seed=1)


def test_coverage_of_polytope_bounding_box():
    lp = lp_tri()
    ds = generate_dataset(lp, make_encoding(lp, "feasibility"), 10_000, seed=11)
    # every cell of a 10x10 partition of the vertex bounding box gets a sample
    edges = np.linspace(0.0, 4.0, 11)
    counts = np.histogram2d(ds.X[:, 0], ds.X[:, 1], bins=[edges, edges])[0]
    assert (counts > 0).all()


def test_stream_order_mixes_classes():
    lp = lp_box()
    ds = generate_dataset(lp, make_encoding(lp, "feasibility"), 1000, seed=13)
    flips = np.abs(np.diff(feasible_mask(lp, ds.X).astype(int))).sum()
    assert flips > 100  # draw order, not feasible block then infeasible block


def test_round_trip_exact(tmp_path):
    lp = lp_box()
    enc = make_encoding(lp, "vertex-distance", excluded_vertices=[[0.0, 0.0]])
    ds = generate_dataset(lp, enc, 250, seed=17)
    path = tmp_path / "ds.csv"
    save_dataset(ds, path)
    back = load_dataset(path)
    np.testing.assert_array_equal(ds.X, back.X)
    np.testing.assert_array_equal(ds.y, back.y)
    np.testing.assert_array_equal(ds.train_indices, back.train_indices)
    np.testing.assert_array_equal(ds.excluded_vertices, back.excluded_vertices)
    assert back.lp_digest == lp.digest()
    assert back.kind == "vertex-distance"


def test_save_is_byte_deterministic(tmp_path):
    lp = lp_box()
    enc = make_encoding(lp, "feasibility")
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    save_dataset(generate_dataset(lp, enc, 400, seed=23), p1)
    save_dataset(generate_dataset(lp, enc, 400, seed=23), p2)
    assert p1.read_bytes() == p2.read_bytes()
    assert (tmp_path / "a.csv.meta.json").read_bytes() == (tmp_path / "b.csv.meta.json").read_bytes()
