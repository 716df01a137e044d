import json

import numpy as np
import pytest

from qkmeans.data import (
    DataError,
    Dataset,
    PCAModel,
    elbow_curve,
    gen_clusters,
    load_csv,
    load_labels,
    pca_fit,
    pca_transform,
    save_csv,
    save_labels,
)


class TestGenerate:
    @pytest.mark.parametrize("k,per,total", [(4, 15, 60), (8, 14, 112)])
    def test_sizes(self, k, per, total):
        ds = gen_clusters(k, per, 2, 0.1, seed=1)
        assert len(ds) == total
        assert sorted(set(ds.true_labels.tolist())) == list(range(k))

    def test_zero_variance(self):
        ds = gen_clusters(3, 5, 4, 0.0, seed=2)
        np.testing.assert_array_equal(ds.points, ds.centers[ds.true_labels])

    def test_min_sep(self):
        ds = gen_clusters(6, 3, 2, 0.1, min_sep=2.5, seed=3)
        gaps = np.linalg.norm(ds.centers[:, None] - ds.centers[None], axis=2)
        assert np.all(gaps[~np.eye(6, dtype=bool)] >= 2.5)

    def test_box(self):
        ds = gen_clusters(10, 1, 3, 0.0, seed=4, box=(2, 3))
        assert ds.points.min() >= 2 and ds.points.max() <= 3

    def test_members_nearest_own_center(self):
        variance = 0.04
        ds = gen_clusters(5, 30, 3, variance, min_sep=8 * np.sqrt(variance), seed=7)
        dists = np.linalg.norm(ds.points[:, None] - ds.centers[None], axis=2)
        np.testing.assert_array_equal(np.argmin(dists, axis=1), ds.true_labels)

    def test_impossible_separation(self):
        with pytest.raises(DataError, match="could not place"):
            gen_clusters(5, 1, 1, 0.1, min_sep=20)

    def test_seeded(self):
        a, b = gen_clusters(3, 4, 2, 1.0, seed=9), gen_clusters(3, 4, 2, 1.0, seed=9)
        np.testing.assert_array_equal(a.points, b.points)


class TestCsv:
    def test_round_trip(self, tmp_path):
        ds = gen_clusters(3, 4, 3, 1.0, seed=1)
        save_csv(ds, tmp_path / "d.csv")
        back = load_csv(tmp_path / "d.csv")
        np.testing.assert_array_equal(back.points, ds.points)
        np.testing.assert_array_equal(back.true_labels, ds.true_labels)

    def test_with_labels(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("f0,f1,label\n1,2,0\n3,4,1\n")
        ds = load_csv(path)
        assert ds.dim == 2 and ds.true_labels.tolist() == [0, 1]

    def test_without_labels(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("f0,f1\n1,2\n")
        assert load_csv(path).true_labels is None

    def test_bad_row_names_line(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("f0,f1\n1,2\n1,2,3\n")
        with pytest.raises(DataError, match="line 3"):
            load_csv(path)

    def test_bad_header(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("x,y\n1,2\n")
        with pytest.raises(DataError, match="header"):
            load_csv(path)

    def test_non_numeric(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("f0,f1\n1,abc\n")
        with pytest.raises(DataError, match="line 2"):
            load_csv(path)

    def test_labels_round_trip(self, tmp_path):
        save_labels([2, 0, 1], tmp_path / "l.csv")
        assert load_labels(tmp_path / "l.csv").tolist() == [2, 0, 1]

    def test_dataset_label_length(self):
        with pytest.raises(DataError):
            Dataset(np.zeros((3, 2)), np.zeros(2, dtype=int))


class TestPCA:
    def test_plane_in_5d(self, rng):
        basis = np.linalg.qr(rng.normal(size=(5, 2)))[0].T
        ds = Dataset(rng.normal(size=(50, 2)) @ basis + 3.0)
        model = pca_fit(ds, 2)
        assert model.explained_variance_ratio.sum() == pytest.approx(1.0, abs=1e-9)
        out = pca_transform(model, ds).points
        d_in = np.linalg.norm(ds.points[:, None] - ds.points[None], axis=2)
        d_out = np.linalg.norm(out[:, None] - out[None], axis=2)
        np.testing.assert_allclose(d_out, d_in, atol=1e-9)

    def test_full_rank_reconstruction(self, rng):
        ds = Dataset(rng.normal(size=(30, 4)))
        model = pca_fit(ds, 4)
        out = pca_transform(model, ds).points
        np.testing.assert_allclose(out @ model.components + model.mean, ds.points, atol=1e-10)

    def test_components_orthonormal_and_sorted(self, rng):
        ds = Dataset(rng.normal(size=(200, 26)) * np.linspace(0.1, 3, 26))
        model = pca_fit(ds, 10)
        np.testing.assert_allclose(model.components @ model.components.T, np.eye(10), atol=1e-9)
        r = model.explained_variance_ratio
        assert np.all(np.diff(r) <= 1e-15) and np.all(r >= 0) and r.sum() <= 1 + 1e-9

    def test_json_round_trip(self, rng):
        model = pca_fit(Dataset(rng.normal(size=(20, 3))), 2)
        back = PCAModel.from_json(model.to_json())
        np.testing.assert_array_equal(back.components, model.components)
        assert set(json.loads(model.to_json())) >= {"mean", "components"}

    def test_rejects(self):
        with pytest.raises(DataError):
            pca_fit(Dataset(np.ones((5, 3))), 2)
        with pytest.raises(DataError):
            pca_fit(Dataset(np.eye(3)), 4)


class TestElbow:
    def test_k_equals_n(self, rng):
        ds = Dataset(rng.normal(size=(6, 2)))
        assert elbow_curve(ds, 6)[-1] == pytest.approx(0.0, abs=1e-12)

    def test_k1_total_variance(self, rng):
        ds = Dataset(rng.normal(size=(40, 3)))
        assert elbow_curve(ds, 1)[0] == pytest.approx(ds.points.var(axis=0).sum() * 40)

    def test_sharp_drop_at_true_k(self):
        ds = gen_clusters(5, 20, 2, 0.05, min_sep=3.0, seed=8)
        curve = elbow_curve(ds, 8)
        assert all(b <= a + 1e-9 for a, b in zip(curve, curve[1:]))
        drop_into_5 = curve[3] / curve[4]
        drop_after_5 = curve[4] / curve[5]
        assert drop_into_5 > 3 * drop_after_5
