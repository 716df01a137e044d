import numpy as np
import pytest

import qkmeans.dist as dist
from qkmeans.backend import BackendProfile, TooManyShots
from qkmeans.cluster import (
    ClusterConfig,
    InfeasibleSeparation,
    NoSeedFound,
    assign,
    classical_nn,
    init_centroids,
    kmeans_classical,
    kmeans_quantum,
    nn_classify,
    seed_search,
    update_centroids,
    wcss,
)
from qkmeans.data import gen_clusters
from qkmeans.dist import EstimatorConfig

SAMPLED = EstimatorConfig(mode="sampled", shots=256)


def runs_equal(a, b):
    return (np.array_equal(a.labels, b.labels) and np.array_equal(a.centroids, b.centroids)
            and a.iterations == b.iterations and a.converged == b.converged
            and all(np.array_equal(x, y) for x, y in zip(a.history, b.history)))


@pytest.fixture
def spy(monkeypatch):
    """Record the size of every batched job."""
    sizes = []
    real = dist.submit_batch

    def wrapper(circuits, *args, **kwargs):
        sizes.append(len(circuits))
        return real(circuits, *args, **kwargs)

    monkeypatch.setattr(dist, "submit_batch", wrapper)
    return sizes


class TestInit:
    def test_single(self, rng):
        data = rng.normal(size=(10, 2))
        c = init_centroids(data, 1, seed=3)
        assert any(np.array_equal(c[0], p) for p in data)

    def test_distinct_points(self, rng):
        data = rng.normal(size=(5, 3))
        c = init_centroids(data, 5)
        assert len({tuple(x) for x in c}) == 5

    def test_epsilon_forces_one_per_blob(self, rng):
        blob_a = rng.normal(scale=0.1, size=(30, 2))
        data = np.vstack([blob_a, blob_a + 10])
        for seed in range(20):
            c = init_centroids(data, 2, epsilon=5.0, seed=seed)
            assert abs(c[0, 0] - c[1, 0]) > 5

    def test_infeasible(self):
        data = np.zeros((4, 2)) + np.arange(4)[:, None] * 0.01
        with pytest.raises(InfeasibleSeparation):
            init_centroids(data, 3, epsilon=1.0)

    def test_k_too_large(self):
        with pytest.raises(ValueError):
            init_centroids(np.zeros((2, 2)), 3)


class TestAssignUpdate:
    def test_assign(self):
        assert assign([[1, 2], [2, 1]]).tolist() == [0, 1]
        assert assign([[1, 1]]).tolist() == [0]
        assert assign([[0.0, 0.0, 0.0]]).tolist() == [0]

    def test_mean(self):
        cents, labels = update_centroids([[0, 0], [2, 0]], [0, 0], 1)
        np.testing.assert_array_equal(cents, [[1, 0]])

    def test_empty_cluster_dropped(self):
        data = np.array([[0.0], [1.0], [5.0]])
        cents, labels = update_centroids(data, [0, 0, 2], 3)
        assert len(cents) == 2
        assert labels.tolist() == [0, 0, 1]

    def test_singleton(self):
        cents, _ = update_centroids([[3.0, 4.0], [0.0, 0.0]], [1, 0], 2)
        np.testing.assert_array_equal(cents[1], [3.0, 4.0])

    def test_wcss(self):
        assert wcss([[0, 0], [2, 0]], [0, 0], [[1, 0]]) == 2.0


class TestClassical:
    def test_k1_mean(self, rng):
        data = rng.normal(size=(20, 3))
        run = kmeans_classical(data, ClusterConfig(1, max_iterations=5))
        np.testing.assert_allclose(run.centroids[0], data.mean(axis=0))
        assert run.converged and run.iterations == 2

    def test_each_point_own_cluster(self, rng):
        data = rng.normal(size=(4, 2))
        run = kmeans_classical(data, ClusterConfig(4))
        assert sorted(run.labels.tolist()) == [0, 1, 2, 3]
        assert run.converged

    def test_recovers_easy_blobs(self):
        ds = gen_clusters(4, 15, 2, 0.01, min_sep=2.0, seed=5, box=(0, 5))
        init = init_centroids(ds.points, 4, 1.0, 5)
        run = kmeans_classical(ds.points, ClusterConfig(4), init=init)
        for c in range(4):
            assert len(set(run.labels[ds.true_labels == c])) == 1

    def test_lloyd_monotone(self, rng):
        for seed in range(20):
            data = rng.normal(size=(40, 3))
            run = kmeans_classical(data, ClusterConfig(5, max_iterations=30, seed=seed))
            values = []
            for prev, cur in zip(run.history, run.history[1:]):
                if len(prev) != len(cur):
                    continue
                labels = classical_nn(data, prev)
                values.append(wcss(data, labels, prev))
                values.append(wcss(data, labels, cur))
            assert all(b <= a + 1e-9 for a, b in zip(values, values[1:]))

    def test_labels_dense(self, rng):
        data = np.vstack([rng.normal(size=(10, 2)), [[100.0, 100.0]]])
        init = np.array([[0.0, 0.0], [50.0, -50.0], [100.0, 100.0]])
        run = kmeans_classical(data, ClusterConfig(3), init=init)
        assert set(run.labels.tolist()) == set(range(len(run.centroids))) == {0, 1}

    def test_config_validation(self):
        with pytest.raises(ValueError):
            ClusterConfig(0)
        with pytest.raises(ValueError):
            ClusterConfig(2, convergence_tol=0)


class TestQuantum:
    def test_analytic_matches_classical(self, rng):
        for _ in range(30):
            dim, k = int(rng.integers(2, 9)), int(rng.integers(2, 9))
            data = rng.normal(size=(3 * k + 5, dim))
            init = init_centroids(data, k, seed=int(rng.integers(1 << 30)))
            cfg = ClusterConfig(k, max_iterations=8)
            q = kmeans_quantum(data, cfg, init=init)
            c = kmeans_classical(data, cfg, init=init)
            np.testing.assert_array_equal(q.labels, c.labels)

    def test_900_circuits_per_iteration(self, spy, ideal):
        ds = gen_clusters(5, 36, 2, 0.5, seed=1)
        cfg = ClusterConfig(5, max_iterations=2, estimator=SAMPLED)
        kmeans_quantum(ds.points, cfg, ideal)
        assert spy[0] == 900

    def test_iteration_split_into_batches(self, spy):
        prof = BackendProfile("cap", 27, 8192, 40)
        ds = gen_clusters(2, 25, 2, 0.1, seed=2)
        cfg = ClusterConfig(2, max_iterations=1, estimator=SAMPLED)
        kmeans_quantum(ds.points, cfg, prof)
        assert spy == [40, 40, 20]

    def test_deterministic(self, ideal):
        ds = gen_clusters(3, 10, 2, 0.5, seed=3)
        cfg = ClusterConfig(3, estimator=SAMPLED, seed=11)
        assert runs_equal(kmeans_quantum(ds.points, cfg, ideal),
                          kmeans_quantum(ds.points, cfg, ideal))

    def test_parallel_path_identical(self, seven):
        ds = gen_clusters(3, 10, 2, 0.5, seed=4)
        batch = ClusterConfig(3, estimator=SAMPLED, seed=2)
        parallel = ClusterConfig(3, estimator=EstimatorConfig(mode="sampled", shots=256,
                                                              workers=4), seed=2)
        assert runs_equal(kmeans_quantum(ds.points, batch, seven),
                          kmeans_quantum(ds.points, parallel, seven))

    def test_backend_error_names_iteration(self):
        prof = BackendProfile("tiny", 27, 100, 900)
        cfg = ClusterConfig(2, estimator=EstimatorConfig(mode="sampled", shots=200))
        with pytest.raises(TooManyShots, match="iteration 0"):
            kmeans_quantum(np.eye(4), cfg, prof)

    def test_easy_set_sampled(self, ideal):
        ds = gen_clusters(4, 15, 2, 0.01, min_sep=2.0, seed=5, box=(0, 5))
        init = init_centroids(ds.points, 4, 1.0, 5)
        cfg = ClusterConfig(4, max_iterations=5,
                            estimator=EstimatorConfig(mode="sampled", shots=8192))
        q = kmeans_quantum(ds.points, cfg, ideal, init=init)
        c = kmeans_classical(ds.points, cfg, init=init)
        np.testing.assert_array_equal(q.labels, c.labels)

    def test_to_dict(self, rng):
        run = kmeans_classical(rng.normal(size=(6, 2)), ClusterConfig(2))
        d = run.to_dict()
        assert d["iterations"] == run.iterations and len(d["labels"]) == 6


class TestClassify:
    def test_point_on_centroid(self):
        cents = np.array([[0.0, 1.0], [5.0, 5.0], [-3.0, 2.0]])
        assert nn_classify(cents[[2, 0, 1]], cents, EstimatorConfig()).tolist() == [2, 0, 1]

    def test_analytic_equals_classical(self, rng):
        for _ in range(100):
            dim = int(rng.integers(2, 9))
            pts, cents = rng.normal(size=(10, dim)), rng.normal(size=(int(rng.integers(2, 6)), dim))
            np.testing.assert_array_equal(nn_classify(pts, cents, EstimatorConfig()),
                                          classical_nn(pts, cents))

    def test_300_estimates(self, spy, ideal):
        pts, cents = np.random.default_rng(0).normal(size=(60, 2)), np.eye(5, 2) * 3
        nn_classify(pts, cents, SAMPLED, ideal)
        assert spy == [300]

    def test_no_centroids(self):
        with pytest.raises(ValueError):
            nn_classify(np.eye(2), np.empty((0, 2)), EstimatorConfig())


class TestSeedSearch:
    def test_separable_first_seed(self):
        ds = gen_clusters(3, 10, 2, 0.01, min_sep=4.0, seed=0)
        seed, init = seed_search(ds.points, 3, 10, 5)
        assert seed == 0 and init.shape == (3, 2)

    def test_budget_three_pipeline_shape(self):
        ds = gen_clusters(5, 36, 2, 0.3, min_sep=2.0, seed=6)
        seed, init = seed_search(ds.points, 5, 3, 50)
        run = kmeans_classical(ds.points, ClusterConfig(5, max_iterations=3), init=init)
        assert run.converged

    def test_none_found(self, rng):
        data = rng.normal(size=(50, 2))
        with pytest.raises(NoSeedFound):
            seed_search(data, 8, 1, 3)
