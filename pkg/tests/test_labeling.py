import numpy as np
import pytest

from wristmood.core import BinaryMood
from wristmood.errors import DegenerateInputError, SpecError
from wristmood.labeling import ClusterModel, cluster_label_agreement, kmeans


def two_blobs(seed=0, n=100, centers=((2.0, 2.0), (8.0, 8.0)), sigma=0.3):
    rng = np.random.default_rng(seed)
    points = np.vstack([rng.normal(c, sigma, size=(n, 2)) for c in centers])
    truth = np.array([0] * n + [1] * n)
    return points, truth


class TestKmeans:
    def test_k_equals_n(self):
        model = kmeans([(0.0, 0.0), (10.0, 10.0)], k=2, seed=0)
        assert model.inertia == 0.0
        assert sorted(model.centroids.tolist()) == [[0.0, 0.0], [10.0, 10.0]]

    def test_fixed_point(self):
        points, _ = two_blobs(seed=3)
        model = kmeans(points, k=2, seed=1)
        d2 = ((points[:, None, :] - model.centroids[None]) ** 2).sum(axis=2)
        assert np.array_equal(d2.argmin(axis=1), model.assignments)

    def test_separated_gaussians_recovered(self):
        points, truth = two_blobs(seed=0)
        model = kmeans(points, k=2, seed=0)
        agree = np.mean(model.assignments == truth)
        assert max(agree, 1 - agree) >= 0.99

    def test_inertia_non_increasing(self):
        points, _ = two_blobs(seed=5, sigma=2.5)
        model = kmeans(points, k=2, seed=7)
        hist = model.inertia_history
        assert all(a >= b - 1e-9 for a, b in zip(hist, hist[1:]))

    def test_seed_determinism(self):
        points, _ = two_blobs(seed=2)
        a = kmeans(points, k=2, seed=11)
        b = kmeans(points, k=2, seed=11)
        assert np.array_equal(a.centroids, b.centroids)
        assert np.array_equal(a.assignments, b.assignments)
        assert a.inertia == b.inertia

    def test_too_few_distinct_points(self):
        with pytest.raises(DegenerateInputError):
            kmeans([(1.0, 1.0), (1.0, 1.0)], k=2, seed=0)


class TestAgreement:
    def make_model(self, assignments):
        assignments = np.asarray(assignments)
        return ClusterModel(centroids=np.zeros((2, 2)), assignments=assignments,
                            inertia=0.0, inertia_history=(0.0,))

    def test_perfect(self):
        moods = [BinaryMood.PLEASANT] * 3 + [BinaryMood.UNPLEASANT] * 3
        assert cluster_label_agreement(self.make_model([0, 0, 0, 1, 1, 1]), moods) == 1.0

    def test_swap_invariant(self):
        moods = [BinaryMood.PLEASANT, BinaryMood.UNPLEASANT, BinaryMood.PLEASANT]
        a = cluster_label_agreement(self.make_model([0, 1, 0]), moods)
        b = cluster_label_agreement(self.make_model([1, 0, 1]), moods)
        assert a == b == 1.0

    def test_random_assignments_near_half(self):
        rng = np.random.default_rng(0)
        values = []
        for _ in range(100):
            n = 200
            moods = [BinaryMood.PLEASANT if v else BinaryMood.UNPLEASANT
                     for v in rng.integers(0, 2, size=n)]
            model = self.make_model(rng.integers(0, 2, size=n))
            values.append(cluster_label_agreement(model, moods))
        assert 0.45 < np.mean(values) < 0.60
        assert all(v >= 0.5 for v in values)

    def test_k_not_two_rejected(self):
        model = ClusterModel(centroids=np.zeros((3, 2)),
                             assignments=np.zeros(2, dtype=int),
                             inertia=0.0, inertia_history=(0.0,))
        with pytest.raises(SpecError):
            cluster_label_agreement(model, [BinaryMood.PLEASANT] * 2)
