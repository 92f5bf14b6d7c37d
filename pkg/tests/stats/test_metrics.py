import numpy as np
import pytest

from splitfed.stats import jaccard_per_class, mean_ji, mean_ji_of_masks
from splitfed.utils.exception import ShapeError, StatsError


def brute_force_ji(pred, gt, c):
    """Jaccard index by explicit sets of pixel positions."""
    p = {i for i, v in enumerate(np.ravel(pred)) if v == c}
    g = {i for i, v in enumerate(np.ravel(gt)) if v == c}
    return len(p & g) / len(p | g) if p | g else None


class TestJaccard(object):
    def test_example(self):
        gt = np.array([[0, 1], [1, 2]])
        pred = np.array([[0, 1], [2, 2]])
        ji = jaccard_per_class(pred, gt, 5)
        assert ji[1] == 0.5 and ji[2] == 0.5
        assert np.isnan(ji[3]) and np.isnan(ji[4])
        assert mean_ji([ji]) == 0.5

    def test_identical(self, rng):
        mask = rng.integers(0, 5, size=(8, 8))
        ji = jaccard_per_class(mask, mask)
        assert np.all(ji[~np.isnan(ji)] == 1.)

    def test_disjoint(self):
        assert jaccard_per_class(np.array([[1, 1]]), np.array([[2, 2]]), 3)[1] == 0.

    def test_brute_force(self, rng):
        for _ in range(10):
            pred, gt = rng.integers(0, 5, size=(6, 7)), rng.integers(0, 5, size=(6, 7))
            ji = jaccard_per_class(pred, gt)
            for c in range(5):
                expected = brute_force_ji(pred, gt, c)
                assert np.isnan(ji[c]) if expected is None else ji[c] == pytest.approx(expected)

    def test_shape(self):
        with pytest.raises(ShapeError):
            jaccard_per_class(np.zeros((2, 2)), np.zeros((2, 3)))


class TestMeanJI(object):
    def test_two_images(self):
        assert mean_ji([np.array([1., 0.4, 0.4, np.nan, 0.4]), np.array([0., 0.6, np.nan, 0.6, 0.6])]) == \
            pytest.approx(0.5)

    def test_perfect(self):
        mask = np.array([[[0, 1], [2, 3]]])
        assert mean_ji_of_masks(mask, mask) == 1.

    def test_all_background(self):
        """Predicting only background scores zero."""
        gt = np.array([[[0, 1], [2, 3]]])
        assert mean_ji_of_masks(np.zeros_like(gt), gt) == 0.

    def test_undefined(self):
        with pytest.raises(StatsError):
            mean_ji([np.array([1., np.nan, np.nan])])
