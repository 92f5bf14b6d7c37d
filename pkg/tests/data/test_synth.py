import numpy as np
import pytest

from splitfed.data import generate, generate_sample, split_test, Sample, CLASS_NAMES, MIN_SIZE
from splitfed.utils.exception import ConfigError, ShapeError


class TestSynth(object):
    def test_all_classes(self, dataset):
        """Every synthetic sample contains all five classes."""
        for sample in dataset:
            assert set(np.unique(sample.mask)) == set(range(len(CLASS_NAMES)))
            assert sample.image.dtype == np.float32
            assert 0. <= sample.image.min() and sample.image.max() <= 1.

    def test_deterministic(self):
        a, b = generate_sample(32, 1, 5), generate_sample(32, 1, 5)
        assert np.array_equal(a.image, b.image)
        assert np.array_equal(a.mask, b.mask)
        assert not np.array_equal(a.image, generate_sample(32, 2, 5).image)

    def test_ids(self, dataset):
        assert dataset.ids[:3] == ['0000', '0001', '0002']

    def test_invalid(self):
        with pytest.raises(ValueError):
            generate(0)
        with pytest.raises(ValueError):
            generate(3, size=31)
        with pytest.raises(ConfigError):
            generate(3, size=MIN_SIZE - 2)
        with pytest.raises(ConfigError):
            generate_sample(MIN_SIZE - 1, 0, 0)

    @pytest.mark.parametrize('seed', [0, 1, 2])
    def test_all_classes_at_min_size(self, seed):
        """Masks keep all five classes at the smallest allowed size."""
        for sample in generate(100, size=MIN_SIZE, seed=seed):
            assert set(np.unique(sample.mask)) == set(range(len(CLASS_NAMES)))
            assert sample.mask.shape == (MIN_SIZE, MIN_SIZE)


class TestDataset(object):
    def test_arrays(self, dataset):
        images, masks = dataset.arrays()
        assert images.shape == (12, 1, 32, 32)
        assert images.dtype == np.float32
        assert masks.shape == (12, 32, 32)
        assert masks.dtype == np.int64

    def test_split_test(self, dataset):
        """Test set is disjoint from training pool and fixed by seed."""
        train, test = split_test(dataset, 4, seed=0)
        assert len(train) == 8 and len(test) == 4
        assert not set(train.ids) & set(test.ids)
        assert split_test(dataset, 4, seed=0)[1].ids == test.ids
        with pytest.raises(ShapeError):
            split_test(dataset, 12, seed=0)

    def test_sample_shapes(self):
        with pytest.raises(ShapeError):
            Sample(np.zeros((4, 4)), np.zeros((4, 5)))
