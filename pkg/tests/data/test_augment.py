import numpy as np

from splitfed.data import augment, resize, hflip, vflip


class TestAugment(object):
    def test_flips(self, dataset):
        s = dataset[0]
        assert np.array_equal(hflip(s).image, s.image[:, ::-1])
        assert np.array_equal(vflip(s).mask, s.mask[::-1, :])
        assert np.array_equal(hflip(hflip(s)).mask, s.mask)

    def test_augment_matches_draws(self, dataset):
        """Flips are those given by the first two draws of the stream."""
        s = dataset[1]
        h, v = np.random.default_rng(4).random(2) < 0.5
        out = augment(s, np.random.default_rng(4))
        expected = s.mask[:, ::-1] if h else s.mask
        expected = expected[::-1, :] if v else expected
        assert np.array_equal(out.mask, expected)

    def test_image_and_mask_together(self, dataset):
        """Image and mask always receive the same flips."""
        s = dataset[2]
        rng = np.random.default_rng(0)
        for _ in range(8):
            out = augment(s, rng)
            for t in (lambda a: a, lambda a: a[:, ::-1], lambda a: a[::-1, :], lambda a: a[::-1, ::-1]):
                if np.array_equal(t(s.mask), out.mask) and np.array_equal(t(s.image), out.image):
                    break
            else:
                raise AssertionError('image and mask flipped differently')

    def test_resize(self, dataset):
        s = dataset[0]
        small = resize(s, 16)
        assert small.shape == (16, 16)
        assert set(np.unique(small.mask)) <= set(np.unique(s.mask))
        assert resize(s, 32) is s
