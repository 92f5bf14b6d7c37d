from typing import Iterator, List, Sequence

import numpy as np

from ..utils.exception import ShapeError

# class indices
BACKGROUND, ZP, TE, ICM, BL = range(5)
CLASS_NAMES = ['background', 'ZP', 'TE', 'ICM', 'BL']


class Sample(object):
    """A grayscale image and its per-pixel class mask."""

    def __init__(self, image: np.ndarray, mask: np.ndarray, sample_id: str = None):
        """Initializes a new sample.

        Args:
            image: H x W image with values in [0, 1].
            mask: H x W class indices.
            sample_id: Identifier, e.g. the file name stem.

        Raises:
            ShapeError: If image and mask differ in shape.
        """
        if image.shape != mask.shape or image.ndim != 2:
            raise ShapeError('Image and mask must be equally sized 2D arrays.', image=image.shape,
                             mask=mask.shape, sample_id=sample_id)
        self.image = image
        self.mask = mask
        self.sample_id = sample_id

    @property
    def shape(self):
        return self.image.shape

    def __repr__(self):
        return 'Sample(%s, shape=%s)' % (self.sample_id, self.shape)


class Dataset(object):
    """Ordered collection of equally sized samples."""

    def __init__(self, samples: Sequence[Sample] = None):
        self.samples: List[Sample] = [] if samples is None else list(samples)

    def __len__(self) -> int:
        return len(self.samples)

    def __getitem__(self, idx: int) -> Sample:
        return self.samples[idx]

    def __iter__(self) -> Iterator[Sample]:
        return iter(self.samples)

    @property
    def ids(self) -> List[str]:
        return [s.sample_id for s in self.samples]

    def subset(self, indices: Sequence[int]) -> 'Dataset':
        """Returns a dataset with the samples at the given indices, in that order."""
        return Dataset([self.samples[i] for i in indices])

    def arrays(self):
        """Returns all images as N x 1 x H x W float32 array and all masks as N x H x W int64 array."""
        if not self.samples:
            raise ShapeError('Dataset is empty.')
        images = np.stack([s.image for s in self.samples]).astype(np.float32)[:, None, :, :]
        masks = np.stack([s.mask for s in self.samples]).astype(np.int64)
        return images, masks


def split_test(dataset: Dataset, n_test: int, seed: int):
    """Holds out a test set by a seeded permutation.

    Args:
        dataset: Full dataset.
        n_test: Number of test samples.
        seed: Seed for permutation.

    Returns:
        Tuple of (training pool, test set).

    Raises:
        ShapeError: If n_test is not smaller than the dataset.
    """
    if not 0 <= n_test < len(dataset):
        raise ShapeError('Test set must be smaller than the dataset.', n_test=n_test, n=len(dataset))
    perm = np.random.default_rng([seed, 1]).permutation(len(dataset))
    return dataset.subset(sorted(perm[n_test:])), dataset.subset(sorted(perm[:n_test]))


__all__ = ['Sample', 'Dataset', 'split_test', 'BACKGROUND', 'ZP', 'TE', 'ICM', 'BL', 'CLASS_NAMES']
