import numpy as np
from scipy import ndimage

from .sample import Sample


def resize(sample: Sample, size: int) -> Sample:
    """Resizes a sample to size x size, bilinear for the image, nearest neighbour for the mask.

    Args:
        sample: Sample to resize.
        size: New width and height.

    Returns:
        Resized sample, or the same sample if it already has that size.
    """
    if sample.shape == (size, size):
        return sample
    factors = (size / sample.shape[0], size / sample.shape[1])
    image = ndimage.zoom(sample.image, factors, order=1, mode='nearest', grid_mode=True)
    mask = ndimage.zoom(sample.mask, factors, order=0, mode='nearest', grid_mode=True)
    return Sample(np.clip(image, 0., 1.).astype(sample.image.dtype), mask.astype(sample.mask.dtype),
                  sample_id=sample.sample_id)


def augment(sample: Sample, rng: np.random.Generator, size: int = None) -> Sample:
    """Random horizontal and vertical flips, each with probability 0.5, and resizing to the training size.

    Args:
        sample: Sample to augment.
        rng: Random stream; exactly two numbers are drawn from it.
        size: Training size, or None to keep the size.

    Returns:
        Augmented sample.
    """
    image, mask = sample.image, sample.mask
    hflip, vflip = rng.random(2) < 0.5
    if hflip:
        image, mask = image[:, ::-1], mask[:, ::-1]
    if vflip:
        image, mask = image[::-1, :], mask[::-1, :]
    out = Sample(np.ascontiguousarray(image), np.ascontiguousarray(mask), sample_id=sample.sample_id)
    return out if size is None else resize(out, size)


def hflip(sample: Sample) -> Sample:
    return Sample(sample.image[:, ::-1].copy(), sample.mask[:, ::-1].copy(), sample_id=sample.sample_id)


def vflip(sample: Sample) -> Sample:
    return Sample(sample.image[::-1, :].copy(), sample.mask[::-1, :].copy(), sample_id=sample.sample_id)


__all__ = ['augment', 'resize', 'hflip', 'vflip']
