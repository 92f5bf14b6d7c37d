from typing import Tuple

import numpy as np

from .sample import Sample, Dataset, BACKGROUND, ZP, TE, ICM, BL
from ..utils.exception import ConfigError, DataFormatError

# mean intensity per class
INTENSITY = {BACKGROUND: 0.1, ZP: 0.75, TE: 0.55, ICM: 0.65, BL: 0.3}

# smallest image on which the ICM blob and TE ring still cover whole pixels
MIN_SIZE = 16

# redraws of the geometry before giving up on a sample
MAX_ATTEMPTS = 20


def _draw(size: int, rng: np.random.Generator, noise: float) -> Tuple[np.ndarray, np.ndarray]:
    """Draws image and mask of one embryo, without checking which classes it covers."""

    # outer ellipse
    cy, cx = size / 2. + rng.uniform(-0.05, 0.05, 2) * size
    a, b = rng.uniform(0.36, 0.44, 2) * size
    theta = rng.uniform(0, np.pi)
    zp_inner, te_inner = rng.uniform(0.84, 0.88), rng.uniform(0.70, 0.75)

    # coordinates in ellipse frame
    y, x = np.mgrid[0:size, 0:size] + 0.5
    u = (x - cx) * np.cos(theta) + (y - cy) * np.sin(theta)
    v = -(x - cx) * np.sin(theta) + (y - cy) * np.cos(theta)
    r = np.sqrt((u / a) ** 2 + (v / b) ** 2)

    # rings
    mask = np.full((size, size), BACKGROUND, dtype=np.uint8)
    mask[r <= 1.] = ZP
    mask[r <= zp_inner] = TE
    mask[r <= te_inner] = BL

    # ICM blob against inner wall
    phi = rng.uniform(0, 2 * np.pi)
    dist = te_inner * rng.uniform(0.4, 0.5)
    iu, iv = dist * a * np.cos(phi), dist * b * np.sin(phi)
    ia, ib = te_inner * a * rng.uniform(0.3, 0.4), te_inner * b * rng.uniform(0.3, 0.4)
    icm = ((u - iu) / ia) ** 2 + ((v - iv) / ib) ** 2 <= 1.
    mask[icm & (r <= te_inner)] = ICM

    # intensities and noise
    levels = np.array([INTENSITY[c] for c in range(5)]) + rng.uniform(-0.05, 0.05, 5)
    image = levels[mask] + rng.normal(0., noise, (size, size))
    return np.clip(image, 0., 1.).astype(np.float32), mask


def generate_sample(size: int, seed: int, index: int, noise: float = 0.05) -> Sample:
    """Draws one embryo-like sample.

    An outer elliptic ring forms the ZP, a thinner ring inside it the TE, the interior is BL and a smaller
    ellipse attached to the inner wall forms the ICM. Ellipse parameters and intensities are jittered per
    sample. If a draw misses one of the five classes, the geometry is redrawn from a derived seed, so every
    returned mask contains all classes.

    Args:
        size: Width and height in pixels, at least MIN_SIZE.
        seed: Dataset seed.
        index: Sample index, together with seed determines the sample.
        noise: Standard deviation of additive Gaussian noise.

    Returns:
        New sample.

    Raises:
        ConfigError: If size is below MIN_SIZE.
        DataFormatError: If no draw within MAX_ATTEMPTS contains all classes.
    """
    if size < MIN_SIZE:
        raise ConfigError('Size must be at least %d pixels.' % MIN_SIZE, key='size', value=size)

    for attempt in range(MAX_ATTEMPTS):
        rng = np.random.default_rng([seed, index] if attempt == 0 else [seed, index, attempt])
        image, mask = _draw(size, rng, noise)
        if len(np.unique(mask)) == len(INTENSITY):
            return Sample(image, mask, sample_id='%04d' % index)
    raise DataFormatError('Sample misses a class after all redraws.', size=size, seed=seed, index=index)


def generate(n: int, size: int = 64, seed: int = 0) -> Dataset:
    """Generates a synthetic dataset.

    Args:
        n: Number of samples, >= 1.
        size: Image width and height, even and at least MIN_SIZE.
        seed: Seed of dataset.

    Returns:
        Dataset with n samples of size x size pixels.
    """
    if n < 1:
        raise ConfigError('Need at least one sample.', key='n', value=n)
    if size % 2:
        raise ConfigError('Size must be even.', key='size', value=size)
    if size < MIN_SIZE:
        raise ConfigError('Size must be at least %d pixels.' % MIN_SIZE, key='size', value=size)
    return Dataset([generate_sample(size, seed, i) for i in range(n)])


__all__ = ['generate', 'generate_sample', 'INTENSITY', 'MIN_SIZE']
