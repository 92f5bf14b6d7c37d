from typing import Sequence

import numpy as np

from ..utils.exception import ShapeError, StatsError


def jaccard_per_class(pred: np.ndarray, gt: np.ndarray, num_classes: int = 5) -> np.ndarray:
    """Jaccard index of every class.

    Args:
        pred: Predicted class indices.
        gt: True class indices, same shape.
        num_classes: Number of classes.

    Returns:
        Array with one JI per class; NaN for classes that appear in neither mask.

    Raises:
        ShapeError: If the masks differ in shape.
    """
    pred, gt = np.asarray(pred), np.asarray(gt)
    if pred.shape != gt.shape:
        raise ShapeError('Masks differ in shape.', pred=pred.shape, gt=gt.shape)

    classes = np.arange(num_classes)[:, None]
    p, g = pred.reshape(1, -1) == classes, gt.reshape(1, -1) == classes
    intersection = (p & g).sum(axis=1)
    union = (p | g).sum(axis=1)
    with np.errstate(invalid='ignore', divide='ignore'):
        return np.where(union > 0, intersection / np.maximum(union, 1), np.nan)


def mean_ji(per_image: Sequence[np.ndarray], background: int = 0) -> float:
    """Mean Jaccard index without background.

    Each image's defined foreground JIs are averaged first, then the image means are averaged. Images without
    any defined foreground class are skipped.

    Args:
        per_image: Per-class JIs of each image, as returned by jaccard_per_class().
        background: Index of background class.

    Returns:
        MJI in [0, 1].

    Raises:
        StatsError: If no image has a defined foreground class.
    """
    means = []
    for ji in per_image:
        fg = np.delete(np.asarray(ji, dtype=np.float64), background)
        fg = fg[~np.isnan(fg)]
        if len(fg) > 0:
            means.append(fg.mean())
    if not means:
        raise StatsError('No defined foreground class in any image.', images=len(per_image))
    return float(np.mean(means))


def mean_ji_of_masks(pred: np.ndarray, gt: np.ndarray, num_classes: int = 5) -> float:
    """MJI of N x H x W predicted masks against N x H x W true masks."""
    pred, gt = np.asarray(pred), np.asarray(gt)
    if pred.shape != gt.shape:
        raise ShapeError('Masks differ in shape.', pred=pred.shape, gt=gt.shape)
    return mean_ji([jaccard_per_class(p, g, num_classes) for p, g in zip(pred, gt)])


__all__ = ['jaccard_per_class', 'mean_ji', 'mean_ji_of_masks']
