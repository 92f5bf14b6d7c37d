import numpy as np

from .tensor import Tensor, record
from ..utils.exception import ShapeError


def softmax_channels(x: Tensor) -> Tensor:
    """Per-pixel softmax over the channel axis, stabilized by subtracting the channel maximum.

    Args:
        x: Logits, N x C x H x W.

    Returns:
        Class probabilities of same shape.
    """
    e = np.exp(x.data - x.data.max(axis=1, keepdims=True))
    p = e / e.sum(axis=1, keepdims=True)

    def backward(g):
        return p * (g - (g * p).sum(axis=1, keepdims=True)),

    return record('softmax_channels', (x,), Tensor(p, dtype=p.dtype), backward)


def one_hot(mask: np.ndarray, num_classes: int, dtype=np.float32) -> np.ndarray:
    """Converts a N x H x W class index mask into a N x C x H x W one-hot array.

    Args:
        mask: Class indices.
        num_classes: Number of classes C.
        dtype: Output type.

    Returns:
        One-hot encoded mask.
    """
    mask = np.asarray(mask)
    return (mask[:, None, :, :] == np.arange(num_classes)[None, :, None, None]).astype(dtype)


def soft_dice_loss(probs: Tensor, target_onehot, eps: float = 1e-6) -> Tensor:
    """Soft Dice loss, 1 minus the mean over classes of the per-class soft dice coefficient.

    Sums run over batch and both spatial axes, so every class contributes one coefficient per batch. Only
    probs is differentiated.

    Args:
        probs: Class probabilities, N x C x H x W.
        target_onehot: One-hot target of the same shape (Tensor or array).
        eps: Smoothing constant, > 0.

    Returns:
        Scalar loss tensor in [0, 1].

    Raises:
        ShapeError: If shapes differ.
    """

    # get target
    g = target_onehot.data if isinstance(target_onehot, Tensor) else np.asarray(target_onehot)
    if g.shape != probs.shape:
        raise ShapeError('Probabilities and target differ in shape.', probs=probs.shape, target=g.shape)
    g = g.astype(probs.dtype, copy=False)
    p = probs.data

    # per class sums
    intersection = (p * g).sum(axis=(0, 2, 3))
    total = p.sum(axis=(0, 2, 3)) + g.sum(axis=(0, 2, 3))
    dice = (2. * intersection + eps) / (total + eps)
    num_classes = p.shape[1]
    loss = np.asarray(1. - dice.mean(), dtype=probs.dtype)

    def backward(up):
        # d dice_c / d p = (2 g (S + eps) - (2 I + eps)) / (S + eps)^2
        denom = (total + eps)[None, :, None, None]
        numer = (2. * intersection + eps)[None, :, None, None]
        grad = -(2. * g * denom - numer) / (denom * denom) / num_classes
        return (up * grad).astype(probs.dtype, copy=False),

    return record('soft_dice_loss', (probs,), Tensor(loss, dtype=probs.dtype), backward)


__all__ = ['softmax_channels', 'one_hot', 'soft_dice_loss']
