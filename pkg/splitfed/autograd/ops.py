import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .tensor import Tensor, record
from ..utils.exception import ShapeError


def _check_4d(x: Tensor, op: str):
    if x.ndim != 4:
        raise ShapeError('%s expects a N x C x H x W tensor.' % op, shape=x.shape, tensor=x.name)


def conv2d(x: Tensor, kernel: Tensor, bias: Tensor) -> Tensor:
    """3x3 convolution with stride 1 and zero-padding 1, so output keeps the input's size.

    Args:
        x: Input, N x C x H x W.
        kernel: Kernel, O x C x 3 x 3.
        bias: Bias, O.

    Returns:
        Output, N x O x H x W.

    Raises:
        ShapeError: If kernel is not 3x3 or channel counts differ.
    """

    # check shapes
    _check_4d(x, 'conv2d')
    if kernel.ndim != 4 or kernel.shape[2:] != (3, 3):
        raise ShapeError('conv2d expects a O x C x 3 x 3 kernel.', kernel=kernel.shape)
    if x.shape[1] != kernel.shape[1]:
        raise ShapeError('Input channels do not match kernel.', input=x.shape, kernel=kernel.shape,
                         tensor=x.name)
    if bias.shape != (kernel.shape[0],):
        raise ShapeError('Bias does not match kernel.', bias=bias.shape, kernel=kernel.shape)

    # 3x3 windows over padded input, N x C x H x W x 3 x 3
    xp = np.pad(x.data, ((0, 0), (0, 0), (1, 1), (1, 1)))
    windows = sliding_window_view(xp, (3, 3), axis=(2, 3))
    k = kernel.data

    # contract over channels and window
    out = np.tensordot(windows, k, axes=((1, 4, 5), (1, 2, 3)))
    out = np.ascontiguousarray(out.transpose(0, 3, 1, 2)) + bias.data[None, :, None, None]

    def backward(g):
        gb = g.sum(axis=(0, 2, 3))
        gk = np.tensordot(g, windows, axes=((0, 2, 3), (0, 2, 3)))
        # full correlation with the flipped kernel
        gwin = sliding_window_view(np.pad(g, ((0, 0), (0, 0), (1, 1), (1, 1))), (3, 3), axis=(2, 3))
        gx = np.tensordot(gwin, k[:, :, ::-1, ::-1], axes=((1, 4, 5), (0, 2, 3)))
        return np.ascontiguousarray(gx.transpose(0, 3, 1, 2)), gk, gb

    return record('conv2d', (x, kernel, bias), Tensor(out, dtype=out.dtype), backward)


def pointwise_conv(x: Tensor, kernel: Tensor, bias: Tensor) -> Tensor:
    """1x1 convolution, used for the segmentation head.

    Args:
        x: Input, N x C x H x W.
        kernel: Kernel, O x C x 1 x 1.
        bias: Bias, O.

    Returns:
        Output, N x O x H x W.
    """

    # check shapes
    _check_4d(x, 'pointwise_conv')
    if kernel.ndim != 4 or kernel.shape[2:] != (1, 1):
        raise ShapeError('pointwise_conv expects a O x C x 1 x 1 kernel.', kernel=kernel.shape)
    if x.shape[1] != kernel.shape[1]:
        raise ShapeError('Input channels do not match kernel.', input=x.shape, kernel=kernel.shape,
                         tensor=x.name)
    if bias.shape != (kernel.shape[0],):
        raise ShapeError('Bias does not match kernel.', bias=bias.shape, kernel=kernel.shape)

    # it's a matrix product over channels
    k = kernel.data[:, :, 0, 0]
    out = np.tensordot(x.data, k, axes=((1,), (1,)))
    out = np.ascontiguousarray(out.transpose(0, 3, 1, 2)) + bias.data[None, :, None, None]

    def backward(g):
        gb = g.sum(axis=(0, 2, 3))
        gk = np.tensordot(g, x.data, axes=((0, 2, 3), (0, 2, 3)))[:, :, None, None]
        gx = np.tensordot(g, k, axes=((1,), (0,)))
        return np.ascontiguousarray(gx.transpose(0, 3, 1, 2)), gk, gb

    return record('pointwise_conv', (x, kernel, bias), Tensor(out, dtype=out.dtype), backward)


def relu(x: Tensor) -> Tensor:
    """Elementwise max(0, x); gradient passes only where x > 0."""
    positive = x.data > 0
    out = np.where(positive, x.data, 0).astype(x.dtype)
    return record('relu', (x,), Tensor(out, dtype=out.dtype), lambda g: (g * positive,))


def maxpool2(x: Tensor) -> Tensor:
    """Non-overlapping 2x2 max pooling.

    Gradients go to the maximum of each window; on ties the first position in row-major order wins.

    Raises:
        ShapeError: On odd height or width.
    """

    # check shape
    _check_4d(x, 'maxpool2')
    n, c, h, w = x.shape
    if h % 2 or w % 2:
        raise ShapeError('maxpool2 requires even height and width.', shape=x.shape, tensor=x.name)

    # windows in row-major order along last axis
    windows = x.data.reshape(n, c, h // 2, 2, w // 2, 2).transpose(0, 1, 2, 4, 3, 5).reshape(n, c, h // 2, w // 2, 4)
    idx = windows.argmax(axis=-1)[..., None]
    out = np.take_along_axis(windows, idx, axis=-1)[..., 0]

    def backward(g):
        gw = np.zeros_like(windows)
        np.put_along_axis(gw, idx, g[..., None], axis=-1)
        return gw.reshape(n, c, h // 2, w // 2, 2, 2).transpose(0, 1, 2, 4, 3, 5).reshape(n, c, h, w),

    return record('maxpool2', (x,), Tensor(out, dtype=out.dtype), backward)


def upsample2(x: Tensor) -> Tensor:
    """Nearest-neighbour 2x upsampling; backward sums the four replicas."""
    _check_4d(x, 'upsample2')
    n, c, h, w = x.shape
    out = x.data.repeat(2, axis=2).repeat(2, axis=3)
    return record('upsample2', (x,), Tensor(out, dtype=out.dtype),
                  lambda g: (g.reshape(n, c, h, 2, w, 2).sum(axis=(3, 5)),))


def concat_channels(a: Tensor, b: Tensor) -> Tensor:
    """Concatenates along channels, channels of a first.

    Raises:
        ShapeError: If batch or spatial extents differ.
    """
    _check_4d(a, 'concat_channels')
    _check_4d(b, 'concat_channels')
    if a.shape[0] != b.shape[0] or a.shape[2:] != b.shape[2:]:
        raise ShapeError('Cannot concatenate tensors with different batch or spatial extents.', first=a.shape,
                         second=b.shape)
    ca = a.shape[1]
    out = np.concatenate([a.data, b.data], axis=1)
    return record('concat_channels', (a, b), Tensor(out, dtype=out.dtype), lambda g: (g[:, :ca], g[:, ca:]))


def reduce_sum(x: Tensor) -> Tensor:
    """Sum of all entries as a scalar tensor."""
    out = np.asarray(x.data.sum(), dtype=x.dtype)
    return record('reduce_sum', (x,), Tensor(out, dtype=x.dtype), lambda g: (np.full_like(x.data, g),))


__all__ = ['conv2d', 'pointwise_conv', 'relu', 'maxpool2', 'upsample2', 'concat_channels', 'reduce_sum']
