import numpy as np
import pytest

from splitfed.autograd import Tensor, Tape, conv2d, pointwise_conv, relu, maxpool2, upsample2, concat_channels, \
    reduce_sum
from splitfed.utils.exception import ShapeError


def numeric_grad(f, x: np.ndarray, h: float = 1e-3) -> np.ndarray:
    """Central finite differences of scalar function f at x."""
    grad = np.zeros_like(x)
    for i in np.ndindex(x.shape):
        old = x[i]
        x[i] = old + h
        plus = f(x)
        x[i] = old - h
        minus = f(x)
        x[i] = old
        grad[i] = (plus - minus) / (2. * h)
    return grad


def direct_conv(x: np.ndarray, k: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Brute force 3x3 same convolution."""
    n, c, h, w = x.shape
    out = np.zeros((n, k.shape[0], h, w)) + b[None, :, None, None]
    for o in range(k.shape[0]):
        for y in range(h):
            for xx in range(w):
                for dy in range(3):
                    for dx in range(3):
                        sy, sx = y + dy - 1, xx + dx - 1
                        if 0 <= sy < h and 0 <= sx < w:
                            out[:, o, y, xx] += (x[:, :, sy, sx] * k[o, :, dy, dx]).sum(axis=1)
    return out


class TestConv2d(object):
    def test_identity_kernel(self):
        """A delta kernel reproduces its input."""
        x = Tensor([[[[1, 2], [3, 4]]]])
        k = np.zeros((1, 1, 3, 3))
        k[0, 0, 1, 1] = 1.
        out = conv2d(x, Tensor(k), Tensor([0.]))
        assert np.array_equal(out.data, x.data)

    def test_zero_input(self):
        """Zero input gives the bias everywhere."""
        out = conv2d(Tensor(np.zeros((1, 2, 4, 4))), Tensor(np.ones((3, 2, 3, 3))), Tensor([1., 2., 3.]))
        assert np.array_equal(out.data[0, 2], np.full((4, 4), 3.))

    def test_ones_kernel(self):
        """All-ones kernel on a 2x2 input sums all entries in range."""
        out = conv2d(Tensor([[[[1, 2], [3, 4]]]]), Tensor(np.ones((1, 1, 3, 3))), Tensor([0.]))
        assert np.array_equal(out.data, np.full((1, 1, 2, 2), 10.))

    def test_direct_summation(self, rng):
        """Compares against brute force summation."""
        x, k, b = rng.normal(size=(2, 3, 5, 6)), rng.normal(size=(4, 3, 3, 3)), rng.normal(size=4)
        out = conv2d(Tensor(x, dtype=np.float64), Tensor(k, dtype=np.float64), Tensor(b, dtype=np.float64))
        np.testing.assert_allclose(out.data, direct_conv(x, k, b), rtol=1e-10, atol=1e-12)

    def test_channel_mismatch(self):
        """Error names both shapes."""
        with pytest.raises(ShapeError) as exc:
            conv2d(Tensor(np.zeros((1, 2, 4, 4))), Tensor(np.zeros((1, 3, 3, 3))), Tensor([0.]))
        assert exc.value.input == (1, 2, 4, 4)
        assert exc.value.kernel == (1, 3, 3, 3)

    def test_gradients(self, rng):
        """All three gradients against finite differences."""
        x, k, b = rng.normal(size=(2, 2, 4, 4)), rng.normal(size=(3, 2, 3, 3)), rng.normal(size=3)
        w = rng.normal(size=(2, 3, 4, 4))

        def loss(xv, kv, bv):
            return float((direct_conv(xv, kv, bv) * w).sum())

        tx, tk, tb = Tensor(x, dtype=np.float64), Tensor(k, dtype=np.float64), Tensor(b, dtype=np.float64)
        with Tape() as tape:
            out = conv2d(tx, tk, tb)
        grads = tape.backward(out, w)

        np.testing.assert_allclose(grads[tx], numeric_grad(lambda v: loss(v, k, b), x.copy()), atol=1e-6)
        np.testing.assert_allclose(grads[tk], numeric_grad(lambda v: loss(x, v, b), k.copy()), atol=1e-6)
        np.testing.assert_allclose(grads[tb], numeric_grad(lambda v: loss(x, k, v), b.copy()), atol=1e-6)


class TestPointwiseConv(object):
    def test_forward_and_gradient(self, rng):
        """1x1 convolution is a per-pixel matrix product."""
        x, k, b = rng.normal(size=(2, 3, 4, 4)), rng.normal(size=(5, 3, 1, 1)), rng.normal(size=5)
        tx, tk, tb = Tensor(x, dtype=np.float64), Tensor(k, dtype=np.float64), Tensor(b, dtype=np.float64)
        with Tape() as tape:
            out = pointwise_conv(tx, tk, tb)
            loss = reduce_sum(out)
        expected = np.einsum('nchw,oc->nohw', x, k[:, :, 0, 0]) + b[None, :, None, None]
        np.testing.assert_allclose(out.data, expected, rtol=1e-12)

        grads = tape.backward(loss)
        np.testing.assert_allclose(grads[tb], np.full(5, 32.))
        np.testing.assert_allclose(grads[tx], np.broadcast_to(k[:, :, 0, 0].sum(axis=0)[None, :, None, None],
                                                              x.shape))

    def test_wrong_kernel(self):
        with pytest.raises(ShapeError):
            pointwise_conv(Tensor(np.zeros((1, 2, 2, 2))), Tensor(np.zeros((1, 2, 3, 3))), Tensor([0.]))


class TestRelu(object):
    def test_forward(self):
        assert np.array_equal(relu(Tensor([-1., 0., 2.])).data, [0., 0., 2.])

    def test_all_negative(self):
        """All-negative input gives zeros and zero gradient."""
        x = Tensor(-np.ones((2, 3)))
        with Tape() as tape:
            out = relu(x)
        grads = tape.backward(out, np.ones((2, 3)))
        assert np.all(out.data == 0.)
        assert np.all(grads[x] == 0.)

    def test_gradient_finite_difference(self):
        """Gradient at 3.0 is 1.0, as is the central difference."""
        x = Tensor([3.0], dtype=np.float64)
        with Tape() as tape:
            out = relu(x)
        grads = tape.backward(out, np.array([1.0]))
        numeric = (max(0., 3.0 + 1e-3) - max(0., 3.0 - 1e-3)) / 2e-3
        assert grads[x][0] == 1.0
        assert abs(grads[x][0] - numeric) < 1e-4


class TestMaxPool(object):
    def test_forward(self):
        x = Tensor(np.arange(16.).reshape(1, 1, 4, 4))
        assert np.array_equal(maxpool2(x).data, [[[[5., 7.], [13., 15.]]]])

    def test_tie_goes_to_first(self):
        """On ties, the gradient goes to the first position in row-major order."""
        x = Tensor(np.ones((1, 1, 2, 2)))
        with Tape() as tape:
            out = maxpool2(x)
        grads = tape.backward(out, np.ones((1, 1, 1, 1)))
        assert np.array_equal(grads[x][0, 0], [[1., 0.], [0., 0.]])

    def test_odd_size(self):
        with pytest.raises(ShapeError):
            maxpool2(Tensor(np.zeros((1, 1, 3, 4))))


class TestUpsampleConcat(object):
    def test_upsample(self):
        x = Tensor([[[[1., 2.], [3., 4.]]]])
        with Tape() as tape:
            out = upsample2(x)
        assert out.shape == (1, 1, 4, 4)
        assert np.array_equal(out.data[0, 0, :2, :2], np.ones((2, 2)))
        grads = tape.backward(out, np.ones((1, 1, 4, 4)))
        assert np.array_equal(grads[x], np.full((1, 1, 2, 2), 4.))

    def test_concat(self):
        a, b = Tensor(np.zeros((1, 2, 2, 2))), Tensor(np.ones((1, 3, 2, 2)))
        with Tape() as tape:
            out = concat_channels(a, b)
        assert out.shape == (1, 5, 2, 2)
        g = np.arange(20.).reshape(1, 5, 2, 2)
        grads = tape.backward(out, g)
        assert np.array_equal(grads[a], g[:, :2])
        assert np.array_equal(grads[b], g[:, 2:])

    def test_concat_mismatch(self):
        with pytest.raises(ShapeError):
            concat_channels(Tensor(np.zeros((1, 2, 2, 2))), Tensor(np.zeros((1, 2, 4, 4))))


class TestSmallExamples(object):
    def test_maxpool_constant(self):
        assert np.array_equal(maxpool2(Tensor([[[[1., 2.], [3., 4.]]]])).data, [[[[4.]]]])
        assert np.array_equal(maxpool2(Tensor(np.full((1, 2, 4, 4), 3.))).data, np.full((1, 2, 2, 2), 3.))

    def test_upsample_single(self):
        assert np.array_equal(upsample2(Tensor([[[[1.]]]])).data, np.ones((1, 1, 2, 2)))

    def test_concat_empty(self):
        """Concatenating a zero-channel tensor is the identity."""
        a = Tensor(np.arange(8.).reshape(1, 2, 2, 2))
        out = concat_channels(a, Tensor(np.zeros((1, 0, 2, 2))))
        assert np.array_equal(out.data, a.data)

    def test_sum_gradient(self):
        x = Tensor(np.arange(6.).reshape(2, 3))
        with Tape() as tape:
            loss = reduce_sum(x)
        assert np.array_equal(tape.backward(loss)[x], np.ones((2, 3)))
