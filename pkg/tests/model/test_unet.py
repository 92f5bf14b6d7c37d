import numpy as np
import pytest

from splitfed.autograd import Tensor
from splitfed.model import UNet, UNetSpec, SegmentParams, concat_params, split_vector, build_stages
from splitfed.utils.exception import ConfigError, ShapeError


class TestUNet(object):
    def test_stages(self, small_spec):
        """Stage graph of a two-level U-Net in execution order."""
        names = [s.name for s in build_stages(small_spec)]
        assert names == ['e1', 'p1', 'e2', 'p2', 'b', 'd2', 'd1', 'head']

    def test_output(self, small_spec, batch):
        """Output are probabilities of full resolution."""
        x, _ = batch
        out = UNet(small_spec, np.random.default_rng(0)).forward(x)
        assert out.shape == (2, 5, 16, 16)
        np.testing.assert_allclose(out.data.sum(axis=1), 1., rtol=1e-5)

    def test_same_seed_same_params(self, small_spec):
        a = UNet(small_spec, np.random.default_rng(1))
        b = UNet(small_spec, np.random.default_rng(1))
        assert all(np.array_equal(a.params[n].data, b.params[n].data) for n in a.params)

    def test_bad_input(self, small_spec):
        with pytest.raises(ShapeError):
            UNet(small_spec, np.random.default_rng(0)).forward(np.zeros((1, 1, 10, 10)))

    def test_bad_spec(self):
        with pytest.raises(ConfigError):
            UNetSpec(levels=1)

    def test_predict(self, small_spec, batch):
        x, _ = batch
        pred = UNet(small_spec, np.random.default_rng(0)).predict(x, batch_size=1)
        assert pred.shape == (2, 16, 16)
        assert pred.min() >= 0 and pred.max() < 5

    def test_from_params(self, small_spec):
        """Shared tensors are the same objects, copies are not."""
        model = UNet(small_spec, np.random.default_rng(0))
        shared = UNet.from_params(small_spec, model.params)
        copied = UNet.from_params(small_spec, model.params, copy=True)
        assert shared.params['e1.conv1.weight'] is model.params['e1.conv1.weight']
        assert copied.params['e1.conv1.weight'] is not model.params['e1.conv1.weight']

        params = dict(model.params)
        del params['head.conv.bias']
        with pytest.raises(ShapeError):
            UNet.from_params(small_spec, params)


class TestSegmentParams(object):
    def test_flatten_load(self):
        """Loading a flattened vector restores values and shapes."""
        view = SegmentParams({'a': Tensor(np.arange(6.).reshape(2, 3)), 'b': Tensor([7.])})
        vec = view.flatten()
        assert view.size == 7
        assert np.array_equal(vec, np.arange(7.))
        view.load(vec * 2)
        assert np.array_equal(view.params['a'].data, 2 * np.arange(6.).reshape(2, 3))
        with pytest.raises(ShapeError):
            view.load(np.zeros(6))

    def test_concat_split(self):
        a = SegmentParams({'a': Tensor(np.ones(3))})
        b = SegmentParams({'b': Tensor(np.zeros(2))})
        pieces = split_vector(concat_params([a, b]), [a, b])
        assert [len(p) for p in pieces] == [3, 2]
