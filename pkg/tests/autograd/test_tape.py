import numpy as np
import pytest

from splitfed.autograd import Tensor, Tape, relu, reduce_sum, AdamState, adam_step, he_init
from splitfed.utils.exception import GraphError, ShapeError


class TestTape(object):
    def test_records_only_when_active(self):
        """Primitives outside a tape leave nothing behind."""
        x = Tensor([1., -1.])
        relu(x)
        with Tape() as tape:
            relu(x)
        assert len(tape) == 1

    def test_detached(self):
        """Nothing is recorded inside a detached block, even with an enclosing tape."""
        with Tape() as tape:
            with Tape.detached():
                relu(Tensor([1.]))
            relu(Tensor([1.]))
        assert len(tape) == 1

    def test_nested_tapes(self):
        """Innermost tape records."""
        with Tape() as outer:
            with Tape() as inner:
                relu(Tensor([1.]))
        assert len(outer) == 0
        assert len(inner) == 1

    def test_scalar_required(self):
        with Tape() as tape:
            out = relu(Tensor([1., 2.]))
        with pytest.raises(GraphError):
            tape.backward(out)

    def test_upstream_shape(self):
        with Tape() as tape:
            out = relu(Tensor([1., 2.]))
        with pytest.raises(ShapeError):
            tape.backward(out, np.ones(3))

    def test_seeds_accumulate(self):
        """The same output given twice receives the sum of its seeds."""
        x = Tensor([1., 2.])
        with Tape() as tape:
            out = relu(x)
        grads = tape.backward([out, out], [np.array([1., 1.]), np.array([2., 3.])])
        assert np.array_equal(grads[x], [3., 4.])

    def test_unreached_tensor(self):
        """Tensors not reached have zero gradient."""
        x, y = Tensor([1.]), Tensor([2.])
        with Tape() as tape:
            loss = reduce_sum(relu(x))
        grads = tape.backward(loss)
        assert y not in grads
        assert np.array_equal(grads.grad(y), [0.])
        assert np.array_equal(grads[x], [1.])


class TestAdam(object):
    def test_first_step(self):
        """First bias-corrected step moves each entry by lr against the gradient sign."""
        p = Tensor([1., -1., 0.5], dtype=np.float64)
        state = AdamState([p], lr=0.1)
        adam_step([p], [np.array([2., -3., 0.])], state)
        np.testing.assert_allclose(p.data, [0.9, -0.9, 0.5], atol=1e-7)
        assert state.t == 1

    def test_keeps_dtype(self):
        p = Tensor(np.ones(4))
        state = AdamState([p])
        adam_step([p], [np.ones(4, dtype=np.float64)], state)
        assert p.dtype == np.float32

    def test_mismatch(self):
        p = Tensor(np.ones(4))
        with pytest.raises(ShapeError):
            adam_step([p], [np.ones(3)], AdamState([p]))


class TestHeInit(object):
    def test_std(self, rng):
        """Sample std matches sqrt(2 / fan_in)."""
        t = he_init((64, 32, 3, 3), rng)
        assert abs(t.data.std() - np.sqrt(2. / 288.)) < 0.005
        assert t.dtype == np.float32


class TestAdamExamples(object):
    def test_zero_gradient(self):
        p = Tensor([1., 2.], dtype=np.float64)
        state = AdamState([p], lr=1e-4)
        adam_step([p], [np.zeros(2)], state)
        assert np.array_equal(p.data, [1., 2.])
        assert state.t == 1

    def test_first_step_closed_form(self):
        """First step with gradient 0.5 moves by about -lr."""
        p = Tensor([0.], dtype=np.float64)
        state = AdamState([p], lr=1e-4)
        adam_step([p], [np.array([0.5])], state)
        assert abs(p.data[0] + 1e-4) < 1e-10

    def test_constant_gradient_keeps_sign(self):
        p = Tensor([0.], dtype=np.float64)
        state = AdamState([p], lr=1e-2)
        values = [0.]
        for _ in range(3):
            adam_step([p], [np.array([0.3])], state)
            values.append(p.data[0])
        assert np.all(np.diff(values) < 0)


class TestHeInitSeeds(object):
    def test_seeds(self):
        a = he_init((4, 2, 3, 3), np.random.default_rng(1))
        b = he_init((4, 2, 3, 3), np.random.default_rng(1))
        c = he_init((4, 2, 3, 3), np.random.default_rng(2))
        assert np.array_equal(a.data, b.data)
        assert not np.array_equal(a.data, c.data)
