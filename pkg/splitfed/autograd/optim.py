from typing import List, Sequence

import numpy as np

from .tensor import Tensor
from ..utils.exception import ShapeError


class AdamState(object):
    """Moment accumulators and step counter of the Adam optimizer for one list of parameters."""

    def __init__(self, params: Sequence[Tensor], lr: float = 1e-4, beta1: float = 0.9, beta2: float = 0.999,
                 eps: float = 1e-8):
        """Initializes a new state with zero moments.

        Args:
            params: Parameters to optimize.
            lr: Learning rate.
            beta1: Decay of first moment.
            beta2: Decay of second moment.
            eps: Denominator offset.
        """
        self.m: List[np.ndarray] = [np.zeros_like(p.data) for p in params]
        self.v: List[np.ndarray] = [np.zeros_like(p.data) for p in params]
        self.t = 0
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps


def adam_step(params: Sequence[Tensor], grads: Sequence[np.ndarray], state: AdamState) -> AdamState:
    """Performs one bias-corrected Adam update, replacing each parameter's data.

    Args:
        params: Parameters to update.
        grads: Gradients, one per parameter.
        state: Optimizer state belonging to params.

    Returns:
        The updated state.

    Raises:
        ShapeError: If gradients or moments do not match their parameters.
    """

    # check
    if len(params) != len(grads) or len(params) != len(state.m):
        raise ShapeError('Numbers of parameters, gradients and moments differ.', params=len(params),
                         grads=len(grads), moments=len(state.m))
    for p, g, m in zip(params, grads, state.m):
        if p.shape != np.shape(g) or p.shape != m.shape:
            raise ShapeError('Gradient does not match parameter.', param=p.shape, grad=np.shape(g), tensor=p.name)

    # bias correction for this step
    state.t += 1
    c1 = 1. - state.beta1 ** state.t
    c2 = 1. - state.beta2 ** state.t

    # update
    for i, (p, g) in enumerate(zip(params, grads)):
        state.m[i] = state.beta1 * state.m[i] + (1. - state.beta1) * g
        state.v[i] = state.beta2 * state.v[i] + (1. - state.beta2) * g * g
        step = state.lr * (state.m[i] / c1) / (np.sqrt(state.v[i] / c2) + state.eps)
        p.data = (p.data - step).astype(p.dtype, copy=False)

    return state


__all__ = ['AdamState', 'adam_step']
