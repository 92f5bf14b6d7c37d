from typing import Any, Callable, Dict, List

import numpy as np

from .aggregator import Aggregator, ClientReport, combine, normalized_exp, sample_counts
from ..utils.exception import AggregationError, ConfigError


class AutoFedAvg(Aggregator):
    """Learns aggregation weights on validation data.

    Weights are the softmax of logits gamma, which start at log(n_k / sum(n)), i.e. at the FedAvg weights. Each
    iteration then updates one logit after the other by a central finite-difference estimate of the
    derivative of the validation loss of the aggregated model.

    The validation loss is provided by the caller as context['evaluate'], a function mapping a global
    parameter vector and the weights that produced it to a scalar loss.
    """

    def __init__(self, eta: float = 0.1, iterations: int = 3, fd_step: float = 1e-2, *args, **kwargs):
        """Initializes a new aggregator.

        Args:
            eta: Step size for the descent on the logits, >= 0.
            iterations: Number of sweeps over all logits, >= 0.
            fd_step: Perturbation of a logit for the finite difference, > 0.
        """
        Aggregator.__init__(self, *args, **kwargs)
        if eta < 0:
            raise ConfigError('eta must not be negative.', key='eta', value=eta)
        if iterations < 0:
            raise ConfigError('iterations must not be negative.', key='iterations', value=iterations)
        if fd_step <= 0:
            raise ConfigError('fd_step must be positive.', key='fd_step', value=fd_step)
        self.eta = eta
        self.iterations = int(iterations)
        self.fd_step = fd_step

        # weights after each iteration of the last call, starting with the initial ones
        self.history: List[np.ndarray] = []

    def weights(self, reports: List[ClientReport], context: Dict[str, Any]) -> np.ndarray:
        # initial logits
        n = sample_counts(reports)
        gamma = np.log(n / n.sum())
        self.history = [normalized_exp(gamma)]
        if self.iterations == 0 or len(reports) == 1:
            return self.history[0]

        # get evaluation function
        evaluate: Callable[[np.ndarray, np.ndarray], float] = context.get('evaluate')
        if evaluate is None:
            raise AggregationError('auto_fedavg needs an evaluation function in its context.')
        vectors = [r.params for r in reports]

        def loss(g: np.ndarray) -> float:
            w = normalized_exp(g)
            value = float(evaluate(combine(vectors, w), w))
            if not np.isfinite(value):
                raise AggregationError('Validation loss is not finite.', weights=w, loss=value)
            return value

        # coordinate-wise descent
        for it in range(self.iterations):
            for k in range(len(gamma)):
                plus, minus = gamma.copy(), gamma.copy()
                plus[k] += self.fd_step
                minus[k] -= self.fd_step
                gamma[k] -= self.eta * (loss(plus) - loss(minus)) / (2. * self.fd_step)
            self.history.append(normalized_exp(gamma))
            self.log.debug('auto_fedavg iteration %d: weights %s.', it + 1, np.round(self.history[-1], 4))

        return self.history[-1]


__all__ = ['AutoFedAvg']
