from typing import Any, Dict, List

import numpy as np

from .aggregator import Aggregator, ClientReport, normalized_exp, sample_counts
from ..utils.exception import ConfigError


class FedNCLv2(Aggregator):
    """Sample-count weights damped by training loss.

    Each client gets a weight proportional to n_k * exp(-beta * train_loss_k), so clients that fit their data
    badly, e.g. because their link loses packets, contribute less.
    """

    def __init__(self, beta: float = 1.0, *args, **kwargs):
        """Initializes a new aggregator.

        Args:
            beta: Loss sensitivity, >= 0. With 0, this equals FedAvg.
        """
        Aggregator.__init__(self, *args, **kwargs)
        if beta < 0:
            raise ConfigError('beta must not be negative.', key='beta', value=beta)
        self.beta = beta

    def logits(self, reports: List[ClientReport]) -> np.ndarray:
        losses = np.array([r.train_loss for r in reports], dtype=np.float64)
        return np.log(sample_counts(reports)) - self.beta * losses

    def weights(self, reports: List[ClientReport], context: Dict[str, Any]) -> np.ndarray:
        return normalized_exp(self.logits(reports))


class FedNCLv4(FedNCLv2):
    """Like FedNCLv2, but additionally damped by each client's divergence from the mean parameters.

    The divergence d_k is the Euclidean distance of the client's vector to the mean vector, divided by the
    vector length; weights are proportional to n_k * exp(-beta * train_loss_k - lam * d_k).
    """

    def __init__(self, lam: float = 0.1, *args, **kwargs):
        """Initializes a new aggregator.

        Args:
            lam: Divergence weight, >= 0.
        """
        FedNCLv2.__init__(self, *args, **kwargs)
        if lam < 0:
            raise ConfigError('lam must not be negative.', key='lam', value=lam)
        self.lam = lam

    @staticmethod
    def divergence(reports: List[ClientReport]) -> np.ndarray:
        params = np.stack([r.params.astype(np.float64) for r in reports])
        if params.shape[1] == 0:
            return np.zeros(len(reports))
        mean = params.mean(axis=0)
        return np.linalg.norm(params - mean, axis=1) / params.shape[1]

    def weights(self, reports: List[ClientReport], context: Dict[str, Any]) -> np.ndarray:
        return normalized_exp(self.logits(reports) - self.lam * self.divergence(reports))


__all__ = ['FedNCLv2', 'FedNCLv4']
