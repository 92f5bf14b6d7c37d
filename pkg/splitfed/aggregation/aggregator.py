from typing import Any, Dict, List, Sequence, Tuple

import numpy as np

from ..object import splitfedObject
from ..utils.exception import AggregationError


class ClientReport(object):
    """Outcome of one client's local training, as seen by the aggregator."""

    def __init__(self, client_id: int, params: np.ndarray, n_samples: int, train_loss: float = 0.,
                 val_loss: float = 0.):
        """Initializes a new report.

        Args:
            client_id: Client the report comes from.
            params: Flat parameter vector, client front-end followed by client back-end.
            n_samples: Number of training samples of this client.
            train_loss: Mean training loss of the last local epoch.
            val_loss: Mean validation loss after local training.
        """
        self.client_id = client_id
        self.params = np.asarray(params)
        self.n_samples = n_samples
        self.train_loss = train_loss
        self.val_loss = val_loss

    def __repr__(self):
        return 'ClientReport(client=%d, n=%d, train_loss=%.4f, val_loss=%.4f)' % (
            self.client_id, self.n_samples, self.train_loss, self.val_loss)


class Aggregator(splitfedObject):
    """Aggregator is the base class for all strategies combining client parameter vectors into one.

    Derived classes only compute weights, summation is done here in ascending order of client IDs, so that
    the result does not depend on the order of reports.
    """

    def __init__(self, *args, **kwargs):
        """Initialize a new aggregator."""
        splitfedObject.__init__(self, *args, **kwargs)

    def __call__(self, reports: Sequence[ClientReport], context: Dict[str, Any] = None) \
            -> Tuple[np.ndarray, np.ndarray]:
        """Aggregates reports.

        Args:
            reports: Reports of one round.
            context: Extra information for strategies that need it, e.g. an evaluation callback.

        Returns:
            Tuple of global parameter vector and weights, the latter in the order of the given reports.

        Raises:
            AggregationError: On empty reports, unequal vector lengths, invalid sample counts or non-finite
                losses.
        """
        self._check(reports)

        # sort by client ID
        order = sorted(range(len(reports)), key=lambda i: reports[i].client_id)
        ordered = [reports[i] for i in order]

        # weights and global
        w = np.asarray(self.weights(ordered, {} if context is None else context), dtype=np.float64)
        if w.shape != (len(reports),) or not np.all(np.isfinite(w)) or np.any(w < 0):
            raise AggregationError('Invalid weights.', weights=w)
        global_params = combine([r.params for r in ordered], w)

        # back to order of reports
        weights = np.empty_like(w)
        weights[order] = w
        self.log.debug('Aggregated %d reports with weights %s.', len(reports), np.round(weights, 4))
        return global_params, weights

    def weights(self, reports: List[ClientReport], context: Dict[str, Any]) -> np.ndarray:
        """Computes weights for reports sorted by client ID.

        Args:
            reports: Validated reports, sorted by client ID.
            context: Context passed to __call__.

        Returns:
            Nonnegative weights summing to one.
        """
        raise NotImplementedError

    @staticmethod
    def _check(reports: Sequence[ClientReport]):
        if len(reports) == 0:
            raise AggregationError('No reports to aggregate.')
        length = reports[0].params.shape
        for r in reports:
            if r.params.ndim != 1 or r.params.shape != length:
                raise AggregationError('Parameter vectors differ in length.', client_id=r.client_id,
                                       expected=length, got=r.params.shape)
            if r.n_samples < 1:
                raise AggregationError('Client has no samples.', client_id=r.client_id, n_samples=r.n_samples)
            if not np.isfinite(r.train_loss) or not np.isfinite(r.val_loss):
                raise AggregationError('Non-finite loss in report.', client_id=r.client_id,
                                       train_loss=r.train_loss, val_loss=r.val_loss)
        ids = [r.client_id for r in reports]
        if len(set(ids)) != len(ids):
            raise AggregationError('Duplicate client IDs.', client_ids=ids)


def combine(vectors: Sequence[np.ndarray], weights: np.ndarray) -> np.ndarray:
    """Weighted sum of vectors in the given order, accumulated in double precision.

    Args:
        vectors: Equally long parameter vectors.
        weights: One weight per vector.

    Returns:
        Weighted sum in the dtype of the first vector.
    """
    total = np.zeros(vectors[0].shape, dtype=np.float64)
    for v, w in zip(vectors, weights):
        total += w * v.astype(np.float64)
    return total.astype(vectors[0].dtype)


def normalized_exp(logits: np.ndarray) -> np.ndarray:
    """Softmax over a vector of log-weights."""
    logits = np.asarray(logits, dtype=np.float64)
    e = np.exp(logits - logits.max())
    return e / e.sum()


def sample_counts(reports: Sequence[ClientReport]) -> np.ndarray:
    return np.array([r.n_samples for r in reports], dtype=np.float64)


__all__ = ['ClientReport', 'Aggregator', 'combine', 'normalized_exp', 'sample_counts']
