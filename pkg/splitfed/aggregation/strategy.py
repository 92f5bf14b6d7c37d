import logging
from typing import Any, Dict, Sequence, Tuple

import numpy as np
import pandas as pd

from .aggregator import Aggregator, ClientReport
from ..object import create_object
from ..utils.exception import ConfigError


# aggregation kinds and their implementing classes
KINDS = {
    'naive': 'splitfed.aggregation.NaiveAverage',
    'fedavg': 'splitfed.aggregation.FedAvg',
    'auto_fedavg': 'splitfed.aggregation.AutoFedAvg',
    'fed_ncl_v2': 'splitfed.aggregation.FedNCLv2',
    'fed_ncl_v4': 'splitfed.aggregation.FedNCLv4',
}

# parameters understood by each kind
PARAMETERS = {
    'naive': (),
    'fedavg': (),
    'auto_fedavg': ('eta', 'iterations'),
    'fed_ncl_v2': ('beta',),
    'fed_ncl_v4': ('beta', 'lam'),
}


class AggregatorSpec(object):
    """Aggregation strategy and its parameters."""

    def __init__(self, kind: str = 'fedavg', beta: float = 1.0, lam: float = 0.1, eta: float = 0.1,
                 iterations: int = 3, cls: str = None):
        """Initializes a new spec.

        Args:
            kind: One of naive, fedavg, auto_fedavg, fed_ncl_v2, fed_ncl_v4.
            beta: Loss sensitivity of fed_ncl_v2/v4.
            lam: Divergence weight of fed_ncl_v4.
            eta: Step size of auto_fedavg.
            iterations: Iterations of auto_fedavg.
            cls: Fully qualified class name to use instead of the one given by kind.

        Raises:
            ConfigError: On unknown kind or negative parameters.
        """
        if cls is None and kind not in KINDS:
            raise ConfigError('Unknown aggregator.', key='kind', value=kind)
        for key, value in [('beta', beta), ('lam', lam), ('eta', eta), ('iterations', iterations)]:
            if value < 0:
                raise ConfigError('Aggregator parameter must not be negative.', key=key, value=value)
        self.kind = kind
        self.beta = beta
        self.lam = lam
        self.eta = eta
        self.iterations = iterations
        self.cls = cls

    def create(self, log: logging.Logger = None) -> Aggregator:
        """Creates the aggregator object.

        Args:
            log: Logger for the new object.

        Returns:
            New aggregator.
        """
        config = {'class': self.cls if self.cls is not None else KINDS[self.kind]}
        config.update({p: getattr(self, p) for p in PARAMETERS.get(self.kind, ())})
        return create_object(config, log=log, klass=Aggregator)

    @property
    def label(self) -> str:
        """Name of strategy in output files, the class name for custom aggregators."""
        return self.cls if self.kind == 'custom' and self.cls is not None else self.kind

    def to_dict(self) -> Dict[str, Any]:
        return {'kind': self.kind, 'beta': self.beta, 'lam': self.lam, 'eta': self.eta,
                'iterations': self.iterations}

    def __repr__(self):
        return 'AggregatorSpec(%s)' % ', '.join('%s=%s' % (k, v) for k, v in self.to_dict().items())


def aggregate(reports: Sequence[ClientReport], spec: AggregatorSpec, context: Dict[str, Any] = None) \
        -> Tuple[np.ndarray, np.ndarray]:
    """Aggregates client reports with the strategy described by spec.

    Args:
        reports: Reports of one round.
        spec: Aggregation strategy.
        context: Context for the strategy, e.g. {'evaluate': func} for auto_fedavg.

    Returns:
        Tuple of global parameter vector and weights in order of reports.
    """
    return spec.create()(reports, context)


def weights_report(weights: Sequence[float], spec: AggregatorSpec, client_ids: Sequence[int] = None,
                   **provenance) -> pd.DataFrame:
    """Creates a table of one round's aggregation weights.

    Args:
        weights: Weights as returned by aggregate().
        spec: Strategy that produced them.
        client_ids: Client per weight; 0..K-1 if not given.
        provenance: Further constant columns, e.g. run_id or global_epoch.

    Returns:
        Table with one row per client.
    """
    weights = np.asarray(weights, dtype=np.float64)
    df = pd.DataFrame({'client_id': np.arange(len(weights)) if client_ids is None else list(client_ids),
                       'weight': weights})
    df.insert(0, 'aggregator', spec.label)
    for i, (key, value) in enumerate(provenance.items()):
        df.insert(i, key, value)
    return df


def write_weights(df: pd.DataFrame, filename: str, append: bool = False):
    """Writes a weights table to CSV with full float precision."""
    df.to_csv(filename, index=False, mode='a' if append else 'w', header=not append, float_format='%.17g')


def read_weights(filename: str) -> pd.DataFrame:
    """Reads a weights table written by write_weights()."""
    return pd.read_csv(filename, float_precision='round_trip')


__all__ = ['KINDS', 'AggregatorSpec', 'aggregate', 'weights_report', 'write_weights', 'read_weights']
