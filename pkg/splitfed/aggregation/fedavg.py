from typing import Any, Dict, List

import numpy as np

from .aggregator import Aggregator, ClientReport, sample_counts


class FedAvg(Aggregator):
    """Mean of client parameters weighted by the clients' numbers of training samples."""

    def weights(self, reports: List[ClientReport], context: Dict[str, Any]) -> np.ndarray:
        n = sample_counts(reports)
        return n / n.sum()


__all__ = ['FedAvg']
