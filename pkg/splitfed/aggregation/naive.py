from typing import Any, Dict, List

import numpy as np

from .aggregator import Aggregator, ClientReport


class NaiveAverage(Aggregator):
    """Unweighted mean of all client parameters."""

    def weights(self, reports: List[ClientReport], context: Dict[str, Any]) -> np.ndarray:
        return np.full(len(reports), 1. / len(reports))


__all__ = ['NaiveAverage']
