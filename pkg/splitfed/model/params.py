from collections import OrderedDict
from typing import Dict, List, Sequence, Tuple

import numpy as np

from ..autograd import Tensor
from ..utils.exception import ShapeError


class SegmentParams(object):
    """Ordered parameter tensors of a segment with a flat-vector view for aggregation."""

    def __init__(self, params: Dict[str, Tensor]):
        """Initializes a new view.

        Args:
            params: Parameters by qualified name, in a fixed order.
        """
        self.params = OrderedDict(params)

    @property
    def names(self) -> List[str]:
        return list(self.params.keys())

    @property
    def tensors(self) -> List[Tensor]:
        return list(self.params.values())

    @property
    def shapes(self) -> List[Tuple[int, ...]]:
        return [t.shape for t in self.params.values()]

    @property
    def size(self) -> int:
        return int(sum(t.size for t in self.params.values()))

    def __len__(self) -> int:
        return self.size

    def flatten(self) -> np.ndarray:
        """Returns all parameters concatenated in order as one float vector."""
        if not self.params:
            return np.zeros(0, dtype=np.float32)
        return np.concatenate([t.data.reshape(-1) for t in self.params.values()])

    def load(self, vector: np.ndarray):
        """Replaces all parameter values from a flat vector.

        Args:
            vector: Flat vector as returned by flatten().

        Raises:
            ShapeError: If the vector length differs from size.
        """
        vector = np.asarray(vector)
        if vector.shape != (self.size,):
            raise ShapeError('Flat parameter vector has wrong length.', expected=self.size, got=vector.shape)
        offset = 0
        for t in self.params.values():
            t.data = vector[offset:offset + t.size].reshape(t.shape).astype(t.dtype, copy=True)
            offset += t.size


def concat_params(views: Sequence[SegmentParams]) -> np.ndarray:
    """Flattens several segments into one vector, in the given order."""
    return np.concatenate([v.flatten() for v in views])


def split_vector(vector: np.ndarray, views: Sequence[SegmentParams]) -> List[np.ndarray]:
    """Cuts a vector made by concat_params() back into one piece per segment."""
    pieces, offset = [], 0
    for v in views:
        pieces.append(vector[offset:offset + v.size])
        offset += v.size
    if offset != len(vector):
        raise ShapeError('Flat parameter vector has wrong length.', expected=offset, got=len(vector))
    return pieces


__all__ = ['SegmentParams', 'concat_params', 'split_vector']
