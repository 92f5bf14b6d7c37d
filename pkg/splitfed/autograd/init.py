from typing import Sequence

import numpy as np

from .tensor import Tensor


def he_init(shape: Sequence[int], rng: np.random.Generator, dtype=np.float32, name: str = None) -> Tensor:
    """He-normal initialization, std = sqrt(2 / fan_in) with fan_in the product of all but the first extent.

    Args:
        shape: Shape of new tensor, e.g. O x I x K x K.
        rng: Random stream to draw from.
        dtype: Float type.
        name: Optional tensor name.

    Returns:
        New tensor.
    """
    fan_in = int(np.prod(shape[1:])) if len(shape) > 1 else int(shape[0])
    return Tensor(rng.normal(0., np.sqrt(2. / fan_in), size=tuple(shape)), dtype=dtype, name=name)


__all__ = ['he_init']
