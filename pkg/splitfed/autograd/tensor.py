import threading
from contextlib import contextmanager
from typing import Callable, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..utils.exception import GraphError, ShapeError


class Tensor(object):
    """Dense floating-point array that primitives can record onto a Tape.

    Activations use the N x C x H x W convention, convolution kernels O x I x K x K. Values are 32-bit floats
    by default; other float dtypes are kept as given, which the finite-difference checks rely on.
    """

    def __init__(self, data, dtype=np.float32, name: str = None):
        """Initializes a new tensor.

        Args:
            data: Array-like values.
            dtype: Float type to store values as.
            name: Optional name for log and error messages.
        """
        arr = np.asarray(data, dtype=dtype)
        self.data = arr if arr.flags.c_contiguous else arr.copy(order='C')
        self.name = name

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    @property
    def dtype(self):
        return self.data.dtype

    def numpy(self) -> np.ndarray:
        return self.data

    def item(self) -> float:
        return float(self.data.reshape(-1)[0])

    def __repr__(self):
        return 'Tensor(name=%s, shape=%s, dtype=%s)' % (self.name, self.shape, self.dtype)


class Node(object):
    """One recorded primitive: its inputs, its output and the function mapping the output gradient to input
    gradients."""

    __slots__ = ('op', 'inputs', 'output', 'backward')

    def __init__(self, op: str, inputs: Sequence[Tensor], output: Tensor,
                 backward: Callable[[np.ndarray], Sequence[Optional[np.ndarray]]]):
        self.op = op
        self.inputs = tuple(inputs)
        self.output = output
        self.backward = backward


class Gradients(object):
    """Gradients collected by a backward pass, keyed by tensor identity."""

    def __init__(self):
        self._grads = {}

    def accumulate(self, tensor: Tensor, grad: np.ndarray):
        """Adds a gradient contribution for the given tensor.

        Args:
            tensor: Tensor the contribution belongs to.
            grad: Gradient contribution, same shape as tensor.
        """
        key = id(tensor)
        if key in self._grads:
            self._grads[key] = (tensor, self._grads[key][1] + grad)
        else:
            self._grads[key] = (tensor, grad)

    def __contains__(self, tensor: Tensor) -> bool:
        return id(tensor) in self._grads

    def __getitem__(self, tensor: Tensor) -> np.ndarray:
        return self._grads[id(tensor)][1]

    def __len__(self) -> int:
        return len(self._grads)

    def get(self, tensor: Tensor, default=None) -> Optional[np.ndarray]:
        entry = self._grads.get(id(tensor))
        return default if entry is None else entry[1]

    def grad(self, tensor: Tensor) -> np.ndarray:
        """Returns gradient for tensor, or zeros if nothing reached it.

        Args:
            tensor: Tensor to get gradient for.

        Returns:
            Gradient array with the tensor's shape.
        """
        entry = self._grads.get(id(tensor))
        return np.zeros_like(tensor.data) if entry is None else entry[1]

    def items(self) -> Iterator[Tuple[Tensor, np.ndarray]]:
        return iter(self._grads.values())


class Tape(object):
    """Records primitives in execution order for reverse-mode differentiation.

    A tape becomes active for the current thread inside a ``with`` block; primitives executed there append a
    node to it. Tapes are not shared between threads.
    """

    _local = threading.local()

    def __init__(self):
        self.nodes: List[Node] = []

    @classmethod
    def _stack(cls) -> List['Tape']:
        if not hasattr(cls._local, 'stack'):
            cls._local.stack = []
        return cls._local.stack

    @classmethod
    def active(cls) -> Optional['Tape']:
        """Returns the innermost active tape of this thread, if any."""
        stack = cls._stack()
        return stack[-1] if stack else None

    @classmethod
    @contextmanager
    def detached(cls):
        """Context in which nothing is recorded, not even on an enclosing tape."""
        stack = cls._stack()
        stack.append(None)
        try:
            yield
        finally:
            stack.pop()

    def __enter__(self) -> 'Tape':
        Tape._stack().append(self)
        return self

    def __exit__(self, *exc):
        stack = Tape._stack()
        if not stack or stack[-1] is not self:
            raise GraphError('Tapes must be closed in reverse order of opening.')
        stack.pop()

    def __len__(self) -> int:
        return len(self.nodes)

    def record(self, node: Node):
        self.nodes.append(node)

    def backward(self, outputs: Union[Tensor, Sequence[Tensor]],
                 upstreams: Union[np.ndarray, Sequence[np.ndarray]] = None) -> Gradients:
        """Runs reverse accumulation over all recorded nodes.

        Args:
            outputs: Tensor(s) to start from. Without upstreams, each must be a scalar loss.
            upstreams: Gradient(s) to seed the given outputs with. An output given several times accumulates
                all its seeds.

        Returns:
            Gradients for every tensor reached, recorded inputs and parameters included.

        Raises:
            GraphError: If no upstream is given for a non-scalar output.
            ShapeError: If an upstream gradient does not match its output.
        """

        # make lists
        if isinstance(outputs, Tensor):
            outputs = [outputs]
            upstreams = None if upstreams is None else [upstreams]

        # seed outputs
        grads = Gradients()
        if upstreams is None:
            for out in outputs:
                if out.size != 1:
                    raise GraphError('Backward without upstream gradient requires a scalar loss.',
                                     shape=out.shape)
            upstreams = [np.ones_like(out.data) for out in outputs]
        if len(upstreams) != len(outputs):
            raise GraphError('Number of upstream gradients does not match number of outputs.',
                             outputs=len(outputs), upstreams=len(upstreams))
        for out, up in zip(outputs, upstreams):
            up = np.asarray(up, dtype=out.dtype)
            if up.shape != out.shape:
                raise ShapeError('Upstream gradient does not match output.', output=out.shape, upstream=up.shape,
                                 tensor=out.name)
            grads.accumulate(out, up)

        # walk nodes in reverse, each exactly once
        for node in reversed(self.nodes):
            g = grads.get(node.output)
            if g is None:
                continue
            for inp, ig in zip(node.inputs, node.backward(g)):
                if ig is not None:
                    grads.accumulate(inp, ig)

        # finished
        return grads


def record(op: str, inputs: Sequence[Tensor], output: Tensor,
           backward: Callable[[np.ndarray], Sequence[Optional[np.ndarray]]]) -> Tensor:
    """Records a primitive on the active tape, if there is one, and returns its output.

    Args:
        op: Name of primitive.
        inputs: Input tensors.
        output: Output tensor.
        backward: Maps output gradient to a gradient (or None) per input.

    Returns:
        The output tensor.
    """
    tape = Tape.active()
    if tape is not None:
        tape.record(Node(op, inputs, output, backward))
    return output


__all__ = ['Tensor', 'Tape', 'Gradients', 'Node', 'record']
