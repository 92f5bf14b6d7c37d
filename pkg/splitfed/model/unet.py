from collections import OrderedDict
from typing import Dict, List, Sequence

import numpy as np

from ..autograd import Tensor, Tape, conv2d, pointwise_conv, relu, maxpool2, upsample2, concat_channels, \
    softmax_channels, he_init
from ..utils.exception import ConfigError, ShapeError


class UNetSpec(object):
    """Size description of a U-Net."""

    def __init__(self, levels: int = 2, base_channels: int = 8, num_classes: int = 5, in_channels: int = 1):
        """Initializes a new spec.

        Args:
            levels: Number of encoder blocks before the bottleneck.
            base_channels: Channels of the first encoder block, doubled per level.
            num_classes: Number of segmentation classes.
            in_channels: Channels of the input image.
        """
        if levels < 2:
            raise ConfigError('U-Net needs at least two levels.', key='levels', value=levels)
        if base_channels < 1:
            raise ConfigError('base_channels must be positive.', key='base_channels', value=base_channels)
        if num_classes < 2:
            raise ConfigError('num_classes must be at least 2.', key='num_classes', value=num_classes)
        self.levels = levels
        self.base_channels = base_channels
        self.num_classes = num_classes
        self.in_channels = in_channels

    def channels(self, level: int) -> int:
        """Channels of the encoder block at the given level, 1-based; levels + 1 is the bottleneck."""
        return self.base_channels * 2 ** (level - 1)

    def __repr__(self):
        return 'UNetSpec(levels=%d, base_channels=%d, num_classes=%d)' % (self.levels, self.base_channels,
                                                                         self.num_classes)


class Stage(object):
    """One node of the U-Net stage graph. Each stage produces a tensor named like the stage itself."""

    ENCODER = 'encoder'
    POOL = 'pool'
    DECODER = 'decoder'
    HEAD = 'head'

    def __init__(self, name: str, kind: str, inputs: Sequence[str], shapes: Dict[str, tuple] = None):
        """Initializes a new stage.

        Args:
            name: Name of stage and of the tensor it produces.
            kind: One of encoder, pool, decoder, head.
            inputs: Names of input tensors; decoders take (below, skip).
            shapes: Parameter shapes by local name.
        """
        self.name = name
        self.kind = kind
        self.inputs = list(inputs)
        self.shapes = OrderedDict() if shapes is None else OrderedDict(shapes)

    def role(self, position: int) -> str:
        """Role of an input: the second input of a decoder is a skip connection, everything else main."""
        return 'skip' if self.kind == Stage.DECODER and position == 1 else 'main'

    def param_names(self) -> List[str]:
        return ['%s.%s' % (self.name, n) for n in self.shapes]

    def __repr__(self):
        return 'Stage(%s, %s, inputs=%s)' % (self.name, self.kind, self.inputs)


def _conv_shapes(prefix: str, c_in: int, c_out: int) -> list:
    return [(prefix + '.weight', (c_out, c_in, 3, 3)), (prefix + '.bias', (c_out,))]


def build_stages(spec: UNetSpec) -> List[Stage]:
    """Builds the stage graph in execution order.

    Encoders e1..eL alternate with pools p1..pL, followed by bottleneck b, decoders dL..d1 and the head.

    Args:
        spec: U-Net size.

    Returns:
        List of stages.
    """
    stages = []

    # encoder path
    below, c_in = 'x', spec.in_channels
    for level in range(1, spec.levels + 1):
        c = spec.channels(level)
        stages.append(Stage('e%d' % level, Stage.ENCODER, [below],
                            _conv_shapes('conv1', c_in, c) + _conv_shapes('conv2', c, c)))
        stages.append(Stage('p%d' % level, Stage.POOL, ['e%d' % level]))
        below, c_in = 'p%d' % level, c

    # bottleneck
    c = spec.channels(spec.levels + 1)
    stages.append(Stage('b', Stage.ENCODER, [below], _conv_shapes('conv1', c_in, c) + _conv_shapes('conv2', c, c)))
    below, c_in = 'b', c

    # decoder path
    for level in range(spec.levels, 0, -1):
        c = spec.channels(level)
        stages.append(Stage('d%d' % level, Stage.DECODER, [below, 'e%d' % level],
                            _conv_shapes('up', c_in, c) + _conv_shapes('conv1', 2 * c, c) +
                            _conv_shapes('conv2', c, c)))
        below, c_in = 'd%d' % level, c

    # head
    stages.append(Stage('head', Stage.HEAD, [below],
                        [('conv.weight', (spec.num_classes, c_in, 1, 1)), ('conv.bias', (spec.num_classes,))]))
    return stages


def init_params(stages: Sequence[Stage], rng: np.random.Generator, dtype=np.float32) -> 'OrderedDict[str, Tensor]':
    """He-normal kernels, zero biases, drawn in stage order.

    Args:
        stages: Stage graph.
        rng: Random stream.
        dtype: Float type.

    Returns:
        Parameters by qualified name.
    """
    params = OrderedDict()
    for stage in stages:
        for local, shape in stage.shapes.items():
            name = '%s.%s' % (stage.name, local)
            if local.endswith('.bias'):
                params[name] = Tensor(np.zeros(shape), dtype=dtype, name=name)
            else:
                params[name] = he_init(shape, rng, dtype=dtype, name=name)
    return params


def run_stage(stage: Stage, inputs: Sequence[Tensor], params: Dict[str, Tensor]) -> Tensor:
    """Executes one stage, recording on the active tape.

    Args:
        stage: Stage to run.
        inputs: Input tensors in the order of stage.inputs.
        params: Parameters by qualified name, must contain the stage's.

    Returns:
        Output tensor.
    """

    def p(local):
        return params['%s.%s' % (stage.name, local)]

    def conv_relu(x, prefix):
        return relu(conv2d(x, p(prefix + '.weight'), p(prefix + '.bias')))

    if stage.kind == Stage.ENCODER:
        out = conv_relu(conv_relu(inputs[0], 'conv1'), 'conv2')
    elif stage.kind == Stage.POOL:
        out = maxpool2(inputs[0])
    elif stage.kind == Stage.DECODER:
        up = conv_relu(upsample2(inputs[0]), 'up')
        out = conv_relu(conv_relu(concat_channels(up, inputs[1]), 'conv1'), 'conv2')
    elif stage.kind == Stage.HEAD:
        out = softmax_channels(pointwise_conv(inputs[0], p('conv.weight'), p('conv.bias')))
    else:
        raise ValueError('Unknown stage kind: %s' % stage.kind)

    out.name = stage.name
    return out


class UNet(object):
    """The unpartitioned U-Net, used for centralized training, evaluation and as reference for the split."""

    def __init__(self, spec: UNetSpec, rng: np.random.Generator = None, dtype=np.float32):
        """Initializes a new U-Net.

        Args:
            spec: U-Net size.
            rng: Random stream for initialization; a fresh unseeded one if None.
            dtype: Float type of parameters.
        """
        self.spec = spec
        self.stages = build_stages(spec)
        self.params = init_params(self.stages, np.random.default_rng() if rng is None else rng, dtype=dtype)

    def forward(self, x) -> Tensor:
        """Runs the full network on a batch.

        Args:
            x: Batch of images, N x C x H x W, H and W divisible by 2**levels.

        Returns:
            Per-pixel class probabilities, N x num_classes x H x W.
        """
        x = x if isinstance(x, Tensor) else Tensor(x, dtype=self.dtype)
        x.name = 'x'
        if x.ndim != 4 or x.shape[1] != self.spec.in_channels or \
                x.shape[2] % 2 ** self.spec.levels or x.shape[3] % 2 ** self.spec.levels:
            raise ShapeError('Input does not fit U-Net.', input=x.shape, levels=self.spec.levels)

        # run stages in order
        env = {'x': x}
        for stage in self.stages:
            env[stage.name] = run_stage(stage, [env[i] for i in stage.inputs], self.params)
        return env[self.stages[-1].name]

    @classmethod
    def from_params(cls, spec: UNetSpec, params: Dict[str, Tensor], copy: bool = False) -> 'UNet':
        """Creates a U-Net from existing parameters, e.g. those of the three segments of a split.

        Args:
            spec: U-Net size.
            params: Parameters by qualified name; must contain exactly the ones of spec.
            copy: If True, parameter values are copied, otherwise the tensors are shared.

        Returns:
            New U-Net.

        Raises:
            ShapeError: If names or shapes do not match.
        """
        model = cls.__new__(cls)
        model.spec = spec
        model.stages = build_stages(spec)
        model.params = OrderedDict()
        for stage in model.stages:
            for local, shape in stage.shapes.items():
                name = '%s.%s' % (stage.name, local)
                if name not in params or params[name].shape != tuple(shape):
                    raise ShapeError('Parameter missing or of wrong shape.', tensor=name, expected=shape,
                                     got=params[name].shape if name in params else None)
                t = params[name]
                model.params[name] = Tensor(t.data.copy(), dtype=t.dtype, name=name) if copy else t
        if len(model.params) != len(params):
            raise ShapeError('Unexpected parameters.', extra=sorted(set(params) - set(model.params)))
        return model

    @property
    def dtype(self):
        return next(iter(self.params.values())).dtype

    def parameters(self) -> List[Tensor]:
        return list(self.params.values())

    def predict(self, x, batch_size: int = 16) -> np.ndarray:
        """Class index per pixel, computed without recording a tape.

        Args:
            x: Images, N x C x H x W.
            batch_size: Number of images per forward pass.

        Returns:
            N x H x W array of class indices.
        """
        x = np.asarray(x.data if isinstance(x, Tensor) else x)
        return np.concatenate([self.probabilities(x[i:i + batch_size]).argmax(axis=1)
                               for i in range(0, len(x), batch_size)])

    def probabilities(self, x) -> np.ndarray:
        """Class probabilities for a batch, computed without recording a tape."""
        with Tape.detached():
            return self.forward(x).data


__all__ = ['UNetSpec', 'Stage', 'UNet', 'build_stages', 'init_params', 'run_stage']
