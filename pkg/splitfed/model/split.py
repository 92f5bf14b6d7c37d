from collections import OrderedDict, namedtuple
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .params import SegmentParams
from .unet import UNet, UNetSpec, Stage, build_stages, run_stage
from ..autograd import Tensor, Tape, soft_dice_loss
from ..utils.exception import ConfigError, GraphError, ShapeError


# a tensor crossing a segment boundary, together with the role its consumer uses it in (main or skip)
Slot = namedtuple('Slot', ['tensor', 'role'])

FRONT = 'CS(FE)'
SERVER = 'S'
BACK = 'CS(BE)'


class CutPayload(object):
    """Tensors crossing one cut in one direction.

    The main tensor comes first, followed by the skip tensors. A skip flagged as shared is the very tensor sent
    as main, so on the forward path it travels in the same transmission and shares its losses.
    """

    FORWARD = 'forward'
    BACKWARD = 'backward'

    def __init__(self, main: np.ndarray, skips: Sequence[np.ndarray] = None, direction: str = FORWARD,
                 names: Sequence[str] = None, shared: Sequence[bool] = None, masks: list = None):
        """Initializes a new payload.

        Args:
            main: Main tensor.
            skips: Skip tensors, possibly empty.
            direction: forward (features) or backward (gradients).
            names: Names of tensors, main first.
            shared: Per skip, whether it is carried by the main tensor's transmission.
            masks: Loss masks, one per tensor, after passing a channel.
        """
        self.main = main
        self.skips = [] if skips is None else list(skips)
        self.direction = direction
        self.names = ['main'] + ['skip%d' % i for i in range(len(self.skips))] if names is None else list(names)
        self.shared = [False] * len(self.skips) if shared is None else list(shared)
        self.masks = masks

    @property
    def tensors(self) -> List[np.ndarray]:
        return [self.main] + self.skips

    def __len__(self) -> int:
        return 1 + len(self.skips)

    def replace(self, tensors: Sequence[np.ndarray], masks: list = None) -> 'CutPayload':
        """Returns a payload with the same description but new tensors."""
        return CutPayload(tensors[0], tensors[1:], direction=self.direction, names=self.names, shared=self.shared,
                          masks=masks)

    def __repr__(self):
        return 'CutPayload(%s, %s)' % (self.direction, ', '.join('%s%s' % (n, t.shape)
                                                                 for n, t in zip(self.names, self.tensors)))


class SplitSpec(object):
    """Split depth and the cut descriptions derived from it."""

    SHALLOW = 'shallow'
    DEEP = 'deep'
    DEPTHS = (SHALLOW, DEEP)

    def __init__(self, depth: str):
        """Initializes a new split.

        Args:
            depth: shallow or deep.

        Raises:
            ConfigError: On unknown depth label.
        """
        if depth not in SplitSpec.DEPTHS:
            raise ConfigError('Unknown split depth.', key='depth', value=depth)
        self.depth = depth
        self.cut_a: List[Slot] = []
        self.cut_b: List[Slot] = []
        self.local: List[Slot] = []
        self.assignment: Dict[str, str] = {}

    def assign(self, stages: Sequence[Stage]) -> Dict[str, str]:
        """Assigns every stage to a segment.

        Shallow: only the first encoder block runs on the client front-end and only the head on the back-end,
        so the first skip connection crosses the client-server link. Deep: the front-end also runs the first
        pool and the second encoder block, the back-end the last decoder, keeping the first skip connection on
        the client.
        """
        if self.depth == SplitSpec.SHALLOW:
            front, back = {'e1'}, {'head'}
        else:
            front, back = {'e1', 'p1', 'e2'}, {'d1', 'head'}
        return OrderedDict((s.name, FRONT if s.name in front else BACK if s.name in back else SERVER)
                           for s in stages)

    def derive(self, stages: Sequence[Stage]) -> 'SplitSpec':
        """Derives the tensors crossing each boundary from the stage graph.

        Args:
            stages: Stage graph of the U-Net.

        Returns:
            Self, with cut_a (front-end to server), cut_b (server to back-end) and local (front-end to back-end,
            never transmitted) filled.
        """
        self.assignment = self.assign(stages)
        producer = {'x': FRONT}
        boundaries = {(FRONT, SERVER): [], (SERVER, BACK): [], (FRONT, BACK): []}

        # find consumers in other segments
        for stage in stages:
            seg = self.assignment[stage.name]
            for pos, name in enumerate(stage.inputs):
                if producer[name] == seg:
                    continue
                key = (producer[name], seg)
                if key not in boundaries:
                    raise GraphError('Tensor flows backwards through the split.', tensor=name, segments=key)
                slot = Slot(name, stage.role(pos))
                if slot not in boundaries[key]:
                    boundaries[key].append(slot)
            producer[stage.name] = seg

        # main first, then skips
        for key in [(FRONT, SERVER), (SERVER, BACK)]:
            slots = boundaries[key]
            mains = [s for s in slots if s.role == 'main']
            if len(mains) != 1:
                raise GraphError('A cut must carry exactly one main tensor.', segments=key, slots=slots)
            boundaries[key] = mains + [s for s in slots if s.role != 'main']

        self.cut_a = boundaries[(FRONT, SERVER)]
        self.cut_b = boundaries[(SERVER, BACK)]
        self.local = boundaries[(FRONT, BACK)]
        return self

    def __repr__(self):
        return 'SplitSpec(%s, cut_a=%s, cut_b=%s, local=%s)' % (self.depth, self.cut_a, self.cut_b, self.local)


class SegmentGradients(namedtuple('SegmentGradients', ['payload', 'local', 'params'])):
    """Result of a segment's backward pass: gradient payload for the upstream cut (None for the front-end),
    gradients of client-local inputs and parameter gradients by name."""


class Segment(object):
    """One of the three parts of a split U-Net, with its own tape per forward pass."""

    def __init__(self, name: str, stages: Sequence[Stage], params: Dict[str, Tensor], inputs: Sequence[Slot],
                 outputs: Sequence[Slot], local_inputs: Sequence[Slot] = (), local_outputs: Sequence[Slot] = ()):
        """Initializes a new segment.

        Args:
            name: CS(FE), S or CS(BE).
            stages: Stages run by this segment, in order.
            params: Parameters of these stages by qualified name.
            inputs: Slots received through the upstream cut (or the image batch for the front-end).
            outputs: Slots sent through the downstream cut; empty for the back-end.
            local_inputs: Slots received from the front-end without passing a channel.
            local_outputs: Slots handed to the back-end without passing a channel.
        """
        self.name = name
        self.stages = list(stages)
        self.params = OrderedDict(params)
        self.inputs = list(inputs)
        self.outputs = list(outputs)
        self.local_inputs = list(local_inputs)
        self.local_outputs = list(local_outputs)

        # state of last forward pass
        self._tape: Optional[Tape] = None
        self._leaves: Dict[Slot, Tensor] = {}
        self._env: Dict[str, Tensor] = {}
        self._loss: Optional[Tensor] = None

    @property
    def parameters(self) -> SegmentParams:
        return SegmentParams(self.params)

    @property
    def dtype(self):
        return next(iter(self.params.values())).dtype

    def copy(self) -> 'Segment':
        """Returns an independent segment with copied parameters."""
        params = OrderedDict((n, Tensor(t.data.copy(), dtype=t.dtype, name=n)) for n, t in self.params.items())
        return Segment(self.name, self.stages, params, self.inputs, self.outputs, self.local_inputs,
                       self.local_outputs)

    def _feeds(self, inputs, local) -> List[Tuple[Slot, np.ndarray]]:
        # front-end gets the batch
        if self.name == FRONT:
            data = inputs.data if isinstance(inputs, Tensor) else np.asarray(inputs)
            if data.ndim != 4:
                raise ShapeError('Batch must be N x C x H x W.', segment=self.name, tensor='x', shape=data.shape)
            feeds = [(self.inputs[0], data)]
        else:
            if not isinstance(inputs, CutPayload) or len(inputs) != len(self.inputs):
                raise ShapeError('Payload does not match segment inputs.', segment=self.name,
                                 expected=[s.tensor for s in self.inputs],
                                 got=None if not isinstance(inputs, CutPayload) else inputs.names)
            feeds = list(zip(self.inputs, inputs.tensors))

        # local inputs
        for slot in self.local_inputs:
            if local is None or slot not in local:
                raise ShapeError('Missing client-local input.', segment=self.name, tensor=slot.tensor)
            feeds.append((slot, local[slot]))
        return feeds

    def forward(self, inputs, local: Dict[Slot, np.ndarray] = None):
        """Runs the segment's stages and records a tape for the backward pass.

        Args:
            inputs: Image batch for the front-end, otherwise the payload received through the upstream cut.
            local: Client-local tensors from the front-end, for the back-end of a deep split.

        Returns:
            Front-end: payload for the cut to the server, plus a dict of client-local tensors if there are any.
            Server: payload for the cut to the back-end. Back-end: class probabilities.

        Raises:
            ShapeError: If inputs do not match; names segment and tensor.
        """

        # new tape and leaves
        self._tape, self._leaves, self._env, self._loss = Tape(), {}, {}, None
        with self._tape:
            for slot, data in self._feeds(inputs, local):
                self._leaves[slot] = Tensor(data, dtype=self.dtype, name=slot.tensor)

            # run stages
            for stage in self.stages:
                args = []
                for pos, name in enumerate(stage.inputs):
                    if name in self._env:
                        args.append(self._env[name])
                    else:
                        args.append(self._leaves[Slot(name, stage.role(pos))])
                try:
                    self._env[stage.name] = run_stage(stage, args, self.params)
                except ShapeError as e:
                    raise ShapeError(e.message, segment=self.name, stage=stage.name, **e.context)

        # back-end returns probabilities
        if self.name == BACK:
            return self._env[self.stages[-1].name]

        # build payload
        main, skips = self.outputs[0], self.outputs[1:]
        payload = CutPayload(self._env[main.tensor].data, [self._env[s.tensor].data for s in skips],
                             direction=CutPayload.FORWARD, names=[s.tensor for s in self.outputs],
                             shared=[s.tensor == main.tensor for s in skips])
        if self.local_outputs:
            return payload, OrderedDict((s, self._env[s.tensor].data) for s in self.local_outputs)
        return payload

    def loss(self, target_onehot, eps: float = 1e-6) -> Tensor:
        """Attaches the Soft Dice loss to the back-end's tape.

        Args:
            target_onehot: One-hot target, N x C x H x W.
            eps: Dice smoothing.

        Returns:
            Scalar loss tensor.
        """
        if self.name != BACK or self._tape is None:
            raise GraphError('Loss can only be attached to a back-end after its forward pass.', segment=self.name)
        with self._tape:
            self._loss = soft_dice_loss(self._env[self.stages[-1].name], target_onehot, eps=eps)
        return self._loss

    def backward(self, upstream: CutPayload = None, local: Dict[Slot, np.ndarray] = None) -> SegmentGradients:
        """Propagates gradients through the recorded tape.

        Args:
            upstream: Gradient payload received through the downstream cut; unused for the back-end, which starts
                from its loss.
            local: Gradients of the client-local outputs, for the front-end of a deep split.

        Returns:
            Gradient payload for the upstream cut (mirroring the forward payload), gradients of local inputs and
            parameter gradients.

        Raises:
            GraphError: If called before forward, or on a back-end without loss.
            ShapeError: If upstream gradients do not match the forward outputs.
        """
        if self._tape is None:
            raise GraphError('Backward called before forward.', segment=self.name)

        # collect seeds
        outputs, upstreams = [], []
        if self.name == BACK:
            if self._loss is None:
                raise GraphError('No loss attached to back-end.', segment=self.name)
            outputs, upstreams = [self._loss], [np.ones_like(self._loss.data)]
        else:
            if not isinstance(upstream, CutPayload) or len(upstream) != len(self.outputs):
                raise ShapeError('Gradient payload does not match segment outputs.', segment=self.name,
                                 expected=[s.tensor for s in self.outputs])
            for slot, g in zip(self.outputs, upstream.tensors):
                outputs.append(self._env[slot.tensor])
                upstreams.append(g)
            for slot in self.local_outputs:
                if local is None or slot not in local:
                    raise ShapeError('Missing gradient of client-local output.', segment=self.name,
                                     tensor=slot.tensor)
                outputs.append(self._env[slot.tensor])
                upstreams.append(local[slot])

        # run it
        try:
            grads = self._tape.backward(outputs, upstreams)
        except ShapeError as e:
            raise ShapeError(e.message, segment=self.name, **e.context)
        params = OrderedDict((n, grads.grad(t)) for n, t in self.params.items())

        # gradients of inputs
        payload = None
        if self.name != FRONT:
            payload = CutPayload(grads.grad(self._leaves[self.inputs[0]]),
                                 [grads.grad(self._leaves[s]) for s in self.inputs[1:]],
                                 direction=CutPayload.BACKWARD, names=[s.tensor for s in self.inputs])
        local_grads = OrderedDict((s, grads.grad(self._leaves[s])) for s in self.local_inputs)
        return SegmentGradients(payload, local_grads, params)


def build_segments(spec: UNetSpec, split: SplitSpec, rng: np.random.Generator = None,
                   dtype=np.float32) -> Tuple[Segment, Segment, Segment]:
    """Builds a U-Net and partitions it into client front-end, server and client back-end.

    With the same random stream, the parameters equal those of UNet(spec, rng), so that chaining the three
    segments without a channel reproduces the monolithic network exactly.

    Args:
        spec: U-Net size.
        split: Split depth; its cut descriptions are derived here.
        rng: Random stream for initialization.
        dtype: Float type.

    Returns:
        Tuple of (CS(FE), S, CS(BE)).
    """
    model = UNet(spec, rng=rng, dtype=dtype)
    split.derive(model.stages)

    # distribute stages and parameters
    def segment(name, inputs, outputs, local_inputs=(), local_outputs=()):
        stages = [s for s in model.stages if split.assignment[s.name] == name]
        params = OrderedDict((n, model.params[n]) for s in stages for n in s.param_names())
        return Segment(name, stages, params, inputs, outputs, local_inputs, local_outputs)

    return (segment(FRONT, [Slot('x', 'main')], split.cut_a, local_outputs=split.local),
            segment(SERVER, split.cut_a, split.cut_b),
            segment(BACK, split.cut_b, [], local_inputs=split.local))


def forward_segment(segment: Segment, inputs, local: Dict[Slot, np.ndarray] = None):
    """Functional form of Segment.forward()."""
    return segment.forward(inputs, local)


def backward_segment(segment: Segment, upstream: CutPayload = None,
                     local: Dict[Slot, np.ndarray] = None) -> SegmentGradients:
    """Functional form of Segment.backward()."""
    return segment.backward(upstream, local)


__all__ = ['Slot', 'CutPayload', 'SplitSpec', 'Segment', 'SegmentGradients', 'build_segments', 'forward_segment',
           'backward_segment', 'FRONT', 'SERVER', 'BACK']
