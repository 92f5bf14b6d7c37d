import logging
from typing import List, Sequence, Tuple

import numpy as np

from ..autograd import AdamState, adam_step, one_hot
from ..channel import ErasureChannel
from ..data import Dataset, augment
from ..model import Segment, SegmentParams, UNet
from ..utils.exception import ConfigError, TrainingError

log = logging.getLogger(__name__)


class ClientShare(object):
    """Training and validation data of one client."""

    def __init__(self, client_id: int, train: Dataset, val: Dataset):
        self.client_id = client_id
        self.train = train
        self.val = val

    def __repr__(self):
        return 'ClientShare(client=%d, train=%d, val=%d)' % (self.client_id, len(self.train), len(self.val))


def client_counts(n: int, proportions: Sequence[float]) -> List[int]:
    """Number of samples per client, rounded down, with the remainder going to client 0."""
    counts = [int(np.floor(p * n + 1e-9)) for p in proportions]
    counts[0] += n - sum(counts)
    return counts


def partition_data(dataset: Dataset, proportions: Sequence[float], seed: int, val_fraction: float = 0.15) \
        -> List[ClientShare]:
    """Distributes a training pool non-uniformly among clients.

    Samples are shuffled once and cut into consecutive blocks according to proportions; each block is then
    split into training and validation data.

    Args:
        dataset: Training pool.
        proportions: Share of each client, summing to one.
        seed: Seed for shuffling.
        val_fraction: Fraction of each share used for validation, rounded to the nearest integer.

    Returns:
        One share per client.

    Raises:
        ConfigError: If proportions do not sum to one or a client would get no training sample.
    """
    if abs(sum(proportions) - 1.) > 1e-9:
        raise ConfigError('Proportions must sum to 1.', key='training.proportions', value=list(proportions))

    # counts
    counts = client_counts(len(dataset), proportions)
    n_val = [int(np.floor(val_fraction * c + 0.5)) for c in counts]
    for cid, (c, v) in enumerate(zip(counts, n_val)):
        if c - v < 1:
            raise ConfigError('Client would get no training sample.', key='training.proportions',
                              client_id=cid, samples=c, n=len(dataset))

    # shuffle and cut
    perm = np.random.default_rng([seed, 2]).permutation(len(dataset))
    shares, offset = [], 0
    for cid, (c, v) in enumerate(zip(counts, n_val)):
        idx = perm[offset:offset + c]
        shares.append(ClientShare(cid, dataset.subset(idx[v:]), dataset.subset(idx[:v])))
        offset += c
    return shares


class ClientState(object):
    """A SplitFed client: its segments, its copy of the server segment, optimizer states, data and link."""

    def __init__(self, share: ClientShare, front: Segment, server: Segment, back: Segment,
                 channel: ErasureChannel, lr: float = 1e-4, batch_size: int = 4, num_classes: int = 5,
                 image_size: int = None, rng: np.random.Generator = None):
        """Initializes a new client.

        Args:
            share: Data of client.
            front: Client front-end.
            server: Client's copy of the server segment.
            back: Client back-end.
            channel: Link to the server.
            lr: Learning rate.
            batch_size: Batch size.
            num_classes: Number of classes.
            image_size: Size images are resized to during augmentation.
            rng: Random stream for shuffling and augmentation.
        """
        self.share = share
        self.front, self.server, self.back = front, server, back
        self.channel = channel
        self.batch_size = batch_size
        self.num_classes = num_classes
        self.image_size = image_size
        self.rng = np.random.default_rng() if rng is None else rng
        self.adam = [AdamState(list(s.params.values()), lr=lr) for s in self.segments]
        self.train_loss = np.nan
        self.val_loss = np.nan
        self.transmissions = 0

    @property
    def client_id(self) -> int:
        return self.share.client_id

    @property
    def lossy(self) -> bool:
        return self.channel.enabled

    @property
    def segments(self) -> Tuple[Segment, Segment, Segment]:
        return self.front, self.server, self.back

    @property
    def client_params(self) -> List[SegmentParams]:
        """Parameters the client owns, front-end first."""
        return [self.front.parameters, self.back.parameters]

    def batches(self):
        """Yields shuffled and augmented batches of the training data for one epoch."""
        order = self.rng.permutation(len(self.share.train))
        for start in range(0, len(order), self.batch_size):
            samples = [augment(self.share.train[i], self.rng, size=self.image_size)
                       for i in order[start:start + self.batch_size]]
            yield Dataset(samples).arrays()

    def train_step(self, x: np.ndarray, y: np.ndarray, epoch: int = 0, batch: int = 0) -> float:
        """Trains on one batch, passing all cut payloads through the client's link.

        Args:
            x: Images, N x 1 x H x W.
            y: Class masks, N x H x W.
            epoch: Local epoch, for error messages.
            batch: Batch in epoch, for error messages.

        Returns:
            Soft Dice loss of batch.

        Raises:
            TrainingError: If the loss is not finite.
        """
        # forward, features cross both cuts
        out = self.front.forward(x)
        payload, local = out if isinstance(out, tuple) else (out, None)
        features = self.server.forward(self.channel.send(payload))
        self.back.forward(self.channel.send(features), local)
        loss = self.back.loss(one_hot(y, self.num_classes, dtype=self.back.dtype))
        if not np.isfinite(loss.item()):
            raise TrainingError('Loss is not finite.', client_id=self.client_id, epoch=epoch, batch=batch,
                                loss=loss.item())

        # backward, gradients cross both cuts in reverse
        g_back = self.back.backward()
        g_server = self.server.backward(self.channel.send(g_back.payload))
        g_front = self.front.backward(self.channel.send(g_server.payload), g_back.local)
        self.transmissions += 4

        # update all three parts
        for segment, grads, state in zip(self.segments, [g_front, g_server, g_back], self.adam):
            adam_step(list(segment.params.values()), list(grads.params.values()), state)
        return loss.item()

    def local_epoch(self, epoch: int = 0) -> float:
        """Trains one pass over the client's training data.

        Args:
            epoch: Epoch number for error messages and log.

        Returns:
            Mean training loss over batches.

        Raises:
            TrainingError: If a batch loss is not finite.
        """
        losses = []
        for batch, (x, y) in enumerate(self.batches()):
            losses.append(self.train_step(x, y, epoch=epoch, batch=batch))
        self.train_loss = float(np.mean(losses))
        log.debug('Client %d, local epoch %d: train loss %.5f.', self.client_id, epoch, self.train_loss)
        return self.train_loss

    def model(self, spec) -> UNet:
        """Returns the client's full model, sharing parameters with its segments."""
        params = {}
        for segment in self.segments:
            params.update(segment.params)
        return UNet.from_params(spec, params)


def local_epoch(client: ClientState, epoch: int = 0) -> Tuple[ClientState, float]:
    """Functional form of ClientState.local_epoch()."""
    loss = client.local_epoch(epoch)
    return client, loss


__all__ = ['ClientShare', 'ClientState', 'client_counts', 'partition_data', 'local_epoch']
