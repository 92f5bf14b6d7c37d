import logging
from collections import Counter
from typing import Sequence, Tuple

import numpy as np

from ..autograd import Tensor
from ..model.split import CutPayload
from ..utils.exception import ChannelError, ShapeError

log = logging.getLogger(__name__)

DIRECTIONS = {CutPayload.FORWARD: 0, CutPayload.BACKWARD: 1}


class ChannelConfig(object):
    """Erasure probability, enablement and the seed material of one transmission."""

    def __init__(self, p_loss: float = 0., enabled: bool = True, master_seed: int = 0, client_id: int = 0,
                 round: int = 0, direction: str = CutPayload.FORWARD, counter: int = 0):
        """Initializes a new config.

        Args:
            p_loss: Probability for a row to be erased, in [0, 1].
            enabled: If False, the channel is the identity.
            master_seed: Seed of the run.
            client_id: Client the transmission belongs to.
            round: Global round.
            direction: forward or backward.
            counter: Transmission counter within (client, round, direction).

        Raises:
            ChannelError: If p_loss is outside [0, 1] or direction unknown.
        """
        if not 0. <= p_loss <= 1.:
            raise ChannelError('Loss probability must be within [0, 1].', p_loss=p_loss)
        if direction not in DIRECTIONS:
            raise ChannelError('Unknown direction.', direction=direction)
        self.p_loss = float(p_loss)
        self.enabled = enabled
        self.master_seed = master_seed
        self.client_id = client_id
        self.round = round
        self.direction = direction
        self.counter = counter

    @property
    def seed_material(self) -> Tuple[int, int, int, int, int]:
        return self.master_seed, self.client_id, self.round, DIRECTIONS[self.direction], self.counter

    def at(self, counter: int) -> 'ChannelConfig':
        """Returns a copy with another transmission counter."""
        return ChannelConfig(self.p_loss, self.enabled, self.master_seed, self.client_id, self.round,
                             self.direction, counter)

    def __repr__(self):
        return 'ChannelConfig(p_loss=%g, enabled=%s, seed=%s)' % (self.p_loss, self.enabled, self.seed_material)


class LossMask(object):
    """Erased rows of one transmission, True per (n, c, h) row that was zeroed."""

    def __init__(self, mask: np.ndarray):
        self.mask = np.asarray(mask, dtype=bool)

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.mask.shape

    @property
    def sent(self) -> int:
        return int(self.mask.size)

    @property
    def lost(self) -> int:
        return int(self.mask.sum())

    def __repr__(self):
        return 'LossMask(shape=%s, lost=%d/%d)' % (self.shape, self.lost, self.sent)


def transmit(x, cfg: ChannelConfig) -> Tuple[np.ndarray, LossMask]:
    """Sends a tensor through an iid row-erasure channel.

    Every row of every channel of every sample is one packet. Lost packets arrive as zeros, all others
    unchanged.

    Args:
        x: Tensor or array, N x C x H x W.
        cfg: Channel config with full seed material.

    Returns:
        Received array and its loss mask.

    Raises:
        ShapeError: If x is not 4-dimensional.
    """
    data = x.data if isinstance(x, Tensor) else np.asarray(x)
    if data.ndim != 4:
        raise ShapeError('Only N x C x H x W tensors can be transmitted.', shape=data.shape)

    # disabled channel is identity
    if not cfg.enabled:
        return data, LossMask(np.zeros(data.shape[:3], dtype=bool))

    # draw mask from counter-based stream
    rng = np.random.default_rng(np.random.SeedSequence(list(cfg.seed_material)))
    mask = rng.random(data.shape[:3]) < cfg.p_loss

    # zero erased rows
    if not mask.any():
        return data, LossMask(mask)
    out = data.copy()
    out[mask] = 0.
    return out, LossMask(mask)


def transmit_payload(payload: CutPayload, cfg: ChannelConfig) -> CutPayload:
    """Sends all tensors of a payload through the channel.

    Each transmitted tensor uses its own counter, starting at cfg.counter. A skip marked as shared is not sent
    again but receives the main tensor as it arrived, mask included.

    Args:
        payload: Payload to send.
        cfg: Channel config; its counter is the first one used.

    Returns:
        Received payload with one mask per tensor.
    """
    received, masks = [], []
    counter = cfg.counter

    # main
    main, main_mask = transmit(payload.main, cfg.at(counter))
    counter += 1
    received.append(main)
    masks.append(main_mask)

    # skips
    for skip, shared in zip(payload.skips, payload.shared):
        if shared:
            received.append(main)
            masks.append(main_mask)
        else:
            out, mask = transmit(skip, cfg.at(counter))
            counter += 1
            received.append(out)
            masks.append(mask)

    return payload.replace(received, masks=masks)


def transmissions(payload: CutPayload) -> int:
    """Number of physical transmissions needed for a payload."""
    return 1 + sum(1 for s in payload.shared if not s)


def erasure_stats(masks: Sequence[LossMask]) -> Tuple[int, int, float]:
    """Counts packets over a list of masks.

    Args:
        masks: Loss masks.

    Returns:
        Tuple of packets sent, packets lost and observed loss rate (0 if nothing was sent).
    """
    sent = sum(m.sent for m in masks)
    lost = sum(m.lost for m in masks)
    return sent, lost, lost / sent if sent > 0 else 0.


class ErasureChannel(object):
    """Link of one client to the server, keeping transmission counters and statistics.

    The counter restarts at zero for each round and direction, so the seed material of a transmission only
    depends on the order of transmissions within that client's round.
    """

    def __init__(self, client_id: int, p_loss: float = 0., enabled: bool = True, master_seed: int = 0):
        """Initializes a new channel.

        Args:
            client_id: Client this link belongs to.
            p_loss: Loss probability.
            enabled: Whether this client's link is lossy at all.
            master_seed: Seed of the run.

        Raises:
            ChannelError: If p_loss is outside [0, 1].
        """
        if not 0. <= p_loss <= 1.:
            raise ChannelError('Loss probability must be within [0, 1].', p_loss=p_loss, client_id=client_id)
        self.client_id = client_id
        self.p_loss = p_loss
        self.enabled = enabled
        self.master_seed = master_seed
        self.round = 0
        self._counters = {d: 0 for d in DIRECTIONS}
        self.packets_sent = 0
        self.packets_lost = 0
        self.sent_by_tensor = Counter()

    def start_round(self, round: int):
        """Resets counters for a new global round."""
        self.round = round
        self._counters = {d: 0 for d in DIRECTIONS}

    def send(self, payload: CutPayload) -> CutPayload:
        """Transmits a payload in its direction and advances the counter.

        Args:
            payload: Payload to send.

        Returns:
            Received payload.
        """
        cfg = ChannelConfig(self.p_loss, self.enabled, self.master_seed, self.client_id, self.round,
                            payload.direction, self._counters[payload.direction])
        received = transmit_payload(payload, cfg)
        self._counters[payload.direction] += transmissions(payload)

        # bookkeeping, shared skips travelled with main; only lossy links count packets
        masks = []
        for name, shared, mask in zip(received.names, [False] + received.shared, received.masks):
            if not shared:
                self.sent_by_tensor[(name, payload.direction)] += 1
                masks.append(mask)
        if self.enabled:
            sent, lost, _ = erasure_stats(masks)
            self.packets_sent += sent
            self.packets_lost += lost
        return received

    def stats(self) -> Tuple[int, int, float]:
        """Packets sent, lost and observed rate since creation or last reset."""
        rate = self.packets_lost / self.packets_sent if self.packets_sent > 0 else 0.
        return self.packets_sent, self.packets_lost, rate

    def reset_stats(self):
        self.packets_sent = 0
        self.packets_lost = 0
        self.sent_by_tensor = Counter()

    def __repr__(self):
        return 'ErasureChannel(client=%d, p_loss=%g, enabled=%s)' % (self.client_id, self.p_loss, self.enabled)


__all__ = ['ChannelConfig', 'LossMask', 'transmit', 'transmit_payload', 'transmissions', 'erasure_stats',
           'ErasureChannel']
