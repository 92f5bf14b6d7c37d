from .erasure import ChannelConfig, LossMask, ErasureChannel, transmit, transmit_payload, transmissions, \
    erasure_stats
