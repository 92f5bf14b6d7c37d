from .tensor import Tensor, Tape, Gradients
from .ops import conv2d, pointwise_conv, relu, maxpool2, upsample2, concat_channels, reduce_sum
from .loss import softmax_channels, soft_dice_loss, one_hot
from .optim import AdamState, adam_step
from .init import he_init
