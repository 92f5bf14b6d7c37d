from .unet import UNetSpec, Stage, UNet, build_stages, init_params, run_stage
from .params import SegmentParams, concat_params, split_vector
from .split import Slot, CutPayload, SplitSpec, Segment, SegmentGradients, build_segments, forward_segment, \
    backward_segment, FRONT, SERVER, BACK
