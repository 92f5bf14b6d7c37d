from .sample import Sample, Dataset, split_test, CLASS_NAMES
from .synth import generate, generate_sample, MIN_SIZE
from .augment import augment, resize, hflip, vflip
from .pgm import decode_pgm, encode_pgm, read_pgm, write_pgm, read_dataset, write_dataset
