import argparse
import logging

from ..data import generate, write_dataset

log = logging.getLogger(__name__)


def add_parser(subparsers):
    # create parser
    parser = subparsers.add_parser('gen-data', help='Generates a synthetic embryo-like segmentation dataset',
                                   formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    parser.add_argument('--out', type=str, help='Output directory', required=True)
    parser.add_argument('--n', type=int, help='Number of samples', default=470)
    parser.add_argument('--size', type=int, help='Width and height of images', default=64)
    parser.add_argument('--seed', type=int, help='Seed of dataset', default=0)

    # argparse wrapper for gen_data
    def run(args):
        gen_data(args.out, n=args.n, size=args.size, seed=args.seed)
    parser.set_defaults(func=run)


def gen_data(out: str, n: int = 470, size: int = 64, seed: int = 0):
    """Generates a dataset and writes it as PGM files.

    Args:
        out: Output directory.
        n: Number of samples.
        size: Width and height of images.
        seed: Seed of dataset.
    """
    log.info('Generating %d samples of %dx%d pixels with seed %d...', n, size, size, seed)
    write_dataset(generate(n, size=size, seed=seed), out)


__all__ = ['gen_data']
