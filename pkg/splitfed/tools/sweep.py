import argparse
import itertools
from collections import OrderedDict
from typing import Any, Dict, List

from . import add_config_arguments, config_from_args
from ..application import Application
from ..federation import ExperimentConfig
from ..utils.exception import ConfigError
from ..utils.log import open_log, log_config

# grid dimensions: config key and value type
DIMENSIONS = OrderedDict([('split', ('split__depth', str)), ('aggregator', ('aggregator__kind', str)),
                          ('p_loss', ('channel__p_loss', float)), ('n_lossy', ('channel__n_lossy_clients', int))])


def add_parser(subparsers):
    # create parser
    parser = subparsers.add_parser('sweep', help='Runs a grid of experiments into one CSV',
                                   formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    add_config_arguments(parser)
    parser.add_argument('--grid', type=str, default='p_loss=0.1,0.3,0.5,0.7,0.9;n_lossy=0..5;split=shallow,deep',
                        help='Grid as dim=values;... with dims split, aggregator, p_loss, n_lossy; '
                             'integer ranges as a..b')
    parser.add_argument('--jobs', type=int, help='Run cells in parallel in the given number of processes')
    parser.add_argument('-r', '--resume', action='store_true', help='Skip cells finished in existing output')

    # argparse wrapper for sweep
    def run(args):
        sweep(config_from_args(args), parse_grid(args.grid), jobs=args.jobs, resume=args.resume)
    parser.set_defaults(func=run)


def _parse_value(dim: str, text: str, typ: type) -> List[Any]:
    try:
        if typ is int and '..' in text:
            start, end = text.split('..')
            return list(range(int(start), int(end) + 1))
        return [typ(text)]
    except ValueError:
        raise ConfigError('Malformed grid value.', key='grid.%s' % dim, value=text)


def parse_grid(grid: str) -> Dict[str, List[Any]]:
    """Parses a grid string like "p_loss=0.1,0.5;n_lossy=0..5;split=shallow,deep".

    Args:
        grid: Grid string; a dimension without values is taken from the config.

    Returns:
        Values by dimension, in order of DIMENSIONS.

    Raises:
        ConfigError: If the string is malformed.
    """
    values = {}
    for part in [p.strip() for p in grid.split(';') if p.strip()]:
        if '=' not in part:
            raise ConfigError('Malformed grid dimension, expected dim=values.', key='grid', value=part)
        dim, _, text = [s.strip() for s in part.partition('=')]
        if dim not in DIMENSIONS:
            raise ConfigError('Unknown grid dimension.', key='grid', value=dim)
        if dim in values:
            raise ConfigError('Grid dimension given twice.', key='grid', value=dim)
        values[dim] = [v for t in text.split(',') if t.strip() for v in _parse_value(dim, t.strip(),
                                                                                      DIMENSIONS[dim][1])]
    return OrderedDict((d, values[d]) for d in DIMENSIONS if values.get(d))


def cells(cfg: ExperimentConfig, grid: Dict[str, List[Any]]) -> List[ExperimentConfig]:
    """Cartesian product of grid values, each applied to the base config."""
    dims = list(grid.keys())
    return [cfg.replace(**{DIMENSIONS[d][0]: v for d, v in zip(dims, combo)})
            for combo in itertools.product(*[grid[d] for d in dims])]


def sweep(cfg: ExperimentConfig, grid: Dict[str, List[Any]], jobs: int = None, resume: bool = False):
    """Runs all cells of a grid.

    Args:
        cfg: Base config.
        grid: Values by dimension.
        jobs: Number of processes, sequential if None.
        resume: Skip finished cells in an existing output file.
    """
    configs = cells(cfg, grid)
    with open_log('splitfed.main', cfg['output.log'], mode='a' if resume else 'w') as log:
        log_config(log, cfg.to_dict())
        dims = ', '.join('%s (%d)' % (d, len(v)) for d, v in grid.items())
        log.info('Sweeping %d cells over %s.', len(configs), dims)
        Application(configs, cfg['output.csv'], ncpus=jobs, resume=resume).run()


__all__ = ['parse_grid', 'cells', 'sweep', 'DIMENSIONS']
