import argparse

from . import add_config_arguments, config_from_args
from ..application import Application
from ..federation import ExperimentConfig
from ..utils.log import open_log, log_config


def add_parser(subparsers):
    # create parser
    parser = subparsers.add_parser('train', help='Runs all runs of one experiment',
                                   formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    add_config_arguments(parser)

    # argparse wrapper for train
    def run(args):
        train(config_from_args(args))
    parser.set_defaults(func=run)


def train(cfg: ExperimentConfig):
    """Runs an experiment and writes its CSV.

    Args:
        cfg: Experiment config.
    """
    with open_log('splitfed.main', cfg['output.log'], mode='w') as log:
        log_config(log, cfg.to_dict())
        log.info('Training %s split with %s aggregation, p_loss=%g, %d lossy clients.', cfg.split_label,
                 cfg.aggregator_label, cfg['channel.p_loss'], cfg['channel.n_lossy_clients'])
        Application([cfg], cfg['output.csv']).run()


__all__ = ['train']
