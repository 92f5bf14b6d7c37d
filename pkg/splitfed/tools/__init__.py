import argparse

from ..federation import ExperimentConfig, load_config


def add_config_arguments(parser: argparse.ArgumentParser):
    """Adds the config file and the flags overriding values from it."""
    parser.add_argument('-c', '--config', type=str, help='YAML configuration file', required=True)
    parser.add_argument('-o', '--output', type=str, help='CSV to write results into (output.csv)')
    parser.add_argument('--seed', type=int, help='Master seed (training.seed)')
    parser.add_argument('--runs', type=int, help='Number of runs per cell (training.runs)')
    parser.add_argument('--split', type=str, choices=['shallow', 'deep'], help='Split depth (split.depth)')
    parser.add_argument('--aggregator', type=str, help='Aggregator kind (aggregator.kind)')
    parser.add_argument('--p-loss', type=float, help='Loss probability (channel.p_loss)')
    parser.add_argument('--n-lossy', type=int, help='Number of lossy clients (channel.n_lossy_clients)')
    parser.add_argument('--local-epochs', type=int, help='Local epochs (training.local_epochs)')
    parser.add_argument('--global-epochs', type=int, help='Global epochs (training.global_epochs)')
    parser.add_argument('--data', type=str, help='Dataset directory (data.path)')


# flags and the config keys they override
OVERRIDES = [('output', 'output__csv'), ('seed', 'training__seed'), ('runs', 'training__runs'),
             ('split', 'split__depth'), ('aggregator', 'aggregator__kind'), ('p_loss', 'channel__p_loss'),
             ('n_lossy', 'channel__n_lossy_clients'), ('local_epochs', 'training__local_epochs'),
             ('global_epochs', 'training__global_epochs'), ('data', 'data__path')]


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    """Loads the config file and applies all given flags; flags win.

    Args:
        args: Parsed arguments.

    Returns:
        Validated config.
    """
    cfg = load_config(args.config)
    overrides = {key: getattr(args, flag) for flag, key in OVERRIDES if getattr(args, flag, None) is not None}
    return cfg.replace(**overrides) if overrides else cfg
