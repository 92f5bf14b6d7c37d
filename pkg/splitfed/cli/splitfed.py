import argparse
import importlib
import logging
import os
import pkgutil
import sys

import splitfed.tools
from splitfed.utils.exception import ConfigError, splitfedException


def main(argv=None) -> int:
    # init logging
    logging.basicConfig(format='[%(asctime)s] %(message)s', level=logging.INFO)
    logging.captureWarnings(True)

    # init parser
    parser = argparse.ArgumentParser(description='splitfed: split federated learning over lossy links',
                                     formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    parser.add_argument('-v', '--verbose', action='store_true', help='Log debug messages')
    subparsers = parser.add_subparsers(help='sub-command help')

    # list modules in splitfed.tools
    pkgpath = os.path.dirname(splitfed.tools.__file__)
    modules = [name for _, name, _ in pkgutil.iter_modules([pkgpath])]

    # loop modules
    for m in modules:
        # import module
        mod = importlib.import_module('splitfed.tools.' + m)
        # add subparser
        try:
            mod.add_parser(subparsers)
        except AttributeError:
            continue

    # parse arguments, usage errors exit with 2
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code
    if args.verbose:
        logging.getLogger().setLevel(logging.DEBUG)

    # and call method
    if not hasattr(args, 'func'):
        parser.print_help()
        return 2
    try:
        args.func(args)
    except ConfigError as e:
        logging.error('Invalid configuration: %s', e)
        return 2
    except splitfedException as e:
        logging.error('%s: %s', e.__class__.__name__, e)
        return 1
    except Exception:
        logging.exception('Something went wrong.')
        return 1
    return 0


if __name__ == '__main__':
    sys.exit(main())
