import argparse
import logging
from typing import List

import numpy as np
import pandas as pd

from ..federation import read_csv
from ..stats import ALPHA, pairwise_compare
from ..utils.exception import StatsError

log = logging.getLogger(__name__)

REQUIRED_COLUMNS = ['run_id', 'split', 'aggregator', 'p_loss', 'n_lossy_clients', 'global_epoch', 'mji']


def add_parser(subparsers):
    # create parser
    parser = subparsers.add_parser('stats', help='Runs pairwise t-tests on the final MJIs of an experiment CSV',
                                   formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    parser.add_argument('--csv', type=str, help='Experiment CSV', required=True)
    parser.add_argument('--test', type=str, choices=['deep-vs-shallow', 'agg-pairs'], required=True,
                        help='Family of tests')
    parser.add_argument('--tails', type=str, nargs='+', choices=['one', 'two'],
                        help='Tails of tests, defaults to one for deep-vs-shallow and two for agg-pairs')
    parser.add_argument('--paired', action='store_true', help='Use paired t-tests on runs with equal run_id')
    parser.add_argument('--split', type=str, choices=['shallow', 'deep'], help='Only compare cells of this split')
    parser.add_argument('--lossy-only', action='store_true', help='Only compare cells with lossy clients')
    parser.add_argument('--alpha', type=float, default=ALPHA, help='Significance level')
    parser.add_argument('-o', '--output', type=str, help='CSV to write test results into',
                        default='splitfed.stats.csv')

    # argparse wrapper for stats
    def run(args):
        tails = args.tails if args.tails else ['one' if args.test == 'deep-vs-shallow' else 'two']
        results, summary = stats(load_final(args.csv), args.test, tails=tails, paired=args.paired,
                                 split=args.split, lossy_only=args.lossy_only, alpha=args.alpha)
        results.to_csv(args.output, index=False)
        summary.to_csv(summary_filename(args.output), index=False)
        report(results, summary, alpha=args.alpha)
    parser.set_defaults(func=run)


def summary_filename(output: str) -> str:
    stem = output[:-4] if output.endswith('.csv') else output
    return stem + '.summary.csv'


def load_final(filename: str) -> pd.DataFrame:
    """Reads an experiment CSV and returns the final row of every run.

    Raises:
        StatsError: If the file is empty or columns are missing.
    """
    try:
        df = read_csv(filename)
    except pd.errors.EmptyDataError:
        raise StatsError('Experiment CSV is empty.', path=filename)
    missing = [c for c in REQUIRED_COLUMNS if c not in df.columns]
    if missing:
        raise StatsError('Experiment CSV misses required columns.', path=filename, missing=missing)
    final = df[df['global_epoch'] == -1]
    if len(final) == 0:
        raise StatsError('Experiment CSV contains no finished runs.', path=filename)
    return final


def _runs(df: pd.DataFrame, cell: dict) -> List[float]:
    """Final MJIs of a cell, ordered by run_id."""
    mask = np.ones(len(df), dtype=bool)
    for key, value in cell.items():
        mask &= (df[key] == value).values
    runs = df[mask].sort_values('run_id')
    if len(runs) < 2:
        raise StatsError('Cell has fewer than two runs.', **cell, runs=len(runs))
    return runs['mji'].tolist()


def stats(final: pd.DataFrame, test: str, tails: List[str] = None, paired: bool = False, split: str = None,
          lossy_only: bool = False, alpha: float = ALPHA):
    """Runs a family of t-tests on final MJIs.

    deep-vs-shallow compares deep against shallow split (H1 for one-tailed tests: deep > shallow) in every
    (aggregator, p_loss, n_lossy_clients) cell with lossy clients. agg-pairs compares all pairs of aggregators
    in every (split, p_loss, n_lossy_clients) cell.

    Args:
        final: Final rows of an experiment CSV.
        test: deep-vs-shallow or agg-pairs.
        tails: Tails of tests, each test is done once per value.
        paired: Use paired t-tests.
        split: Restrict to cells of this split.
        lossy_only: Restrict to cells with lossy clients.
        alpha: Significance level.

    Returns:
        Tuple of test results and degradation summary.

    Raises:
        StatsError: If a cell has fewer than two runs or a counterpart is missing.
    """
    tails = ['one'] if tails is None else tails
    if split is not None:
        final = final[final['split'] == split]
    if lossy_only or test == 'deep-vs-shallow':
        final = final[final['n_lossy_clients'] > 0]

    tables = []
    if test == 'deep-vs-shallow':
        for (agg, p_loss, n_lossy), _ in final.groupby(['aggregator', 'p_loss', 'n_lossy_clients']):
            cell = {'aggregator': agg, 'p_loss': p_loss, 'n_lossy_clients': n_lossy}
            groups = {s: _runs(final, dict(cell, split=s)) for s in ['deep', 'shallow']}
            for t in tails:
                res = pairwise_compare(groups, [('deep', 'shallow')], tails=t, direction='greater',
                                       paired=paired, alpha=alpha)
                tables.append(_with_cell(res, cell))

    elif test == 'agg-pairs':
        for (s, p_loss, n_lossy), rows in final.groupby(['split', 'p_loss', 'n_lossy_clients']):
            cell = {'split': s, 'p_loss': p_loss, 'n_lossy_clients': n_lossy}
            aggs = sorted(rows['aggregator'].unique())
            groups = {a: _runs(final, dict(cell, aggregator=a)) for a in aggs}
            for t in tails:
                res = pairwise_compare(groups, tails=t, direction='greater', paired=paired, alpha=alpha)
                tables.append(_with_cell(res, cell))

    else:
        raise StatsError('Unknown test family.', test=test)

    results = pd.concat(tables, ignore_index=True) if tables else pd.DataFrame()
    return results, degradation(final)


def _with_cell(res: pd.DataFrame, cell: dict) -> pd.DataFrame:
    for i, (key, value) in enumerate(cell.items()):
        res.insert(i, key, value)
    return res


def degradation(final: pd.DataFrame) -> pd.DataFrame:
    """Mean final MJI per split and p_loss at the largest number of lossy clients, with the gap of each p_loss
    to the smallest one."""
    if len(final) == 0:
        return pd.DataFrame(columns=['split', 'n_lossy_clients', 'p_loss', 'mean_mji', 'runs', 'gap'])
    rows = final[final['n_lossy_clients'] == final['n_lossy_clients'].max()]
    summary = rows.groupby(['split', 'n_lossy_clients', 'p_loss'])['mji'].agg(['mean', 'count']).reset_index()
    summary = summary.rename(columns={'mean': 'mean_mji', 'count': 'runs'})
    summary['gap'] = summary.groupby('split')['mean_mji'].transform('first') - summary['mean_mji']
    return summary


def report(results: pd.DataFrame, summary: pd.DataFrame, alpha: float = ALPHA):
    """Prints a significance and degradation summary."""
    if len(results) > 0:
        for tails, rows in results.groupby('tails'):
            print('%s-tailed: %d of %d tests significant at alpha=%g.' % (tails, rows['significant'].sum(),
                                                                        len(rows), alpha))
    for split, rows in summary.groupby('split'):
        line = ', '.join('p_loss=%g: %.4f' % (p, m) for p, m in zip(rows['p_loss'], rows['mean_mji']))
        print('%s (n_lossy=%d): %s' % (split, rows['n_lossy_clients'].iloc[0], line))
        by_p = dict(zip(rows['p_loss'], rows['mean_mji']))
        if 0.1 in by_p and 0.5 in by_p:
            print('%s: MJI gap between p_loss=0.1 and 0.5 is %.4f.' % (split, by_p[0.1] - by_p[0.5]))


__all__ = ['stats', 'load_final', 'degradation', 'report']
