import itertools
from typing import Dict, Hashable, Sequence, Tuple

import pandas as pd

from .ttest import ALPHA, welch_t_test


def pairwise_compare(groups: Dict[Hashable, Sequence[float]], pairs: Sequence[Tuple[Hashable, Hashable]] = None,
                     tails: str = 'two', direction: str = None, paired: bool = False,
                     alpha: float = ALPHA) -> pd.DataFrame:
    """Runs a t-test for each pair of groups.

    Args:
        groups: Run results (e.g. final MJIs) by group label.
        pairs: Pairs of labels to compare; all unordered pairs in order of groups if None.
        tails: one or two.
        direction: For one-tailed tests, greater (H1: first > second) or less.
        paired: Use paired t-tests.
        alpha: Significance level.

    Returns:
        Table with one row per pair: labels, sample sizes and means, t, df, p, tails, direction, paired and
        whether p < alpha.
    """
    if pairs is None:
        pairs = list(itertools.combinations(groups.keys(), 2))

    rows = []
    for first, second in pairs:
        a, b = list(groups[first]), list(groups[second])
        res = welch_t_test(a, b, tails=tails, direction=direction, paired=paired)
        row = {'a': first, 'b': second, 'n_a': len(a), 'n_b': len(b),
               'mean_a': sum(a) / len(a), 'mean_b': sum(b) / len(b)}
        row.update(res.to_dict())
        row['significant'] = res.significant(alpha)
        rows.append(row)

    return pd.DataFrame(rows, columns=['a', 'b', 'n_a', 'n_b', 'mean_a', 'mean_b', 't', 'df', 'p', 'tails',
                                       'direction', 'paired', 'significant'])


__all__ = ['pairwise_compare']
