from typing import Sequence

import numpy as np
from scipy.special import betainc

from ..utils.exception import StatsError

# significance level used for all decisions
ALPHA = 0.05


class TTestResult(object):
    """Outcome of one t-test."""

    def __init__(self, t: float, df: float, p: float, tails: str = 'two', direction: str = None,
                 paired: bool = False):
        """Initializes a new result.

        Args:
            t: Test statistic.
            df: Degrees of freedom.
            p: p-value.
            tails: one or two.
            direction: For one-tailed tests, greater (H1: first > second) or less.
            paired: Whether the paired test was used.
        """
        self.t = t
        self.df = df
        self.p = p
        self.tails = tails
        self.direction = direction
        self.paired = paired

    def significant(self, alpha: float = ALPHA) -> bool:
        return self.p < alpha

    def to_dict(self) -> dict:
        return {'t': self.t, 'df': self.df, 'p': self.p, 'tails': self.tails,
                'direction': self.direction if self.direction is not None else '', 'paired': self.paired}

    def __repr__(self):
        return 'TTestResult(t=%.4f, df=%.3f, p=%.4g, tails=%s, direction=%s)' % (
            self.t, self.df, self.p, self.tails, self.direction)


def t_sf(t: float, df: float) -> float:
    """Survival function P(T > t) of Student's t-distribution via the regularized incomplete beta function."""
    tail = 0.5 * betainc(df / 2., 0.5, df / (df + t * t))
    return float(tail if t >= 0 else 1. - tail)


def _p_value(t: float, df: float, tails: str, direction: str) -> float:
    if tails == 'two':
        return float(min(1., betainc(df / 2., 0.5, df / (df + t * t))))
    if tails != 'one':
        raise StatsError('Tails must be one or two.', tails=tails)
    if direction == 'greater':
        return t_sf(t, df)
    if direction == 'less':
        return t_sf(-t, df)
    raise StatsError('One-tailed test needs direction greater or less.', direction=direction)


def welch_t_test(a: Sequence[float], b: Sequence[float], tails: str = 'two', direction: str = None,
                 paired: bool = False) -> TTestResult:
    """Compares the means of two samples.

    By default, the unequal-variance (Welch) test is used, with Welch-Satterthwaite degrees of freedom. With
    paired=True, samples are compared run by run instead.

    Args:
        a: First sample, at least 2 values.
        b: Second sample, at least 2 values.
        tails: one or two.
        direction: For one-tailed tests, greater (H1: mean(a) > mean(b)) or less.
        paired: Use the paired t-test on a - b; requires equal lengths.

    Returns:
        Test result.

    Raises:
        StatsError: If samples are too small or have no variance.
    """
    a, b = np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64)
    if len(a) < 2 or len(b) < 2:
        raise StatsError('Need at least two values per sample.', n_a=len(a), n_b=len(b))
    if tails == 'one' and direction is None:
        direction = 'greater'

    if paired:
        # test differences against zero
        if len(a) != len(b):
            raise StatsError('Paired test needs equally long samples.', n_a=len(a), n_b=len(b))
        d = a - b
        var = d.var(ddof=1)
        if var <= 0:
            raise StatsError('Differences have zero variance.', n=len(d))
        t = d.mean() / np.sqrt(var / len(d))
        df = len(d) - 1.

    else:
        # Welch
        va, vb = a.var(ddof=1) / len(a), b.var(ddof=1) / len(b)
        if va + vb <= 0:
            raise StatsError('Both samples have zero variance.', n_a=len(a), n_b=len(b))
        t = (a.mean() - b.mean()) / np.sqrt(va + vb)
        df = (va + vb) ** 2 / (va ** 2 / (len(a) - 1) + vb ** 2 / (len(b) - 1))

    return TTestResult(float(t), float(df), _p_value(float(t), float(df), tails, direction), tails=tails,
                       direction=direction if tails == 'one' else None, paired=paired)


__all__ = ['ALPHA', 'TTestResult', 'welch_t_test', 't_sf']
