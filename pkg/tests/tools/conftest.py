import itertools

import numpy as np
import pandas as pd
import pytest

from splitfed.federation import COLUMNS

AGGREGATORS = ['naive', 'fedavg', 'auto_fedavg', 'fed_ncl_v2', 'fed_ncl_v4']
P_LOSS = [0.1, 0.3, 0.5, 0.7, 0.9]


@pytest.fixture()
def results_csv(tmp_path):
    """Experiment CSV of a full grid with three runs per cell and made-up MJIs falling with p_loss."""
    rng = np.random.default_rng(0)
    rows = []
    for split, agg, p, n in itertools.product(['shallow', 'deep'], AGGREGATORS, P_LOSS, range(6)):
        for run in range(3):
            mji = 0.8 - 0.05 * n * p + (0.02 if split == 'deep' else 0.) + rng.normal(0, 0.01)
            for epoch in (1, -1):
                rows.append(dict(run_id=run, split=split, aggregator=agg, p_loss=p, n_lossy_clients=n,
                                 global_epoch=epoch, mji=mji, seed=run))
    filename = str(tmp_path / 'results.csv')
    pd.DataFrame(rows, columns=COLUMNS).to_csv(filename, index=False)
    yield filename
