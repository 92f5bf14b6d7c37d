from typing import Any, Dict, List

import pandas as pd

# columns of the experiment CSV, in order
COLUMNS = ['run_id', 'split', 'aggregator', 'p_loss', 'n_lossy_clients', 'global_epoch', 'mji', 'seed']

# columns of the weights side-car CSV, in order
WEIGHT_COLUMNS = ['run_id', 'split', 'aggregator', 'p_loss', 'n_lossy_clients', 'global_epoch', 'client_id',
                  'weight']

# columns identifying an experiment cell
CELL = ['split', 'aggregator', 'p_loss', 'n_lossy_clients']


class RunRecord(object):
    """Outcome of one run of an experiment."""

    def __init__(self, run_id: int, split: str, aggregator: str, p_loss: float, n_lossy_clients: int, seed: int,
                 lossy_clients: List[int] = None):
        """Initializes a new record.

        Args:
            run_id: Number of run.
            split: Split depth, or centralized.
            aggregator: Aggregator kind, or none.
            p_loss: Loss probability.
            n_lossy_clients: Number of lossy clients.
            seed: Seed of this run.
            lossy_clients: IDs of lossy clients.
        """
        self.run_id = run_id
        self.split = split
        self.aggregator = aggregator
        self.p_loss = p_loss
        self.n_lossy_clients = n_lossy_clients
        self.seed = seed
        self.lossy_clients = [] if lossy_clients is None else list(lossy_clients)
        self.mji: List[float] = []
        self.weights: List[Dict[str, Any]] = []
        self.packets_sent = 0
        self.packets_lost = 0
        self.transmissions: Dict[Any, int] = {}

    @property
    def final_mji(self) -> float:
        return self.mji[-1] if self.mji else float('nan')

    @property
    def observed_loss_rate(self) -> float:
        return self.packets_lost / self.packets_sent if self.packets_sent > 0 else 0.

    def cell(self) -> Dict[str, Any]:
        return {'split': self.split, 'aggregator': self.aggregator, 'p_loss': self.p_loss,
                'n_lossy_clients': self.n_lossy_clients}

    def add_weights(self, report: pd.DataFrame):
        """Appends one round's weights as created by weights_report()."""
        for row in report.to_dict('records'):
            row = {**self.cell(), 'run_id': self.run_id, **row}
            row['client_id'], row['weight'] = int(row['client_id']), float(row['weight'])
            self.weights.append(row)

    def rows(self) -> List[Dict[str, Any]]:
        """Rows for the experiment CSV: one per global epoch, plus a final one with global_epoch -1."""
        rows = []
        for epoch, mji in list(enumerate(self.mji, 1)) + [(-1, self.final_mji)]:
            rows.append(dict(run_id=self.run_id, **self.cell(), global_epoch=epoch, mji=float(mji),
                             seed=self.seed))
        return rows

    def __repr__(self):
        return 'RunRecord(run=%d, %s, final_mji=%.4f)' % (self.run_id, self.cell(), self.final_mji)


def records_frame(records: List[RunRecord]) -> pd.DataFrame:
    """Table of all rows of the given records, in the experiment CSV's column order."""
    return pd.DataFrame([r for rec in records for r in rec.rows()], columns=COLUMNS)


def weights_frame(records: List[RunRecord]) -> pd.DataFrame:
    """Table of all aggregation weights of the given records."""
    return pd.DataFrame([w for rec in records for w in rec.weights], columns=WEIGHT_COLUMNS)


def sort_rows(df: pd.DataFrame) -> pd.DataFrame:
    """Sorts rows by cell key, run and epoch, with the final row of each run last."""
    df = df.copy()
    df['_last'] = df['global_epoch'] == -1
    keys = [c for c in CELL + ['run_id', '_last', 'global_epoch', 'client_id'] if c in df.columns]
    return df.sort_values(keys, kind='mergesort').drop(columns='_last').reset_index(drop=True)


def write_csv(df: pd.DataFrame, filename: str, append: bool = False):
    """Writes rows to a CSV, with header only when creating the file."""
    df.to_csv(filename, index=False, mode='a' if append else 'w', header=not append)


def read_csv(filename: str) -> pd.DataFrame:
    return pd.read_csv(filename, float_precision='round_trip', keep_default_na=False, na_values=[''])


def weights_filename(csv: str) -> str:
    """Name of weights side-car for an experiment CSV, <stem>.weights.csv."""
    stem = csv[:-4] if csv.endswith('.csv') else csv
    return stem + '.weights.csv'


__all__ = ['COLUMNS', 'WEIGHT_COLUMNS', 'CELL', 'RunRecord', 'records_frame', 'weights_frame', 'sort_rows',
           'write_csv', 'read_csv', 'weights_filename']
