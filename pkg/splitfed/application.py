import logging
import multiprocessing
import os
import time
from typing import Dict, List, Tuple

import pandas as pd

from .aggregation import read_weights, write_weights
from .federation import ExperimentConfig, load_data, run_experiment, records_frame, weights_frame, sort_rows, \
    write_csv, read_csv, weights_filename, COLUMNS, WEIGHT_COLUMNS
from .federation.records import CELL
from .utils.exception import DataFormatError
from .utils.log import setup_log, shutdown_log

# datasets already loaded in this process, by data settings
_DATA_CACHE: Dict[tuple, tuple] = {}


def cell_key(cfg: ExperimentConfig) -> tuple:
    """Values identifying an experiment cell, in CSV column order."""
    return (cfg.split_label, cfg.aggregator_label,
            float(cfg['channel.p_loss']) if cfg.mode == 'splitfed' else 0.,
            int(cfg['channel.n_lossy_clients']) if cfg.mode == 'splitfed' else 0)


def _data(cfg: ExperimentConfig, log: logging.Logger) -> tuple:
    key = tuple(cfg.values['data'].items())
    if key not in _DATA_CACHE:
        _DATA_CACHE[key] = load_data(cfg, log=log)
    return _DATA_CACHE[key]


def run_cell(idx: int, total: int, cfg: ExperimentConfig, stream: bool = True) -> Tuple[pd.DataFrame, pd.DataFrame]:
    """Runs all runs of one cell.

    Args:
        idx: Number of cell, for logging.
        total: Total number of cells.
        cfg: Config of cell.
        stream: Whether the cell's log goes to stderr as well.

    Returns:
        Tuple of result rows and weight rows.
    """
    start_time = time.time()
    main_log = logging.getLogger('splitfed.main')
    main_log.info('(%i/%i) Starting on cell %s...', idx, total, cell_key(cfg))

    # cell logger
    log = setup_log('splitfed.cell', None, stream=stream, header=False)
    records = run_experiment(cfg, data=_data(cfg, log), log=log)

    # finished
    main_log.info('(%i/%i) Finished cell %s in %.1f seconds.', idx, total, cell_key(cfg), time.time() - start_time)
    shutdown_log('splitfed.cell')
    return records_frame(records), weights_frame(records)


def _concat(frames: List[pd.DataFrame], columns: List[str]) -> pd.DataFrame:
    frames = [f for f in frames if len(f) > 0]
    return pd.concat(frames, ignore_index=True) if frames else pd.DataFrame(columns=columns)


class Application(object):
    """Runs a list of experiment cells, sequentially or in a pool of processes, into one CSV."""

    def __init__(self, configs: List[ExperimentConfig], output: str, ncpus: int = None, resume: bool = False):
        """Initializes a new application.

        Args:
            configs: One config per cell.
            output: CSV to write results into; weights go to a side-car next to it.
            ncpus: Number of processes, or None to run sequentially.
            resume: Skip cells that already have all runs in an existing output file.
        """
        self._configs = configs
        self._output = output
        self._ncpus = ncpus
        self._resume = resume

    def _finished_cells(self, log: logging.Logger) -> Tuple[pd.DataFrame, pd.DataFrame, set]:
        """Loads existing results and returns them together with the keys of complete cells."""
        rows, weights = pd.DataFrame(columns=COLUMNS), pd.DataFrame(columns=WEIGHT_COLUMNS)
        if not self._resume or not os.path.exists(self._output):
            return rows, weights, set()

        # load and check
        log.info('Loading results from existing output file...')
        rows = read_csv(self._output)
        if list(rows.columns) != COLUMNS:
            log.error('Columns in existing output file do not match, please delete it.')
            raise DataFormatError('Columns in existing output file do not match.', path=self._output)
        if os.path.exists(weights_filename(self._output)):
            weights = read_weights(weights_filename(self._output))

        # complete cells have a final row for every run
        runs = {cell_key(c): c['training.runs'] for c in self._configs}
        finals = rows[rows['global_epoch'] == -1].groupby(CELL)['run_id'].nunique()
        done = set(k for k, n in finals.items() if runs.get(k) is not None and n >= runs[k])

        # drop rows of incomplete cells
        def keep(df):
            return df[[tuple(r) in done for r in df[CELL].itertuples(index=False)]]
        return keep(rows), keep(weights), done

    def run(self):
        """Run all cells."""
        log = logging.getLogger('splitfed.main')

        # filter finished cells
        rows, weights, done = self._finished_cells(log)
        configs = [c for c in self._configs if cell_key(c) not in done]
        log.info('Found a total of %d cells to process, %d already finished.', len(configs),
                 len(self._configs) - len(configs))

        # anything to do?
        results = []
        if len(configs) == 0:
            log.info('Nothing to do, going to bed...')
        elif self._ncpus is None:
            log.info('Running cells sequentially.')
            for i, cfg in enumerate(configs, 1):
                results.append(run_cell(i, len(configs), cfg))
        else:
            nprocs = min(self._ncpus, len(configs))
            log.info('Starting cells in parallel on %d CPUs...', nprocs)
            with multiprocessing.Pool(nprocs) as pool:
                jobs = [pool.apply_async(run_cell, (i, len(configs), cfg, False))
                        for i, cfg in enumerate(configs, 1)]
                results = [job.get() for job in jobs]

        # write everything sorted by cell
        all_rows = sort_rows(_concat([rows] + [r for r, _ in results], COLUMNS))
        all_weights = sort_rows(_concat([weights] + [w for _, w in results], WEIGHT_COLUMNS))
        write_csv(all_rows[COLUMNS], self._output)
        write_weights(all_weights[WEIGHT_COLUMNS], weights_filename(self._output))
        log.info('Wrote %d rows to %s.', len(all_rows), self._output)
        log.info('Finished.')


__all__ = ['Application', 'run_cell', 'cell_key']
