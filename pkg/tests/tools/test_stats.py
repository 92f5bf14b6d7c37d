import pandas as pd
import pytest

from splitfed.tools.stats import stats, load_final, degradation
from splitfed.utils.exception import StatsError


class TestStats(object):
    def test_deep_vs_shallow(self, results_csv):
        """One test per aggregator, loss probability and number of lossy clients."""
        results, _ = stats(load_final(results_csv), 'deep-vs-shallow', tails=['one'])
        assert len(results) == 125
        assert set(results['direction']) == {'greater'}
        assert (results['n_lossy_clients'] > 0).all()

    def test_aggregator_pairs(self, results_csv):
        """All aggregator pairs of a single cell with both tails."""
        final = load_final(results_csv)
        final = final[(final['split'] == 'deep') & (final['p_loss'] == 0.5) & (final['n_lossy_clients'] == 3)]
        results, _ = stats(final, 'agg-pairs', tails=['one', 'two'])
        assert len(results) == 20

    def test_aggregator_pairs_all_cells(self, results_csv):
        results, _ = stats(load_final(results_csv), 'agg-pairs', tails=['two'], split='shallow', lossy_only=True)
        assert len(results) == 25 * 10

    def test_paired(self, results_csv):
        results, _ = stats(load_final(results_csv), 'deep-vs-shallow', tails=['two'], paired=True)
        assert results['paired'].all()
        assert (results['df'] == 2.).all()

    def test_degradation(self, results_csv):
        """Gap to the smallest loss probability grows with p_loss at five lossy clients."""
        summary = degradation(load_final(results_csv))
        assert set(summary['n_lossy_clients']) == {5}
        for _, rows in summary.groupby('split'):
            assert rows['gap'].iloc[0] == 0.
            assert rows['gap'].is_monotonic_increasing

    def test_too_few_runs(self, results_csv):
        final = load_final(results_csv)
        with pytest.raises(StatsError):
            stats(final[final['run_id'] == 0], 'deep-vs-shallow')

    def test_bad_files(self, tmp_path):
        empty = tmp_path / 'empty.csv'
        empty.write_text('')
        with pytest.raises(StatsError):
            load_final(str(empty))
        partial = tmp_path / 'partial.csv'
        pd.DataFrame({'run_id': [0], 'mji': [0.5]}).to_csv(str(partial), index=False)
        with pytest.raises(StatsError) as exc:
            load_final(str(partial))
        assert 'split' in exc.value.missing
