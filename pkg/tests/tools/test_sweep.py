import pytest

from splitfed.federation import ExperimentConfig
from splitfed.tools.sweep import parse_grid, cells
from splitfed.utils.exception import ConfigError

from ..federation.conftest import tiny_values


class TestGrid(object):
    def test_default_grid(self):
        grid = parse_grid('p_loss=0.1,0.3,0.5,0.7,0.9;n_lossy=0..5;split=shallow,deep')
        assert list(grid) == ['split', 'p_loss', 'n_lossy']
        assert grid['n_lossy'] == [0, 1, 2, 3, 4, 5]
        assert len(cells(ExperimentConfig(tiny_values()), grid)) == 60

    def test_cells(self):
        configs = cells(ExperimentConfig(tiny_values()), parse_grid('aggregator=naive,fed_ncl_v4;p_loss=0.2'))
        assert [(c['aggregator.kind'], c['channel.p_loss']) for c in configs] == [('naive', 0.2),
                                                                                   ('fed_ncl_v4', 0.2)]

    @pytest.mark.parametrize('grid', ['p_loss', 'q=1', 'n_lossy=a..b', 'p_loss=0.1;p_loss=0.2', 'p_loss=x'])
    def test_malformed(self, grid):
        with pytest.raises(ConfigError):
            parse_grid(grid)

    def test_invalid_cell(self):
        with pytest.raises(ConfigError):
            cells(ExperimentConfig(tiny_values()), parse_grid('n_lossy=0..6'))
