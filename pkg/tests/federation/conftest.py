import pytest

from splitfed.data import generate, split_test
from splitfed.federation import ExperimentConfig


def tiny_values(**overrides) -> dict:
    """Settings of a small but complete experiment."""
    values = {
        'model': {'levels': 2, 'base_channels': 2},
        'split': {'depth': 'shallow'},
        'aggregator': {'kind': 'fedavg'},
        'channel': {'p_loss': 0.0, 'n_lossy_clients': 0},
        'training': {'local_epochs': 1, 'global_epochs': 2, 'batch_size': 4, 'lr': 1e-3, 'runs': 2, 'seed': 1},
        'data': {'n': 30, 'size': 16, 'image_size': 16, 'n_test': 5, 'seed': 0},
    }
    for name, value in overrides.items():
        section, key = name.split('__')
        values.setdefault(section, {})[key] = value
    return values


@pytest.fixture()
def tiny_config():
    yield ExperimentConfig(tiny_values())


@pytest.fixture()
def tiny_data():
    yield split_test(generate(30, size=16, seed=0), 5, seed=0)
