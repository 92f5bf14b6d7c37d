import numpy as np
import pytest

from splitfed.aggregation import AggregatorSpec
from splitfed.data import Dataset
from splitfed.federation import ExperimentConfig, Experiment, run_experiment, global_round, evaluate, \
    partition_data, records_frame, weights_frame
from splitfed.model import CutPayload, UNet, UNetSpec
from splitfed.utils.exception import StatsError

from .conftest import tiny_values
from .test_client import make_client, PROPORTIONS


class TestEvaluate(object):
    def test_empty(self):
        with pytest.raises(StatsError):
            evaluate(UNet(UNetSpec(base_channels=2), np.random.default_rng(0)), Dataset())

    def test_range(self, tiny_data):
        _, test = tiny_data
        mji = evaluate(UNet(UNetSpec(base_channels=2), np.random.default_rng(0)), test)
        assert 0. <= mji <= 1.


class TestGlobalRound(object):
    def test_single_client(self, tiny_data):
        """With one client, the global model is that client's model."""
        share = partition_data(tiny_data[0], [1.], seed=0)[0]
        client = make_client(share)
        client.local_epoch()
        before = [p.flatten() for p in client.client_params] + [client.server.parameters.flatten()]
        g_client, g_server, w = global_round([client], AggregatorSpec('fedavg').create(), 0)
        assert np.array_equal(w, [1.])
        assert np.array_equal(g_client, np.concatenate(before[:2]))
        assert np.array_equal(g_server, before[2])

    def test_identical_clients(self, tiny_data):
        """Identical clients aggregate to themselves."""
        shares = partition_data(tiny_data[0], [0.5, 0.5], seed=0)
        clients = [make_client(shares[0]), make_client(shares[0])]
        clients[1].share = type(shares[0])(1, shares[0].train, shares[0].val)
        for c in clients:
            c.local_epoch()
        before = np.concatenate([p.flatten() for p in clients[0].client_params])
        g_client, _, w = global_round(clients, AggregatorSpec('naive').create(), 0)
        assert np.allclose(g_client, before, rtol=0, atol=1e-7)
        assert np.allclose(w, 0.5)

    def test_broadcast(self, tiny_data):
        """After a round, all clients hold the same parameters."""
        shares = partition_data(tiny_data[0], PROPORTIONS, seed=0)
        clients = [make_client(s, seed=s.client_id) for s in shares]
        for c in clients:
            c.local_epoch()
        global_round(clients, AggregatorSpec('fedavg').create(), 0)
        for c in clients[1:]:
            for a, b in zip(clients[0].segments, c.segments):
                assert np.array_equal(a.parameters.flatten(), b.parameters.flatten())


class TestExperiment(object):
    def test_records(self, tiny_config, tiny_data):
        records = run_experiment(tiny_config, data=tiny_data)
        assert len(records) == 2
        for rec in records:
            assert len(rec.mji) == 2
            assert all(0. <= m <= 1. for m in rec.mji)
            assert rec.final_mji == rec.mji[-1]
            assert len(rec.weights) == 2 * 5
        df = records_frame(records)
        assert len(df) == 2 * 3
        final = df[df['global_epoch'] == -1]
        assert final['mji'].mean() == pytest.approx(np.mean([r.final_mji for r in records]), abs=1e-9)

    def test_deterministic(self, tiny_data):
        """Same config, same results, weights included."""
        cfg = ExperimentConfig(tiny_values(channel__p_loss=0.3, channel__n_lossy_clients=2,
                                           aggregator__kind='fed_ncl_v2', training__runs=1))
        a, b = run_experiment(cfg, data=tiny_data), run_experiment(cfg, data=tiny_data)
        assert a[0].mji == b[0].mji
        assert weights_frame(a).equals(weights_frame(b))
        assert a[0].packets_lost == b[0].packets_lost > 0

    def test_no_lossy_clients_is_lossless(self, tiny_data):
        """Without lossy clients, the loss probability has no effect."""
        lossy = ExperimentConfig(tiny_values(channel__p_loss=0.5, channel__n_lossy_clients=0, training__runs=1))
        clean = ExperimentConfig(tiny_values(channel__p_loss=0.0, channel__n_lossy_clients=5, training__runs=1))
        a, b = run_experiment(lossy, data=tiny_data), run_experiment(clean, data=tiny_data)
        assert a[0].mji == b[0].mji
        assert a[0].packets_sent == 0
        assert b[0].packets_lost == 0

    def test_lossy_clients(self, tiny_data):
        cfg = ExperimentConfig(tiny_values(channel__n_lossy_clients=5))
        exp = Experiment(cfg, *tiny_data)
        assert exp.lossy_clients(exp.run_seed(0)) == [0, 1, 2, 3, 4]
        cfg = ExperimentConfig(tiny_values(channel__n_lossy_clients=2))
        exp = Experiment(cfg, *tiny_data)
        assert len(exp.lossy_clients(exp.run_seed(0))) == 2
        assert exp.run_seed(0) != exp.run_seed(1)

    def test_deep_split_transmissions(self, tiny_data):
        cfg = ExperimentConfig(tiny_values(split__depth='deep', channel__p_loss=0.2, channel__n_lossy_clients=5,
                                           training__runs=1, training__global_epochs=1))
        rec = run_experiment(cfg, data=tiny_data)[0]
        assert not [k for k in rec.transmissions if k[0] == 'e1']
        assert 0.1 < rec.observed_loss_rate < 0.3

    def test_shallow_split_transmissions(self, tiny_data):
        """Shallow split sends the first skip connection, carried by e1 forward and as its own gradient back."""
        cfg = ExperimentConfig(tiny_values(split__depth='shallow', channel__p_loss=0.2, channel__n_lossy_clients=5,
                                           training__runs=1, training__global_epochs=1))
        rec = run_experiment(cfg, data=tiny_data)[0]
        forward = rec.transmissions[('e1', CutPayload.FORWARD)]
        assert forward > 0
        assert rec.transmissions[('e1', CutPayload.BACKWARD)] == 2 * forward
        assert not [k for k in rec.transmissions if k[0] == 'e2']

    def test_auto_fedavg(self, tiny_data):
        cfg = ExperimentConfig(tiny_values(aggregator__kind='auto_fedavg', aggregator__iterations=1,
                                           training__runs=1, training__global_epochs=1))
        rec = run_experiment(cfg, data=tiny_data)[0]
        weights = [w['weight'] for w in rec.weights]
        assert sum(weights) == pytest.approx(1.)

    def test_centralized(self, tiny_data):
        values = tiny_values(training__mode='centralized', training__runs=1)
        del values['split'], values['aggregator']
        rec = run_experiment(ExperimentConfig(values), data=tiny_data)[0]
        assert rec.split == 'centralized'
        assert rec.aggregator == 'none'
        assert rec.p_loss == 0. and rec.n_lossy_clients == 0
        assert len(rec.mji) == 2
