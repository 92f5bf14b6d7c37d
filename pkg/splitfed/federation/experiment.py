import logging
import time
from typing import Callable, List, Sequence, Tuple

import numpy as np

from .client import ClientShare, ClientState, partition_data
from .config import ExperimentConfig
from .records import RunRecord
from ..aggregation import Aggregator, ClientReport, combine, weights_report
from ..autograd import AdamState, Tape, adam_step, one_hot, soft_dice_loss
from ..channel import ErasureChannel
from ..data import Dataset, augment, generate, read_dataset, resize, split_test
from ..model import UNet, UNetSpec, build_segments, concat_params, split_vector
from ..object import splitfedObject
from ..stats import mean_ji_of_masks
from ..utils.exception import StatsError, TrainingError


def load_data(cfg: ExperimentConfig, log: logging.Logger = None) -> Tuple[Dataset, Dataset]:
    """Reads or generates the dataset, resizes it to the training size and holds out the test set.

    Args:
        cfg: Experiment config.
        log: Logger to use.

    Returns:
        Tuple of training pool and test set.
    """
    log = logging.getLogger('splitfed.main') if log is None else log
    if cfg['data.path'] is not None:
        log.info('Reading dataset from %s...', cfg['data.path'])
        dataset = read_dataset(cfg['data.path'])
    else:
        log.info('Generating %d synthetic samples of %dx%d pixels...', cfg['data.n'], cfg['data.size'],
                 cfg['data.size'])
        dataset = generate(cfg['data.n'], size=cfg['data.size'], seed=cfg['data.seed'])
    dataset = Dataset([resize(s, cfg['data.image_size']) for s in dataset])
    return split_test(dataset, cfg['data.n_test'], cfg['data.seed'])


def evaluate(model: UNet, dataset: Dataset, batch_size: int = 16) -> float:
    """MJI of a model on a dataset, without channel and without changing the model.

    Args:
        model: Model to evaluate.
        dataset: Evaluation data.
        batch_size: Images per forward pass.

    Returns:
        Mean Jaccard index without background.

    Raises:
        StatsError: If dataset is empty.
    """
    if len(dataset) == 0:
        raise StatsError('Evaluation set is empty.')
    x, y = dataset.arrays()
    return mean_ji_of_masks(model.predict(x, batch_size=batch_size), y, model.spec.num_classes)


def dice_loss(model: UNet, dataset: Dataset, batch_size: int = 16) -> float:
    """Mean Soft Dice loss of a model over a dataset, weighted by batch size."""
    if len(dataset) == 0:
        return 0.
    x, y = dataset.arrays()
    total = 0.
    with Tape.detached():
        for i in range(0, len(x), batch_size):
            probs = model.forward(x[i:i + batch_size])
            loss = soft_dice_loss(probs, one_hot(y[i:i + batch_size], model.spec.num_classes, dtype=probs.dtype))
            total += loss.item() * len(x[i:i + batch_size])
    return total / len(x)


def global_round(clients: Sequence[ClientState], aggregator: Aggregator, round_idx: int, context: dict = None) \
        -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Aggregates client and server parameters of all clients and broadcasts the result.

    Client segments are aggregated by the given strategy; the clients' server copies are combined with the same
    weights.

    Args:
        clients: All clients, after local training.
        aggregator: Aggregation strategy.
        round_idx: Global round, for logging.
        context: Context for the aggregator.

    Returns:
        Tuple of global client vector, global server vector and weights in order of clients.
    """

    # aggregate client parts
    reports = [ClientReport(c.client_id, concat_params(c.client_params), len(c.share.train), c.train_loss,
                            c.val_loss) for c in clients]
    global_client, weights = aggregator(reports, context)

    # server copies, same weights and order
    order = sorted(range(len(clients)), key=lambda i: clients[i].client_id)
    global_server = combine([clients[i].server.parameters.flatten() for i in order], weights[order])

    # broadcast
    for c in clients:
        for view, piece in zip(c.client_params, split_vector(global_client, c.client_params)):
            view.load(piece)
        c.server.parameters.load(global_server)

    aggregator.log.debug('Round %d: aggregated %d clients.', round_idx, len(clients))
    return global_client, global_server, weights


class Experiment(splitfedObject):
    """Runs all runs of one experiment cell."""

    def __init__(self, config: ExperimentConfig, train: Dataset, test: Dataset, *args, **kwargs):
        """Initializes a new experiment.

        Args:
            config: Experiment config.
            train: Training pool, distributed among clients.
            test: Test set for evaluation.
        """
        splitfedObject.__init__(self, *args, **kwargs)
        self.config = config
        self.train = train
        self.test = test
        self.shares: List[ClientShare] = partition_data(train, config['training.proportions'],
                                                        config['training.seed'],
                                                        val_fraction=config['training.val_fraction'])

    def run_seed(self, run_id: int) -> int:
        """Seed of a run, derived from the master seed."""
        return int(np.random.SeedSequence([self.config['training.seed'], run_id]).generate_state(1)[0])

    def lossy_clients(self, run_seed: int) -> List[int]:
        """First n_lossy_clients client IDs after a seeded shuffle."""
        perm = np.random.default_rng([run_seed, 3]).permutation(self.config.n_clients)
        return sorted(int(c) for c in perm[:self.config['channel.n_lossy_clients']])

    def run(self, callback: Callable[[RunRecord], None] = None) -> List[RunRecord]:
        """Runs all runs.

        Args:
            callback: Called with each finished record.

        Returns:
            One record per run.
        """
        records = []
        for run_id in range(self.config['training.runs']):
            start = time.time()
            if self.config.mode == 'centralized':
                record = self.run_centralized(run_id)
            else:
                record = self.run_splitfed(run_id)
            self.log.info('Finished run %d/%d with MJI %.4f in %.1f seconds.', run_id + 1,
                          self.config['training.runs'], record.final_mji, time.time() - start)
            records.append(record)
            if callback is not None:
                callback(record)
        return records

    def _new_record(self, run_id: int, run_seed: int, lossy: List[int] = None) -> RunRecord:
        return RunRecord(run_id, self.config.split_label, self.config.aggregator_label,
                         self.config['channel.p_loss'] if self.config.mode == 'splitfed' else 0.,
                         self.config['channel.n_lossy_clients'] if self.config.mode == 'splitfed' else 0,
                         run_seed, lossy)

    def run_splitfed(self, run_id: int) -> RunRecord:
        """Trains one SplitFed run and evaluates the global model after every round.

        Args:
            run_id: Number of run.

        Returns:
            Record of run.
        """
        cfg = self.config
        spec: UNetSpec = cfg.unet
        run_seed = self.run_seed(run_id)
        lossy = self.lossy_clients(run_seed)
        record = self._new_record(run_id, run_seed, lossy)
        self.log.info('Starting run %d with seed %d, lossy clients: %s.', run_id, run_seed, lossy)

        # global segments and clients
        front, server, back = build_segments(spec, cfg.split, rng=np.random.default_rng([run_seed, 0]))
        clients = []
        for share in self.shares:
            channel = ErasureChannel(share.client_id, p_loss=cfg['channel.p_loss'],
                                     enabled=share.client_id in lossy, master_seed=run_seed)
            clients.append(ClientState(share, front.copy(), server.copy(), back.copy(), channel,
                                       lr=cfg['training.lr'], batch_size=cfg['training.batch_size'],
                                       num_classes=spec.num_classes, image_size=cfg['data.image_size'],
                                       rng=np.random.default_rng([run_seed, 1, share.client_id])))
        aggregator = cfg.aggregator.create(log=self.log)
        val = Dataset([s for share in self.shares for s in share.val])

        # validation loss of an aggregated model, for auto_fedavg
        def validation_loss(global_client: np.ndarray, weights: np.ndarray) -> float:
            order = sorted(range(len(clients)), key=lambda i: clients[i].client_id)
            scratch = [s.copy() for s in clients[0].segments]
            for view, piece in zip([scratch[0].parameters, scratch[2].parameters],
                                   split_vector(global_client, clients[0].client_params)):
                view.load(piece)
            scratch[1].parameters.load(combine([clients[i].server.parameters.flatten() for i in order], weights))
            params = {}
            for s in scratch:
                params.update(s.params)
            return dice_loss(UNet.from_params(spec, params), val)

        # rounds
        for rnd in range(cfg['training.global_epochs']):
            for c in clients:
                c.channel.start_round(rnd)
                for epoch in range(cfg['training.local_epochs']):
                    c.local_epoch(epoch)
                c.val_loss = dice_loss(c.model(spec), c.share.val)

            # aggregate and evaluate
            _, _, weights = global_round(clients, aggregator, rnd, context={'evaluate': validation_loss})
            record.add_weights(weights_report(weights, cfg.aggregator, [c.client_id for c in clients],
                                              global_epoch=rnd + 1))
            record.mji.append(evaluate(clients[0].model(spec), self.test))
            self.log.info('Run %d, round %d/%d: MJI %.4f, weights %s.', run_id, rnd + 1,
                          cfg['training.global_epochs'], record.mji[-1], np.round(weights, 3).tolist())

        # erasure statistics
        for c in clients:
            record.packets_sent += c.channel.packets_sent
            record.packets_lost += c.channel.packets_lost
            for key, count in c.channel.sent_by_tensor.items():
                record.transmissions[key] = record.transmissions.get(key, 0) + count
        return record

    def run_centralized(self, run_id: int) -> RunRecord:
        """Trains the unsplit U-Net on the pooled training data of all clients.

        Args:
            run_id: Number of run.

        Returns:
            Record of run, with one MJI per epoch.
        """
        cfg = self.config
        spec: UNetSpec = cfg.unet
        run_seed = self.run_seed(run_id)
        record = self._new_record(run_id, run_seed)
        model = UNet(spec, rng=np.random.default_rng([run_seed, 0]))
        state = AdamState(model.parameters(), lr=cfg['training.lr'])
        pool = Dataset([s for share in self.shares for s in share.train])
        rng = np.random.default_rng([run_seed, 1])

        for epoch in range(cfg['training.global_epochs']):
            order = rng.permutation(len(pool))
            for batch, start in enumerate(range(0, len(order), cfg['training.batch_size'])):
                samples = [augment(pool[i], rng, size=cfg['data.image_size'])
                           for i in order[start:start + cfg['training.batch_size']]]
                x, y = Dataset(samples).arrays()
                with Tape() as tape:
                    probs = model.forward(x)
                    loss = soft_dice_loss(probs, one_hot(y, spec.num_classes, dtype=model.dtype))
                if not np.isfinite(loss.item()):
                    raise TrainingError('Loss is not finite.', epoch=epoch, batch=batch, loss=loss.item())
                grads = tape.backward(loss)
                adam_step(model.parameters(), [grads.grad(p) for p in model.parameters()], state)
            record.mji.append(evaluate(model, self.test))
            self.log.info('Run %d, epoch %d/%d: MJI %.4f.', run_id, epoch + 1, cfg['training.global_epochs'],
                          record.mji[-1])
        return record


def run_experiment(cfg: ExperimentConfig, data: Tuple[Dataset, Dataset] = None, log: logging.Logger = None,
                   callback: Callable[[RunRecord], None] = None) -> List[RunRecord]:
    """Runs all runs of an experiment.

    Args:
        cfg: Experiment config.
        data: Training pool and test set; loaded as configured if None.
        log: Logger to use.
        callback: Called with each finished record.

    Returns:
        One record per run.
    """
    log = logging.getLogger('splitfed.main') if log is None else log
    train, test = load_data(cfg, log=log) if data is None else data
    return Experiment(cfg, train, test, log=log).run(callback=callback)


__all__ = ['Experiment', 'run_experiment', 'global_round', 'evaluate', 'dice_loss', 'load_data']
