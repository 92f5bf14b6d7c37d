from .config import ExperimentConfig, load_config
from .client import ClientShare, ClientState, partition_data, client_counts, local_epoch
from .records import RunRecord, COLUMNS, WEIGHT_COLUMNS, records_frame, weights_frame, sort_rows, write_csv, \
    read_csv, weights_filename
from .experiment import Experiment, run_experiment, global_round, evaluate, dice_loss, load_data
