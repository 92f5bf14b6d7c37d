from .aggregator import ClientReport, Aggregator, combine
from .naive import NaiveAverage
from .fedavg import FedAvg
from .autofedavg import AutoFedAvg
from .fedncl import FedNCLv2, FedNCLv4
from .strategy import KINDS, AggregatorSpec, aggregate, weights_report, write_weights, read_weights
