from .metrics import jaccard_per_class, mean_ji, mean_ji_of_masks
from .ttest import ALPHA, TTestResult, welch_t_test, t_sf
from .compare import pairwise_compare
