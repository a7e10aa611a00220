"""Random-projection Naive Bayes ensembles for streaming classification."""

from .base import Prediction
from .baselines import Algorithm, LinearModel
from .data import Dataset, down_dim, generate_gm, load_builtin, load_csv, permutation, write_csv
from .ensemble import Combiner, Mode, RpnbConfig, RpnbModel
from .evaluation import (
    AggregateSummary,
    RunSummary,
    WilcoxonResult,
    averaged_eval,
    macro_f1,
    prequential_run,
    wilcoxon_signed_rank,
    win_loss_count,
)
from .gnb import GnbModel, PriorMode
from .projection import ProjectionMatrix, ProjectionScheme, generate_matrix, project, project_batch

__version__ = "0.1.0"
