"""Multi-objective evolutionary learning of accurate and fair classifiers."""

from ._accel import USE_NUMBA
from .data import Dataset, SynthConfig, cda_augment, generate_synthetic, load_csv, oversample, split, undersample, write_csv
from .engine import BASELINES, RunConfig, RunResult, load_splits, run_baseline, run_baselines, run_moel
from .indicators import hv_curve, hypervolume_2d, hypervolume_mc
from .metrics import ObjectivePoint, accuracy, delta_tpr, evaluate_objectives, group_tpr, pearson
from .model import Architecture, ParamVector, TrainConfig, forward, gradient, init_params, loss, predict, tune
from .pareto import (
    Archive,
    Individual,
    assign_fitness,
    crowding_distance,
    dominates,
    mating_pool,
    nondominated_sort,
    pareto_selection,
    update_archive,
)
from .variation import fgdg_generate, gaussian_mutate, merge_crossover

__version__ = "0.1.0"
