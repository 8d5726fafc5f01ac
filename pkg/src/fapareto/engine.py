"""Evolutionary run loop, the single-model baselines, and on-disk artifacts."""

from __future__ import annotations

import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from . import data as data_mod
from .errors import ConfigError
from .indicators import DEFAULT_REF, hv_curve
from .metrics import ObjectivePoint, evaluate_objectives
from .model import Architecture, ParamVector, TrainConfig, init_params, tune
from .pareto import Archive, Individual, assign_fitness, mating_pool, pareto_selection, update_archive
from .seeding import derive_seed
from .variation import fgdg_generate

log = logging.getLogger(__name__)

BASELINES = ("vanilla", "cda", "oversample", "undersample", "oversample_cda", "undersample_cda")


@dataclass
class RunConfig:
    population_size: int = 50
    generations: int = 20
    trials: int = 10
    mutation_lambda: float = 0.02
    merge_alpha: float = 0.5
    train_cfg: TrainConfig = field(default_factory=TrainConfig)
    hidden_dims: tuple = (16,)
    activation: str = "relu"
    data: str = "synthetic"
    synth: data_mod.SynthConfig = field(default_factory=data_mod.SynthConfig)
    split_fractions: tuple = (0.6, 0.2, 0.2)
    master_seed: int = 0
    hv_ref: tuple = DEFAULT_REF
    worker_count: int = 1
    baseline_epochs: int | None = None

    def validate(self):
        if self.population_size < 2:
            raise ConfigError(f"population_size must be >= 2, got {self.population_size}")
        if self.generations < 1:
            raise ConfigError(f"generations must be >= 1, got {self.generations}")
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        if self.mutation_lambda < 0:
            raise ConfigError("mutation_lambda must be >= 0")
        if not 0.0 <= self.merge_alpha <= 1.0:
            raise ConfigError("merge_alpha must be in [0, 1]")
        if self.worker_count < 1:
            raise ConfigError("worker_count must be >= 1")
        if len(self.hv_ref) != 2:
            raise ConfigError("hv_ref must have two coordinates")
        return self

    @property
    def epochs_for_baseline(self):
        if self.baseline_epochs is not None:
            return self.baseline_epochs
        return self.generations * self.train_cfg.epochs_per_tune

    def to_dict(self, include_hints=True):
        d = asdict(self)
        if not include_hints:
            del d["worker_count"]
        d["hidden_dims"] = list(self.hidden_dims)
        d["split_fractions"] = list(self.split_fractions)
        d["hv_ref"] = list(self.hv_ref)
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            if "train_cfg" in d:
                d["train_cfg"] = TrainConfig(**d["train_cfg"])
            if "synth" in d:
                d["synth"] = data_mod.SynthConfig(**d["synth"])
            for k in ("hidden_dims", "split_fractions", "hv_ref"):
                if k in d:
                    d[k] = tuple(d[k])
            return cls(**d)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None


@dataclass
class Splits:
    train: data_mod.Dataset
    val: data_mod.Dataset
    test: data_mod.Dataset


def load_splits(cfg: RunConfig) -> Splits:
    """Dataset and split depend on the master seed only, never on the trial."""
    if cfg.data == "synthetic":
        d = data_mod.generate_synthetic(cfg.synth)
    else:
        d = data_mod.load_csv(cfg.data)
    train, val, test = data_mod.split(d, cfg.split_fractions, derive_seed(cfg.master_seed, "split"))
    for part in (train, val, test):
        part.validate_fairness()
    return Splits(train, val, test)


def architecture_for(cfg: RunConfig, input_dim: int) -> Architecture:
    return Architecture(input_dim, tuple(cfg.hidden_dims), cfg.activation)


@dataclass
class RunResult:
    trial: int
    trial_seed: int
    snapshots: list  # per generation: list of (id, ObjectivePoint)
    archive: Archive
    hv: list
    evaluated: list  # Individuals in evaluation order
    wall_seconds: float = 0.0


def _tune_and_eval(args):
    params, tcfg, splits = args
    p = tune(params, splits.train, tcfg)
    return p, evaluate_objectives(p, splits.val), evaluate_objectives(p, splits.test)


def _map(fn, items, workers):
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


def run_moel(cfg: RunConfig, trial: int = 0, splits: Splits | None = None) -> RunResult:
    """One evolutionary trial; a pure function of (cfg, trial)."""
    cfg.validate()
    started = time.perf_counter()
    if splits is None:
        splits = load_splits(cfg)
    arch = architecture_for(cfg, splits.train.input_dim)
    seed = derive_seed(cfg.master_seed, "trial", trial)
    tc = cfg.train_cfg
    lam = cfg.population_size

    def tune_jobs(gen, individuals):
        return [
            (ind.params, replace(tc, seed=derive_seed(seed, "tune", gen, ind.id)), splits)
            for ind in individuals
        ]

    def finish(gen, individuals):
        for ind, (p, val_obj, test_obj) in zip(individuals, _map(_tune_and_eval, tune_jobs(gen, individuals), cfg.worker_count)):
            ind.params, ind.objectives, ind.test_objectives = p, val_obj, test_obj
            ind.generation = gen

    population = [Individual(i, init_params(arch, derive_seed(seed, "init", i))) for i in range(lam)]
    next_id = lam
    finish(0, population)
    evaluated = list(population)
    archive = update_archive(Archive(), population)
    assign_fitness(population)
    snapshots = [[(e.id, e.objectives) for e in archive.entries]]

    for gen in range(1, cfg.generations + 1):
        pool = mating_pool(population, lam, derive_seed(seed, "mating", gen))
        kids = fgdg_generate(pool, lam, cfg.mutation_lambda, derive_seed(seed, "fgdg", gen), cfg.merge_alpha)
        offspring = [Individual(next_id + i, p) for i, p in enumerate(kids)]
        next_id += lam
        finish(gen, offspring)
        evaluated.extend(offspring)
        archive = update_archive(archive, offspring)
        union = population + offspring
        assign_fitness(union)
        population = pareto_selection(union, lam)
        snapshots.append([(e.id, e.objectives) for e in archive.entries])
        log.debug("trial %d gen %d: archive %d", trial, gen, len(archive))

    hv = hv_curve([[o for _, o in snap] for snap in snapshots], cfg.hv_ref)
    return RunResult(trial, seed, snapshots, archive, hv, evaluated, time.perf_counter() - started)


def run_baseline(method: str, splits: Splits, train_cfg: TrainConfig, seed, arch: Architecture | None = None,
                 epochs: int = 20) -> tuple[ParamVector, ObjectivePoint, ObjectivePoint]:
    """Train one model on transformed training data; score on untouched val/test.

    Returns (params, validation objectives, test objectives).
    """
    if method not in BASELINES:
        raise ValueError(f"unknown baseline {method!r}; choose from {BASELINES}")
    train = splits.train
    sampler_seed = derive_seed(seed, f"sampler:{method}")
    if method.startswith("oversample"):
        train = data_mod.oversample(train, sampler_seed)
    elif method.startswith("undersample"):
        train = data_mod.undersample(train, sampler_seed)
    if method == "cda" or method.endswith("_cda"):
        train = data_mod.cda_augment(train)
    if arch is None:
        arch = Architecture(train.input_dim)
    p = init_params(arch, derive_seed(seed, "baseline-init"))
    p = tune(p, train, replace(train_cfg, epochs_per_tune=epochs, seed=derive_seed(seed, f"baseline-tune:{method}")))
    return p, evaluate_objectives(p, splits.val), evaluate_objectives(p, splits.test)


def run_baselines(cfg: RunConfig, splits: Splits | None = None):
    """All six baselines on the shared split; returns rows of (method, val, test)."""
    cfg.validate()
    if splits is None:
        splits = load_splits(cfg)
    arch = architecture_for(cfg, splits.train.input_dim)
    seed = derive_seed(cfg.master_seed, "baselines")
    rows = []
    for m in BASELINES:
        _, val, test = run_baseline(m, splits, cfg.train_cfg, seed, arch, cfg.epochs_for_baseline)
        rows.append((m, val, test))
    return rows


# --- artifacts ------------------------------------------------------------

CKPT_MAGIC = "FAPARETO-CKPT 1"


def fmt(x) -> str:
    """Shortest round-trippable decimal text for a float."""
    return repr(float(x))


def write_checkpoint(path, entry_id, objectives, params: ParamVector):
    header = "\n".join([
        CKPT_MAGIC,
        "arch: " + json.dumps(params.arch.to_dict(), sort_keys=True),
        f"id: {entry_id}",
        f"error: {fmt(objectives.error)}",
        f"delta_tpr: {fmt(objectives.delta_tpr)}",
        f"n_params: {params.values.size}",
        "",
        "",
    ]).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.asarray(params.values, dtype="<f8").tobytes())


def read_checkpoint(path):
    """Returns (id, ObjectivePoint, ParamVector)."""
    raw = Path(path).read_bytes()
    head, sep, body = raw.partition(b"\n\n")
    if not sep:
        raise ValueError(f"{path}: missing header terminator")
    lines = head.decode("utf-8").split("\n")
    if lines[0] != CKPT_MAGIC:
        raise ValueError(f"{path}: not a checkpoint file")
    fields = dict(line.split(": ", 1) for line in lines[1:])
    arch = Architecture.from_dict(json.loads(fields["arch"]))
    n = int(fields["n_params"])
    if len(body) != 8 * n:
        raise ValueError(f"{path}: expected {8 * n} payload bytes, got {len(body)}")
    values = np.frombuffer(body, dtype="<f8").astype(np.float64)
    obj = ObjectivePoint(float(fields["error"]), float(fields["delta_tpr"]))
    return int(fields["id"]), obj, ParamVector(arch, values)


def _write_rows(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for r in rows:
            fh.write(",".join(str(v) for v in r) + "\n")


def write_run(result: RunResult, cfg: RunConfig, out_dir) -> Path:
    """Write one trial's artifacts. Nothing time-dependent goes to disk."""
    tdir = Path(out_dir) / f"trial_{result.trial:03d}"
    (tdir / "archive").mkdir(parents=True, exist_ok=True)
    for old in (tdir / "archive").glob("*.ckpt"):
        old.unlink()
    manifest = {
        "trial": result.trial,
        "trial_seed": result.trial_seed,
        "master_seed": cfg.master_seed,
        "config": cfg.to_dict(include_hints=False),
    }
    (tdir / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    _write_rows(tdir / "hv.csv", ["generation", "hv"], [(g, fmt(h)) for g, h in enumerate(result.hv)])
    _write_rows(
        tdir / "snapshots.csv",
        ["generation", "id", "error", "delta_tpr"],
        [(g, i, fmt(o.error), fmt(o.delta_tpr)) for g, snap in enumerate(result.snapshots) for i, o in snap],
    )
    _write_rows(
        tdir / "points.csv",
        ["id", "generation", "error", "delta_tpr", "test_error", "test_delta_tpr"],
        [
            (ind.id, ind.generation, fmt(ind.objectives.error), fmt(ind.objectives.delta_tpr),
             fmt(ind.test_objectives.error), fmt(ind.test_objectives.delta_tpr))
            for ind in result.evaluated
        ],
    )
    for e in result.archive.entries:
        write_checkpoint(tdir / "archive" / f"{e.id:08d}.ckpt", e.id, e.objectives, e.params)
    return tdir


def write_baselines(rows, out_dir) -> Path:
    path = Path(out_dir) / "baselines.csv"
    path.parent.mkdir(parents=True, exist_ok=True)
    _write_rows(
        path,
        ["method", "error", "delta_tpr", "test_error", "test_delta_tpr"],
        [(m, fmt(v.error), fmt(v.delta_tpr), fmt(t.error), fmt(t.delta_tpr)) for m, v, t in rows],
    )
    return path
