"""Datasets with a binary protected attribute, plus pre-processing baselines."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, CSVParseError, DatasetError, UndefinedTPRError

CELLS = ((0, 0), (0, 1), (1, 0), (1, 1))


@dataclass(frozen=True, eq=False)
class Dataset:
    features: np.ndarray
    labels: np.ndarray
    groups: np.ndarray

    def __post_init__(self):
        X = np.array(self.features, dtype=np.float64)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        y = np.asarray(self.labels).astype(np.int64).reshape(-1)
        g = np.asarray(self.groups).astype(np.int64).reshape(-1)
        if X.ndim != 2 or X.shape[0] < 1:
            raise DatasetError("dataset needs at least one row")
        if not (X.shape[0] == y.size == g.size):
            raise DatasetError(f"length mismatch: {X.shape[0]} rows, {y.size} labels, {g.size} groups")
        if not np.all(np.isfinite(X)):
            raise DatasetError("features must be finite")
        if not (np.isin(y, (0, 1)).all() and np.isin(g, (0, 1)).all()):
            raise DatasetError("labels and groups must be 0/1")
        for a in (X, y, g):
            a.setflags(write=False)
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "labels", y)
        object.__setattr__(self, "groups", g)

    def __len__(self):
        return self.labels.size

    @property
    def n(self):
        return self.labels.size

    @property
    def input_dim(self):
        return self.features.shape[1]

    def cell_indices(self, g, y):
        return np.flatnonzero((self.groups == g) & (self.labels == y))

    def cell_counts(self):
        """Row counts keyed by (group, label)."""
        return {c: int(self.cell_indices(*c).size) for c in CELLS}

    def subset(self, idx):
        idx = np.asarray(idx, dtype=np.int64)
        return Dataset(self.features[idx], self.labels[idx], self.groups[idx])

    def validate_fairness(self):
        """Raise unless both groups have at least one positive row."""
        for g in (0, 1):
            if self.cell_indices(g, 1).size == 0:
                raise UndefinedTPRError(g, 1)
        return self


@dataclass(frozen=True)
class SynthConfig:
    n: int = 4000
    input_dim: int = 8
    group_balance: float = 0.5
    label_group_correlation: float = 0.6
    group_noise_gap: float = 0.2
    class_mean: float = 0.5
    group_offset: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.n < 10:
            raise ConfigError(f"n must be >= 10, got {self.n}")
        if self.input_dim < 1:
            raise ConfigError(f"input_dim must be >= 1, got {self.input_dim}")
        if not 0.0 < self.group_balance < 1.0:
            raise ConfigError(f"group_balance must be in (0, 1), got {self.group_balance}")
        if not 0.0 <= self.label_group_correlation < 1.0:
            raise ConfigError("label_group_correlation must be in [0, 1)")
        if not 0.0 <= self.group_noise_gap < 0.5:
            raise ConfigError("group_noise_gap must be in [0, 0.5)")
        if self.class_mean <= 0:
            raise ConfigError("class_mean must be positive")


def generate_synthetic(cfg: SynthConfig) -> Dataset:
    """Biased tabular data.

    P(Y=1 | G=g) = (1 + beta * (1 - 2g)) / 2, so beta=0 makes Y independent of
    G. The first ceil(d/2) features carry the class signal (mean
    +class_mean / -class_mean), the rest carry a +group_offset*G shift; noise
    is unit normal. Afterwards each
    (G=1, Y=1) label flips to 0 with probability ``group_noise_gap``.
    """
    rng = np.random.default_rng(cfg.seed)
    n, d = cfg.n, cfg.input_dim
    beta = cfg.label_group_correlation
    g = (rng.random(n) < cfg.group_balance).astype(np.int64)
    p_pos = 0.5 * (1.0 + beta * (1.0 - 2.0 * g))
    y = (rng.random(n) < p_pos).astype(np.int64)

    n_class = (d + 1) // 2
    X = rng.standard_normal((n, d))
    X[:, :n_class] += cfg.class_mean * (2.0 * y - 1.0)[:, None]
    X[:, n_class:] += cfg.group_offset * g[:, None]

    flip = (g == 1) & (y == 1) & (rng.random(n) < cfg.group_noise_gap)
    y = np.where(flip, 0, y)
    return Dataset(X, y, g)


def load_csv(path) -> Dataset:
    """Read ``label,group,f0,f1,...``; feature columns keep header order."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise CSVParseError("empty file") from None
        for col in ("label", "group"):
            if col not in header:
                raise CSVParseError("missing required column", row=1, column=col)
        li, gi = header.index("label"), header.index("group")
        feat_cols = [i for i in range(len(header)) if i not in (li, gi)]
        X, y, g = [], [], []
        for lineno, rec in enumerate(reader, start=2):
            if not rec or all(not c.strip() for c in rec):
                continue
            if len(rec) != len(header):
                raise CSVParseError(f"expected {len(header)} fields, got {len(rec)}", row=lineno)
            for col, idx, out in (("label", li, y), ("group", gi, g)):
                cell = rec[idx].strip()
                if cell not in ("0", "1"):
                    raise CSVParseError(f"value {cell!r} is not 0/1", row=lineno, column=col)
                out.append(int(cell))
            row = []
            for i in feat_cols:
                try:
                    v = float(rec[i])
                except ValueError:
                    raise CSVParseError(f"non-numeric value {rec[i]!r}", row=lineno, column=header[i]) from None
                if not np.isfinite(v):
                    raise CSVParseError(f"non-finite value {rec[i]!r}", row=lineno, column=header[i])
                row.append(v)
            X.append(row)
    if not y:
        raise CSVParseError("no data rows")
    return Dataset(np.array(X, dtype=np.float64).reshape(len(y), len(feat_cols)), y, g)


def write_csv(d: Dataset, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["label", "group", *(f"f{j}" for j in range(d.input_dim))])
        for i in range(d.n):
            w.writerow([int(d.labels[i]), int(d.groups[i]), *(repr(float(v)) for v in d.features[i])])


def split(d: Dataset, fractions=(0.6, 0.2, 0.2), seed=0):
    """Stratified train/val/test split over the four (group, label) cells."""
    fr = np.asarray(fractions, dtype=np.float64)
    if fr.shape != (3,) or np.any(fr <= 0) or abs(fr.sum() - 1.0) > 1e-9:
        raise ConfigError(f"fractions must be three positive numbers summing to 1, got {fractions}")
    rng = np.random.default_rng(seed)
    parts = ([], [], [])
    for cell in CELLS:
        idx = d.cell_indices(*cell)
        if idx.size == 0:
            continue
        idx = rng.permutation(idx)
        n_train = int(round(fr[0] * idx.size))
        n_val = int(round(fr[1] * idx.size))
        if n_train < 1 or n_val < 1 or n_train + n_val > idx.size:
            raise DatasetError(f"cell (group={cell[0]}, label={cell[1]}) has only {idx.size} rows; too few to split")
        parts[0].append(idx[:n_train])
        parts[1].append(idx[n_train : n_train + n_val])
        parts[2].append(idx[n_train + n_val :])
    return tuple(d.subset(np.sort(np.concatenate(p))) for p in parts)


def _require_cells(d):
    counts = d.cell_counts()
    empty = [c for c, k in counts.items() if k == 0]
    if empty:
        raise DatasetError(f"empty (group, label) cell(s): {empty}")
    return counts


def oversample(d: Dataset, seed=0) -> Dataset:
    """Duplicate rows with replacement until every cell matches the largest."""
    counts = _require_cells(d)
    target = max(counts.values())
    rng = np.random.default_rng(seed)
    keep = []
    for cell in CELLS:
        idx = d.cell_indices(*cell)
        keep.append(idx)
        if idx.size < target:
            keep.append(rng.choice(idx, target - idx.size, replace=True))
    return d.subset(np.concatenate(keep))


def undersample(d: Dataset, seed=0) -> Dataset:
    """Subsample without replacement until every cell matches the smallest."""
    counts = _require_cells(d)
    target = min(counts.values())
    rng = np.random.default_rng(seed)
    keep = [np.sort(rng.choice(d.cell_indices(*cell), target, replace=False)) for cell in CELLS]
    return d.subset(np.concatenate(keep))


def cda_augment(d: Dataset) -> Dataset:
    """Append a group-flipped counterfactual of every row.

    Features of the copy are shifted from their own group's mean onto the
    other group's mean: ``x' = x - mu[g] + mu[1-g]``. A group with no rows
    keeps a zero shift.
    """
    X, g = d.features, d.groups
    mu = np.zeros((2, d.input_dim))
    for k in (0, 1):
        if np.any(g == k):
            mu[k] = X[g == k].mean(axis=0)
    if not (np.any(g == 0) and np.any(g == 1)):
        mu[:] = X.mean(axis=0)
    X_cf = X - mu[g] + mu[1 - g]
    return Dataset(
        np.vstack([X, X_cf]),
        np.concatenate([d.labels, d.labels]),
        np.concatenate([g, 1 - g]),
    )
