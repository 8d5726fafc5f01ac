"""Offspring generation: weight-averaging crossover plus Gaussian noise."""

from __future__ import annotations

import numpy as np

from .errors import ArchitectureMismatch
from .model import ParamVector
from .seeding import derive_seed


def merge_crossover(p1: ParamVector, p2: ParamVector, alpha: float = 0.5) -> ParamVector:
    if p1.arch != p2.arch:
        raise ArchitectureMismatch(f"cannot merge {p1.arch} with {p2.arch}")
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must be in [0, 1], got {alpha}")
    if alpha == 1.0:
        return ParamVector(p1.arch, p1.values)
    if alpha == 0.0:
        return ParamVector(p2.arch, p2.values)
    a, b = p1.values, p2.values
    child = alpha * a + (1.0 - alpha) * b
    # rounding can push an average a hair outside [min, max]; merge(p, p) must be p
    child = np.clip(child, np.minimum(a, b), np.maximum(a, b))
    return ParamVector(p1.arch, child)


def gaussian_mutate(p: ParamVector, lam: float, seed) -> ParamVector:
    """Add N(0, (lam * std(tensor))^2) noise to each entry, tensor by tensor."""
    if lam < 0:
        raise ValueError(f"mutation lambda must be >= 0, got {lam}")
    if lam == 0:
        return ParamVector(p.arch, p.values)
    rng = np.random.default_rng(seed)
    out = p.values.copy()
    for _, shape, off in p.arch.tensor_layout:
        size = int(np.prod(shape))
        seg = out[off : off + size]
        # draw even for skipped tensors so later tensors see a fixed stream
        noise = rng.standard_normal(size)
        sd = float(np.std(seg)) if size > 1 else 0.0
        if sd > 0:
            seg += lam * sd * noise
    return ParamVector(p.arch, out)


def fgdg_generate(pool, count: int, lam: float, seed, alpha: float = 0.5) -> list[ParamVector]:
    """``count`` children, each from two distinct pool members.

    Child ``i`` uses only ``derive_seed(seed, ..., i)``, so children can be
    produced in any order or in parallel with identical results.
    """
    if len(pool) < 2:
        raise ValueError(f"pool must hold at least two parents, got {len(pool)}")
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    kids = []
    for i in range(count):
        rng = np.random.default_rng(derive_seed(seed, "parents", i))
        a, b = rng.choice(len(pool), size=2, replace=False)
        p1 = getattr(pool[a], "params", pool[a])
        p2 = getattr(pool[b], "params", pool[b])
        child = merge_crossover(p1, p2, alpha)
        kids.append(gaussian_mutate(child, lam, derive_seed(seed, "noise", i)))
    return kids
