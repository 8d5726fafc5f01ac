"""Exact 2-D hypervolume, a Monte Carlo estimator, and HV curves."""

from __future__ import annotations

import numpy as np

from ._kernels import count_dominated, hv2d

DEFAULT_REF = (1.0, 1.0)


def _points(points):
    P = np.asarray([tuple(p) for p in points], dtype=np.float64).reshape(-1, 2)
    if not np.all(np.isfinite(P)):
        raise ValueError("hypervolume inputs must be finite")
    return np.ascontiguousarray(P)


def hypervolume_2d(points, ref=DEFAULT_REF) -> float:
    """Area dominated by ``points`` inside the box bounded by ``ref``.

    Points on or beyond the reference boundary contribute nothing.
    """
    rx, ry = float(ref[0]), float(ref[1])
    if not (np.isfinite(rx) and np.isfinite(ry)):
        raise ValueError("reference point must be finite")
    P = _points(points)
    if P.shape[0] == 0:
        return 0.0
    return float(hv2d(P, rx, ry))


def hypervolume_mc(points, ref=DEFAULT_REF, samples=1_000_000, seed=0, lower=(0.0, 0.0)) -> float:
    """Monte Carlo estimate over the box [lower, ref]."""
    P = _points(points)
    rng = np.random.default_rng(seed)
    lo = np.asarray(lower, dtype=np.float64)
    hi = np.asarray(ref, dtype=np.float64)
    S = lo + rng.random((samples, 2)) * (hi - lo)
    if P.shape[0] == 0:
        return 0.0
    return float(np.prod(hi - lo)) * count_dominated(P, S) / samples


def hv_curve(per_generation_archives, ref=DEFAULT_REF) -> list[float]:
    if len(per_generation_archives) == 0:
        raise ValueError("hv_curve needs at least one snapshot")
    return [hypervolume_2d(pts, ref) for pts in per_generation_archives]
