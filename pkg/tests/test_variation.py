import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fapareto.errors import ArchitectureMismatch
from fapareto.model import Architecture, ParamVector, init_params
from fapareto.pareto import Individual
from fapareto.variation import fgdg_generate, gaussian_mutate, merge_crossover

BIG = Architecture(100, (100,))  # W0 has exactly 10^4 entries


def standardised_big(seed):
    v = init_params(BIG, seed).values.copy()
    w = v[:10_000]
    v[:10_000] = (w - w.mean()) / w.std()
    return ParamVector(BIG, v)


def test_merge_examples():
    arch = Architecture(1, ())
    a, b = ParamVector(arch, [2.0, 4.0]), ParamVector(arch, [4.0, 8.0])
    assert list(merge_crossover(a, b, 0.5).values) == [3.0, 6.0]
    assert merge_crossover(a, b, 1.0).values.tobytes() == a.values.tobytes()
    assert merge_crossover(a, b, 0.0).values.tobytes() == b.values.tobytes()
    with pytest.raises(ArchitectureMismatch):
        merge_crossover(a, init_params(Architecture(2, ()), 0))


@given(st.floats(0, 1), st.integers(0, 1000))
@settings(max_examples=60, deadline=None)
def test_merge_self_is_identity_and_affine(alpha, seed):
    arch = Architecture(3, (4,))
    p, q = init_params(arch, seed), init_params(arch, seed + 1)
    assert merge_crossover(p, p, alpha).values.tobytes() == p.values.tobytes()
    c = merge_crossover(p, q, alpha).values
    assert np.all(c >= np.minimum(p.values, q.values)) and np.all(c <= np.maximum(p.values, q.values))


def test_mutate_zero_lambda_identity(small_params):
    assert gaussian_mutate(small_params, 0.0, 5).values.tobytes() == small_params.values.tobytes()


def test_mutate_constant_tensors_unchanged(small_arch):
    # biases of a fresh init are all zero: std 0, so they must stay zero
    p = init_params(small_arch, 0)
    out = gaussian_mutate(p, 0.5, 1)
    for (name, before), (_, after) in zip(p.tensors(), out.tensors()):
        if name.startswith("b"):
            assert np.array_equal(before, after)
        else:
            assert not np.array_equal(before, after)


def test_mutate_is_pure_and_deterministic(small_params):
    before = small_params.values.tobytes()
    a, b = gaussian_mutate(small_params, 0.1, 7), gaussian_mutate(small_params, 0.1, 7)
    assert a.values.tobytes() == b.values.tobytes()
    assert small_params.values.tobytes() == before


@pytest.mark.parametrize("seed", range(5))
def test_mutation_noise_std_matches_lambda(seed):
    p = standardised_big(seed)
    out = gaussian_mutate(p, 0.02, seed)
    diff = out.values[:10_000] - p.values[:10_000]
    assert abs(diff.std() - 0.02) <= 0.05 * 0.02


def test_mutation_scales_linearly():
    p = standardised_big(0)
    for lam in (0.01, 0.02, 0.04):
        stds = [np.std(gaussian_mutate(p, lam, s).values[:10_000] - p.values[:10_000]) for s in range(3)]
        assert abs(np.mean(stds) / lam - 1.0) <= 0.05


def test_fgdg_examples(small_params):
    pool = [Individual(0, small_params), Individual(1, small_params)]
    kids = fgdg_generate(pool, 50, 0.0, seed=1)
    assert len(kids) == 50
    assert all(k.values.tobytes() == small_params.values.tobytes() for k in kids)
    with pytest.raises(ValueError):
        fgdg_generate(pool[:1], 3, 0.02, 0)


def test_fgdg_deterministic_and_order_free(small_arch):
    pool = [Individual(i, init_params(small_arch, i)) for i in range(6)]
    a = fgdg_generate(pool, 8, 0.02, seed=11)
    b = fgdg_generate(pool, 8, 0.02, seed=11)
    assert [k.values.tobytes() for k in a] == [k.values.tobytes() for k in b]
    # the first children do not depend on how many are requested
    c = fgdg_generate(pool, 3, 0.02, seed=11)
    assert [k.values.tobytes() for k in c] == [k.values.tobytes() for k in a[:3]]
    assert all(np.all(np.isfinite(k.values)) and k.arch == small_arch for k in a)
