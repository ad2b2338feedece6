import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from schattenrad import matrix as mx
from schattenrad.spectral import INF, PNorm, gauge, schatten, schatten_batch, singular_values

P_GRID = [1, 1.25, 1.5, 2, 3, 4, 10, math.inf]
seeds = st.integers(min_value=0, max_value=2**64 - 1)
dims = st.integers(min_value=1, max_value=6)
ps = st.sampled_from(P_GRID)


def test_pnorm_validation():
    with pytest.raises(ValueError):
        PNorm(0.5)
    with pytest.raises(ValueError):
        PNorm(float("nan"))
    assert PNorm.parse("inf") == INF
    assert PNorm.parse("INF").is_inf
    assert PNorm.parse("1.5").p == 1.5
    assert str(PNorm(2)) == "2" and str(PNorm(1.25)) == "1.25" and str(INF) == "inf"
    with pytest.raises(ValueError):
        PNorm.parse("two")


def test_singular_values_examples():
    np.testing.assert_allclose(singular_values(np.diag([3, 4])), [4, 3])
    np.testing.assert_allclose(singular_values([[0, 1], [0, 0]]), [1, 0])
    u = mx.random_matrix("unitary", 5, 3)
    np.testing.assert_allclose(singular_values(u), np.ones(5), rtol=0, atol=1e-10)
    with pytest.raises(ValueError):
        singular_values([[np.inf]])


def test_schatten_examples():
    d = np.diag([3, 4])
    assert schatten(d, 2) == 5
    assert schatten(d, 1) == pytest.approx(7, abs=1e-14)
    assert schatten(d, INF) == pytest.approx(4, abs=1e-14)
    for p in P_GRID:
        assert schatten(np.zeros((3, 3)), p) == 0


@pytest.mark.parametrize("p", [1, 1.5, 2, 3, 10])
def test_direct_sum_formula(p):
    for seed in range(10):
        a = mx.random_matrix("ginibre", 3, seed)
        b = mx.random_matrix("ginibre", 4, seed + 100)
        expect = (schatten(a, p) ** p + schatten(b, p) ** p) ** (1 / p)
        assert schatten(mx.direct_sum(a, b), p) == pytest.approx(expect, rel=1e-12)


def test_large_p_does_not_overflow():
    a = 1e3 * mx.random_matrix("ginibre", 4, 2)
    v = schatten(a, 400)
    assert math.isfinite(v)
    assert schatten(a, INF) <= v <= schatten(a, INF) * 4 ** (1 / 400) * (1 + 1e-12)


def test_batch_matches_single():
    stack = np.stack([mx.random_matrix("hermitian", 4, s) for s in range(6)])
    for p in P_GRID:
        one = [schatten(m, p) for m in stack]
        np.testing.assert_allclose(schatten_batch(stack, p), one, rtol=1e-12)
        np.testing.assert_allclose(schatten_batch(stack, p, hermitian=True), one, rtol=1e-12)
    np.testing.assert_allclose(gauge(np.zeros((2, 3)), 3), [0, 0])


@settings(max_examples=60, deadline=None)
@given(n=dims, seed=seeds)
def test_frobenius_identity(n, seed):
    a = mx.random_matrix("ginibre", n, seed)
    s = singular_values(a)
    assert np.all(s >= 0) and np.all(np.diff(s) <= 0)
    fro2 = np.sum(np.abs(a) ** 2)
    assert abs(np.sum(s ** 2) - fro2) <= 1e-10 * fro2


@settings(max_examples=60, deadline=None)
@given(n=dims, seed=seeds, p=ps)
def test_unitary_invariance(n, seed, p):
    a = mx.random_matrix("ginibre", n, seed)
    u = mx.random_matrix("unitary", n, mx.child_seed(seed, 1))
    v = mx.random_matrix("unitary", n, mx.child_seed(seed, 2))
    assert abs(schatten(u @ a @ v, p) - schatten(a, p)) <= 1e-8 * schatten(a, p)


@settings(max_examples=60, deadline=None)
@given(n=dims, seed=seeds, i=st.integers(0, 6), j=st.integers(1, 7))
def test_monotone_in_p(n, seed, i, j):
    p, q = sorted([P_GRID[i], P_GRID[min(i + j, 7)]])
    a = mx.random_matrix("ginibre", n, seed)
    tol = 1e-12 * schatten(a, 1)
    assert schatten(a, INF) <= schatten(a, q) + tol
    assert schatten(a, q) <= schatten(a, p) + tol
    assert schatten(a, p) <= schatten(a, 1) + tol


@settings(max_examples=60, deadline=None)
@given(n=dims, seed=seeds, p=ps, re=st.floats(-5, 5), im=st.floats(-5, 5))
def test_norm_axioms(n, seed, p, re, im):
    a = mx.random_matrix("ginibre", n, seed)
    b = mx.random_matrix("nilpotent_upper", n, mx.child_seed(seed, 1)) + mx.random_matrix(
        "hermitian", n, mx.child_seed(seed, 2))
    scale = schatten(a, p) + schatten(b, p)
    assert schatten(a + b, p) <= scale + 1e-8 * scale
    assert schatten(mx.adjoint(a), p) == pytest.approx(schatten(a, p), rel=1e-12)
    c = complex(re, im)
    assert schatten(c * a, p) == pytest.approx(abs(c) * schatten(a, p), rel=1e-12, abs=1e-300)
