import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from circjl.circulant import PartialCirculant, SignDiagonal, apply_fft, apply_naive, apply_signs
from circjl.errors import InvalidArgument


def dense_oracle(a, k):
    """Row i, column j holds a[(j - i) mod d]; built entry by entry."""
    d = len(a)
    return np.array([[a[(j - i) % d] for j in range(d)] for i in range(k)])


def test_basis_columns():
    M = PartialCirculant([1.0, 2.0, 3.0], 2)
    assert np.array_equal(apply_naive(M, [1, 0, 0]), [1.0, 3.0])
    assert np.array_equal(apply_naive(M, [0, 1, 0]), [2.0, 1.0])
    assert np.allclose(apply_fft(M, [1, 0, 0]), [1.0, 3.0], rtol=0, atol=1e-12)
    assert np.allclose(apply_fft(M, [0, 1, 0]), [2.0, 1.0], rtol=0, atol=1e-12)


def test_dense_matches_entry_formula():
    rng = np.random.default_rng(0)
    a = rng.standard_normal(16)
    M = PartialCirculant(a, 7)
    assert np.array_equal(M.dense(), dense_oracle(a, 7))
    v = rng.standard_normal(16)
    assert np.allclose(apply_naive(M, v), dense_oracle(a, 7) @ v, rtol=1e-13, atol=1e-13)


@pytest.mark.parametrize("d", [257, 1000])
def test_fft_non_power_of_two(d):
    rng = np.random.default_rng(d)
    M = PartialCirculant(rng.standard_normal(d), d // 3)
    v = rng.standard_normal(d)
    ref = apply_naive(M, v)
    assert np.max(np.abs(apply_fft(M, v) - ref)) / np.max(np.abs(ref)) <= 1e-9


def test_zero_vector():
    M = PartialCirculant(np.arange(5.0), 3)
    assert np.array_equal(apply_fft(M, np.zeros(5)), np.zeros(3))


def test_spectrum_cached_lazily():
    a = np.random.default_rng(1).standard_normal(12)
    M = PartialCirculant(a, 4)
    assert M.cached_spectrum is None
    apply_fft(M, np.ones(12))
    s = M.cached_spectrum
    assert s is not None and s.size == 12
    assert np.max(np.abs(s - np.fft.fft(a))) <= 1e-10 * np.max(np.abs(s))
    apply_fft(M, np.ones(12))
    assert M.cached_spectrum is s


def test_batch_apply_matches_rows():
    rng = np.random.default_rng(3)
    M = PartialCirculant(rng.standard_normal(10), 6)
    V = rng.standard_normal((4, 10))
    out = apply_fft(M, V)
    for r in range(4):
        assert np.allclose(out[r], apply_naive(M, V[r]), atol=1e-12)


def test_signs():
    D = SignDiagonal([1, -1, 1])
    assert np.array_equal(apply_signs(D, [1.0, 2.0, 3.0]), [1.0, -2.0, 3.0])
    x = np.array([0.5, -4.0, 2.0])
    assert np.array_equal(apply_signs(SignDiagonal([1, 1, 1]), x), x)
    assert np.array_equal(apply_signs(D, apply_signs(D, x)), x)


def test_errors():
    M = PartialCirculant([1.0, 2.0, 3.0], 2)
    with pytest.raises(InvalidArgument):
        apply_naive(M, [1.0, 2.0])
    with pytest.raises(InvalidArgument):
        apply_fft(M, [1.0, 2.0, 3.0, 4.0])
    with pytest.raises(InvalidArgument):
        apply_signs(SignDiagonal([1, -1]), [1.0])
    with pytest.raises(InvalidArgument):
        PartialCirculant([1.0, 2.0], 3)
    with pytest.raises(InvalidArgument):
        SignDiagonal([1, 0, -1])


@settings(max_examples=80, deadline=None)
@given(d=st.integers(2, 64), data=st.data())
def test_fft_matches_naive(d, data):
    k = data.draw(st.integers(1, d))
    seed = data.draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    M = PartialCirculant(rng.standard_normal(d), k)
    v = rng.standard_normal(d)
    ref = apply_naive(M, v)
    assert np.max(np.abs(apply_fft(M, v) - ref)) <= 1e-9 * np.max(np.abs(ref))


@settings(max_examples=50, deadline=None)
@given(d=st.integers(2, 48), alpha=st.floats(-10, 10), beta=st.floats(-10, 10),
       seed=st.integers(0, 2**32 - 1))
def test_linearity(d, alpha, beta, seed):
    rng = np.random.default_rng(seed)
    M = PartialCirculant(rng.standard_normal(d), max(1, d // 2))
    u, v = rng.standard_normal((2, d))
    lhs = apply_fft(M, alpha * u + beta * v)
    rhs = alpha * apply_fft(M, u) + beta * apply_fft(M, v)
    scale = max(1.0, np.max(np.abs(rhs)), abs(alpha) + abs(beta))
    assert np.max(np.abs(lhs - rhs)) <= 1e-9 * scale * d


@settings(max_examples=50, deadline=None)
@given(d=st.integers(1, 64), seed=st.integers(0, 2**32 - 1))
def test_signs_preserve_norm(d, seed):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(d)
    D = SignDiagonal(rng.choice([-1.0, 1.0], d))
    assert abs(np.linalg.norm(apply_signs(D, x)) - np.linalg.norm(x)) <= 1e-12 * np.linalg.norm(x)
