import numpy as np
import pytest

from circjl.errors import InvalidArgument
from circjl.linalg import jacobi_eigh


@pytest.mark.parametrize("n", [1, 2, 5, 17, 40])
def test_jacobi_matches_lapack(n):
    rng = np.random.default_rng(n)
    A = rng.standard_normal((n, n))
    A = A + A.T
    w, V = jacobi_eigh(A)
    assert np.allclose(w, np.linalg.eigvalsh(A)[::-1], rtol=1e-10, atol=1e-10)
    assert np.abs(V.T @ V - np.eye(n)).max() <= 1e-10
    assert np.abs(V @ np.diag(w) @ V.T - A).max() <= 1e-9 * max(1, np.abs(A).max())


def test_jacobi_diagonal_and_zero():
    w, _ = jacobi_eigh(np.diag([3.0, -1.0, 2.0]))
    assert np.array_equal(w, [3.0, 2.0, -1.0])
    w, _ = jacobi_eigh(np.zeros((3, 3)))
    assert np.array_equal(w, np.zeros(3))


def test_jacobi_rejects_nonsymmetric():
    with pytest.raises(InvalidArgument):
        jacobi_eigh(np.array([[1.0, 2.0], [0.0, 1.0]]))
