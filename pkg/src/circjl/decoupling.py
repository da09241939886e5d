"""The decoupled matrix ``Y`` with ``M_{a,k} D_kappa x = Y a``, and its pieces.

``Y[i, j] = x[(i + j) mod d] * kappa[(i + j) mod d]``. Its Gram matrix
``Y Y^T`` is a ``k x k`` section of the circulant built from the circular
autocorrelation of ``z = x * kappa``, which gives a cheap route to the
spectrum used by the Monte-Carlo loops.

``Y`` also decomposes as ``sum_i kappa_i B_i`` with ``B_i = x_i S P^i C``,
where ``P`` is the cyclic down-shift, ``C`` the index reversal
``j -> -j mod d`` and ``S`` keeps the first ``k`` rows. ``P`` and ``C`` are
handled as index maps.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .circulant import SignDiagonal, apply_naive
from .errors import InvalidArgument
from .linalg import jacobi_eigh

UNIT_TOL = 1e-9
FROBENIUS_TOL = 1e-9


def _kappa_array(kappa) -> np.ndarray:
    if isinstance(kappa, SignDiagonal):
        return kappa.kappa
    return SignDiagonal(kappa).kappa


def _check_unit(x):
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise InvalidArgument("x must be a 1-D vector")
    norm = np.linalg.norm(x)
    if abs(norm - 1.0) > UNIT_TOL:
        raise InvalidArgument(f"x must be a unit vector (||x|| = {norm!r}); normalize it first")
    return x


@dataclass(frozen=True)
class SvdFactors:
    U: np.ndarray
    sigma: np.ndarray
    V: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.U * self.sigma) @ self.V.T


@dataclass(frozen=True)
class DecoupledMatrix:
    Y: np.ndarray
    mu: np.ndarray
    sigma_max: float
    svd: SvdFactors = field(repr=False)

    @property
    def k(self) -> int:
        return self.Y.shape[0]

    @property
    def d(self) -> int:
        return self.Y.shape[1]


def y_matrix(x, kappa, k: int) -> np.ndarray:
    """Raw ``k x d`` matrix with rows the left cyclic shifts of ``x * kappa``."""
    z = np.asarray(x, dtype=np.float64) * _kappa_array(kappa)
    d = z.size
    if not 1 <= k <= d:
        raise InvalidArgument(f"need 1 <= k <= d, got k={k}, d={d}")
    idx = (np.arange(k)[:, None] + np.arange(d)[None, :]) % d
    return z[idx]


def svd_factors(Y) -> SvdFactors:
    Y = np.asarray(Y, dtype=np.float64)
    # LAPACK is noticeably faster on the tall orientation
    if Y.shape[0] < Y.shape[1]:
        V, s, Ut = np.linalg.svd(Y.T, full_matrices=False)
        return SvdFactors(U=Ut.T, sigma=s, V=V)
    U, s, Vt = np.linalg.svd(Y, full_matrices=False)
    return SvdFactors(U=U, sigma=s, V=Vt.T)


def build_Y(x, kappa, k: int) -> DecoupledMatrix:
    """Build ``Y`` for unit ``x`` and compute ``mu_j = lambda_j^2`` by SVD.

    ``sum(mu) == k`` is checked on the way out.
    """
    x = _check_unit(x)
    kap = _kappa_array(kappa)
    if kap.size != x.size:
        raise InvalidArgument(f"kappa has length {kap.size}, x has length {x.size}")
    Y = y_matrix(x, kap, k)
    f = svd_factors(Y)
    mu = f.sigma**2
    if abs(mu.sum() - k) > FROBENIUS_TOL * max(1.0, k):
        raise ArithmeticError(f"Frobenius identity failed: sum(mu) = {mu.sum()!r}, k = {k}")
    Y.setflags(write=False)
    return DecoupledMatrix(Y=Y, mu=mu, sigma_max=float(f.sigma[0]), svd=f)


@dataclass(frozen=True)
class DecouplingCheck:
    lhs: float
    rhs: float
    spectral_form: float
    b: np.ndarray = field(repr=False)
    tol: float = 1e-8
    decoupled: DecoupledMatrix | None = field(default=None, repr=False)

    @property
    def ok(self) -> bool:
        ref = max(abs(self.rhs), np.finfo(float).tiny)
        return (abs(self.lhs - self.rhs) / ref <= self.tol
                and abs(self.rhs - self.spectral_form) / ref <= self.tol)


def verify_decoupling(E, x, tol: float = 1e-8) -> DecouplingCheck:
    """Evaluate ``||M D x||^2``, ``||Y a||^2`` and ``||Sigma b||^2`` (``b = V^T a``) separately.

    All three are unscaled (no ``1/sqrt(k)``).
    """
    x = _check_unit(x)
    if x.size != E.spec.d:
        raise InvalidArgument(f"x has length {x.size}, embedder expects {E.spec.d}")
    a = E.M.a
    lhs = float(np.sum(apply_naive(E.M, E.Dk.kappa * x) ** 2))
    D = build_Y(x, E.Dk, E.spec.k)
    rhs = float(np.sum((D.Y @ a) ** 2))
    b = D.svd.V.T @ a
    spectral_form = float(np.sum((D.svd.sigma * b) ** 2))
    return DecouplingCheck(lhs=lhs, rhs=rhs, spectral_form=spectral_form, b=b, tol=tol, decoupled=D)


def shift_index(d: int, power: int) -> np.ndarray:
    """Column of the nonzero in each row of ``P^power`` (``P e_j = e_{j+1}``)."""
    return (np.arange(d) - power) % d


def reversal_index(d: int) -> np.ndarray:
    """Column of the nonzero in each row of ``C``: row ``r`` holds ``e_{-r mod d}``."""
    return (-np.arange(d)) % d


def build_summand(x, i: int, k: int, d: int) -> np.ndarray:
    """Materialize ``B_i = x_i S P^i C`` as a dense ``k x d`` matrix."""
    x = np.asarray(x, dtype=np.float64)
    if x.size != d:
        raise InvalidArgument(f"x has length {x.size}, expected d={d}")
    if not 0 <= i < d:
        raise InvalidArgument(f"summand index must lie in [0, {d}), got {i}")
    if not 1 <= k <= d:
        raise InvalidArgument(f"need 1 <= k <= d, got k={k}")
    # row r of P^i C: P^i picks column shift[r], C maps that row to column rev[shift[r]]
    cols = reversal_index(d)[shift_index(d, i)][:k]
    B = np.zeros((k, d))
    B[np.arange(k), cols] = x[i]
    return B


def summand_sums(x, k: int):
    """Return ``(sum_i B_i B_i^T, sum_i B_i^T B_i)``."""
    x = np.asarray(x, dtype=np.float64)
    d = x.size
    left = np.zeros((k, k))
    right = np.zeros((d, d))
    for i in range(d):
        B = build_summand(x, i, k, d)
        left += B @ B.T
        right += B.T @ B
    return left, right


def compose_from_summands(x, kappa, k: int) -> np.ndarray:
    """``sum_i kappa_i B_i``; equal to ``Y`` entry for entry."""
    x = np.asarray(x, dtype=np.float64)
    kap = _kappa_array(kappa)
    d = x.size
    out = np.zeros((k, d))
    for i in range(d):
        out += kap[i] * build_summand(x, i, k, d)
    return out


def spectral_norm(Y, method: str = "lapack") -> float:
    """Largest singular value of ``Y`` from the eigenvalues of ``Y Y^T``.

    ``Y`` may be a :class:`DecoupledMatrix` or a plain array. ``method`` picks
    LAPACK's symmetric solver or the in-house cyclic Jacobi.
    """
    Y = Y.Y if isinstance(Y, DecoupledMatrix) else np.asarray(Y, dtype=np.float64)
    G = Y @ Y.T
    if method == "lapack":
        top = np.linalg.eigvalsh(G)[-1]
    elif method == "jacobi":
        top = jacobi_eigh(G)[0][0]
    else:
        raise InvalidArgument(f"method must be 'lapack' or 'jacobi', got {method!r}")
    return float(np.sqrt(max(top, 0.0)))


def gram_via_autocorrelation(z, k: int) -> np.ndarray:
    """``Y Y^T`` for ``Y`` built from ``z = x * kappa``, without forming ``Y``.

    ``(Y Y^T)[i, l] = r[(l - i) mod d]`` with ``r`` the circular
    autocorrelation of ``z``. Works on stacks of ``z`` along leading axes.
    """
    z = np.asarray(z, dtype=np.float64)
    d = z.shape[-1]
    zf = np.fft.rfft(z, axis=-1)
    r = np.fft.irfft(zf.real**2 + zf.imag**2, n=d, axis=-1)
    lag = (np.arange(k)[None, :] - np.arange(k)[:, None]) % d
    return r[..., lag]
