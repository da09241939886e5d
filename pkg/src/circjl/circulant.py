"""Partial circulant operator and sign diagonal.

``M[i, j] = a[(j - i) mod d]`` for the first ``k`` rows, so row 0 is
``a_0 .. a_{d-1}`` and row 1 starts with ``a_{d-1}``. Applying ``M`` is a
circular cross-correlation of ``a`` with the input, which the FFT path
evaluates in ``O(d log d)`` for any ``d``.
"""

from __future__ import annotations

import threading

import numpy as np

from .errors import InvalidArgument


def _as_vector(v, d, name="v"):
    v = np.asarray(v, dtype=np.float64)
    if v.ndim == 0 or v.shape[-1] != d:
        raise InvalidArgument(f"{name} must have trailing dimension {d}, got shape {v.shape}")
    return v


class PartialCirculant:
    """The ``k x d`` matrix made of the first ``k`` rows of the circulant of ``a``.

    Immutable once built. The spectrum of ``a`` is computed on first use of
    :meth:`apply_fft` and cached; the fill is guarded by a lock.
    """

    __slots__ = ("_a", "_k", "_spectrum", "_lock")

    def __init__(self, a, k: int):
        a = np.array(a, dtype=np.float64)
        if a.ndim != 1 or a.size == 0:
            raise InvalidArgument("generator a must be a non-empty 1-D vector")
        if not 1 <= int(k) <= a.size:
            raise InvalidArgument(f"k must satisfy 1 <= k <= d={a.size}, got {k}")
        a.setflags(write=False)
        self._a = a
        self._k = int(k)
        self._spectrum = None
        self._lock = threading.Lock()

    @property
    def a(self) -> np.ndarray:
        return self._a

    @property
    def d(self) -> int:
        return self._a.size

    @property
    def k(self) -> int:
        return self._k

    @property
    def shape(self):
        return (self._k, self.d)

    @property
    def cached_spectrum(self):
        return self._spectrum

    def spectrum(self) -> np.ndarray:
        """Forward DFT of ``a`` (length ``d``), computed once."""
        if self._spectrum is None:
            with self._lock:
                if self._spectrum is None:
                    s = np.fft.fft(self._a)
                    s.setflags(write=False)
                    self._spectrum = s
        return self._spectrum

    def dense(self) -> np.ndarray:
        """Materialize the ``k x d`` matrix. Meant for checks at small sizes."""
        i = np.arange(self._k)[:, None]
        j = np.arange(self.d)[None, :]
        return self._a[(j - i) % self.d]

    def apply_naive(self, v) -> np.ndarray:
        return apply_naive(self, v)

    def apply_fft(self, v) -> np.ndarray:
        return apply_fft(self, v)

    def __repr__(self):
        return f"PartialCirculant(d={self.d}, k={self.k})"


class SignDiagonal:
    """Diagonal matrix of +-1 entries, stored as its diagonal ``kappa``."""

    __slots__ = ("_kappa",)

    def __init__(self, kappa):
        kappa = np.array(kappa, dtype=np.float64)
        if kappa.ndim != 1 or kappa.size == 0:
            raise InvalidArgument("kappa must be a non-empty 1-D vector")
        if not np.all(np.abs(kappa) == 1.0):
            raise InvalidArgument("kappa entries must be +1 or -1")
        kappa.setflags(write=False)
        self._kappa = kappa

    @property
    def kappa(self) -> np.ndarray:
        return self._kappa

    @property
    def d(self) -> int:
        return self._kappa.size

    def __neg__(self):
        return SignDiagonal(-self._kappa)

    def __repr__(self):
        return f"SignDiagonal(d={self.d})"


def apply_naive(M: PartialCirculant, v) -> np.ndarray:
    """``out[i] = sum_j a[(j - i) mod d] * v[j]``, one row at a time.

    Accepts a single vector or a stack of vectors along the leading axes.
    """
    v = _as_vector(v, M.d)
    out = np.empty(v.shape[:-1] + (M.k,))
    for i in range(M.k):
        # np.roll(a, i)[j] == a[(j - i) mod d]
        out[..., i] = v @ np.roll(M.a, i)
    return out


def apply_fft(M: PartialCirculant, v) -> np.ndarray:
    """Same contract as :func:`apply_naive`, via ``ifft(conj(A) * V)[:k]``."""
    v = _as_vector(v, M.d)
    d = M.d
    half = M.spectrum()[: d // 2 + 1]
    corr = np.fft.irfft(np.conj(half) * np.fft.rfft(v, axis=-1), n=d, axis=-1)
    return corr[..., : M.k]


def apply_signs(Dk: SignDiagonal, x) -> np.ndarray:
    x = _as_vector(x, Dk.d, name="x")
    return Dk.kappa * x


def correlate_batch(a, v, k: int) -> np.ndarray:
    """Row-wise ``apply_fft`` for stacks of generators ``a`` and inputs ``v``.

    ``a`` and ``v`` broadcast against each other over leading axes. Used by
    the Monte-Carlo loops, which draw a fresh generator every trial.
    """
    a = np.asarray(a, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    d = a.shape[-1]
    if v.shape[-1] != d:
        raise InvalidArgument(f"dimension mismatch: a has d={d}, v has {v.shape[-1]}")
    corr = np.fft.irfft(np.conj(np.fft.rfft(a, axis=-1)) * np.fft.rfft(v, axis=-1), n=d, axis=-1)
    return corr[..., :k]
