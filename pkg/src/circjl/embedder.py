"""The embedding ``f(x) = M_{a,k} D_kappa x / sqrt(k)`` and pairwise distortion checks."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circulant import PartialCirculant, SignDiagonal, apply_fft, apply_naive
from .errors import InvalidArgument
from .prng import DistributionTag, SeedSpec, draw, rademacher


@dataclass(frozen=True)
class EmbeddingSpec:
    d: int
    k: int
    n: int = 2
    epsilon: float = 0.25
    delta: float = 1.0
    tau: float = 2.0

    def __post_init__(self):
        if not 1 <= self.k <= self.d:
            raise InvalidArgument(f"need 1 <= k <= d, got k={self.k}, d={self.d}")
        if self.n < 2:
            raise InvalidArgument(f"n must be >= 2, got {self.n}")
        if not 0 < self.epsilon < 0.5:
            raise InvalidArgument(f"epsilon must lie in (0, 1/2), got {self.epsilon}")
        if not self.delta > 0:
            raise InvalidArgument(f"delta must be positive, got {self.delta}")
        if not self.tau > 0:
            raise InvalidArgument(f"tau must be positive, got {self.tau}")


@dataclass(frozen=True)
class CirculantEmbedder:
    spec: EmbeddingSpec
    M: PartialCirculant
    Dk: SignDiagonal
    dist: DistributionTag

    def __post_init__(self):
        if self.M.d != self.spec.d or self.Dk.d != self.spec.d or self.M.k != self.spec.k:
            raise InvalidArgument("embedder components disagree with spec dimensions")

    @property
    def scale(self) -> float:
        return 1.0 / math.sqrt(self.spec.k)

    def __call__(self, x):
        return embed_point(self, x)


@dataclass(frozen=True)
class DistortionReport:
    pair_count: int
    max_relative_error: float
    failures: int
    epsilon: float

    @property
    def success(self) -> bool:
        return self.failures == 0

    def to_dict(self) -> dict:
        return {
            "pair_count": self.pair_count,
            "max_relative_error": self.max_relative_error,
            "failures": self.failures,
            "epsilon": self.epsilon,
            "success": self.success,
        }


def choose_k(n: int, epsilon: float, delta: float, tau: float = 2.0,
             failure_budget: float = 1 / 3) -> int:
    """Smallest ``k`` with ``n(n-1) exp(-k eps^2 / (8 tau ln^delta n)) <= failure_budget``.

    ``n(n-1)`` counts both tails over all unordered pairs. The result may
    exceed any particular ``d``; callers clamp.
    """
    if n < 2:
        raise InvalidArgument(f"n must be >= 2, got {n}")
    if not 0 < epsilon < 0.5:
        raise InvalidArgument(f"epsilon must lie in (0, 1/2), got {epsilon}")
    if not delta > 0 or not tau > 0:
        raise InvalidArgument("delta and tau must be positive")
    if not 0 < failure_budget < 1:
        raise InvalidArgument(f"failure_budget must lie in (0, 1), got {failure_budget}")
    log_n = math.log(n)
    k = (8 * tau / epsilon**2) * log_n**delta * math.log(n * (n - 1) / failure_budget)
    return max(1, math.ceil(k))


def build_embedder(spec: EmbeddingSpec, dist: DistributionTag, seed: SeedSpec) -> CirculantEmbedder:
    """Sample ``a`` from ``dist`` and ``kappa`` Rademacher, both from ``seed``'s stream."""
    a, kappa = draw_generator_and_signs(seed, dist, spec.d)
    return CirculantEmbedder(spec, PartialCirculant(a, spec.k), SignDiagonal(kappa), dist)


def draw_generator_and_signs(seed: SeedSpec, dist: DistributionTag, d: int):
    gen = seed.generator()
    a = draw(gen, dist, d)
    kappa = rademacher(gen, d)
    return a, kappa


def embed_point(E: CirculantEmbedder, x, method: str = "fft") -> np.ndarray:
    """Embed one point, or a stack of points along leading axes."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 0 or x.shape[-1] != E.spec.d:
        raise InvalidArgument(f"points must have dimension {E.spec.d}, got shape {x.shape}")
    signed = E.Dk.kappa * x
    if method == "fft":
        y = apply_fft(E.M, signed)
    elif method == "naive":
        y = apply_naive(E.M, signed)
    else:
        raise InvalidArgument(f"method must be 'fft' or 'naive', got {method!r}")
    return E.scale * y


def distortion_report(E: CirculantEmbedder, points, epsilon: float, method: str = "fft") -> DistortionReport:
    """Check ``(1-eps)||xi-xj||^2 <= ||f(xi)-f(xj)||^2 <= (1+eps)||xi-xj||^2`` on all pairs.

    Pairs of coincident points count as successes.
    """
    points = np.asarray(points, dtype=np.float64)
    if points.ndim != 2 or points.shape[0] < 2:
        raise InvalidArgument("need at least 2 points as an (n, d) array")
    if points.shape[1] != E.spec.d:
        raise InvalidArgument(f"points must have dimension {E.spec.d}, got {points.shape[1]}")
    if not epsilon > 0:
        raise InvalidArgument(f"epsilon must be positive, got {epsilon}")
    n = points.shape[0]
    embedded = embed_point(E, points, method=method)
    i, j = np.triu_indices(n, 1)
    before = np.sum((points[i] - points[j]) ** 2, axis=1)
    after = np.sum((embedded[i] - embedded[j]) ** 2, axis=1)
    live = before > 0
    rel = np.zeros_like(before)
    rel[live] = np.abs(after[live] - before[live]) / before[live]
    failures = int(np.count_nonzero(np.abs(after - before) > epsilon * before))
    return DistortionReport(
        pair_count=int(i.size),
        max_relative_error=float(rel.max()) if rel.size else 0.0,
        failures=failures,
        epsilon=float(epsilon),
    )
