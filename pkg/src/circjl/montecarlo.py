"""Monte-Carlo frequencies set against the analytic bounds.

Trial ``t`` always draws from stream ``seed.stream_id + t`` of
``seed.master_seed``. Trials are processed in fixed-size chunks; threads
only decide which worker runs which chunk, so every number returned is
bit-identical for any thread count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from . import bounds
from .circulant import correlate_batch
from .decoupling import gram_via_autocorrelation
from .embedder import (
    DistortionReport,
    EmbeddingSpec,
    build_embedder,
    distortion_report,
    draw_generator_and_signs,
)
from .errors import InvalidArgument
from .prng import DistributionTag, Kind, SeedSpec, draw, rademacher

CHUNK = 512
MIN_TAIL_TRIALS = 1_000
MIN_MGF_TRIALS = 10_000
MIN_LM_TRIALS = 10_000
SIGMA_ALLOWANCE = 3.0


@dataclass(frozen=True)
class TailComparison:
    threshold: float
    empirical_freq: float
    std_error: float
    analytic_bound: float
    trials: int
    label: str = ""
    extra: dict = field(default_factory=dict)

    @classmethod
    def from_hits(cls, threshold, hits, trials, analytic_bound, label="", extra=None):
        p = hits / trials
        return cls(
            threshold=float(threshold),
            empirical_freq=p,
            std_error=math.sqrt(p * (1 - p) / trials),
            analytic_bound=float(analytic_bound),
            trials=int(trials),
            label=label,
            extra=dict(extra or {}),
        )

    @property
    def dominated(self) -> bool:
        return self.empirical_freq - SIGMA_ALLOWANCE * self.std_error <= self.analytic_bound

    @property
    def resolved(self) -> bool:
        """False when the bound is too small for this many trials to say anything."""
        return self.analytic_bound >= 10.0 / self.trials

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "threshold": self.threshold,
            "empirical_freq": self.empirical_freq,
            "std_error": self.std_error,
            "analytic_bound": self.analytic_bound,
            "trials": self.trials,
            "dominated": self.dominated,
            "resolution": "ok" if self.resolved else "insufficient resolution",
            **self.extra,
        }


@dataclass(frozen=True)
class MgfEstimate:
    lam: float
    sample_mean: float
    sample_std_error: float
    analytic_bound: float
    trials: int
    centered: str
    dist: str

    @property
    def dominated(self) -> bool:
        return self.sample_mean <= self.analytic_bound + SIGMA_ALLOWANCE * self.sample_std_error

    def to_dict(self) -> dict:
        return {
            "lambda": self.lam,
            "centered": self.centered,
            "dist": self.dist,
            "sample_mean": self.sample_mean,
            "sample_std_error": self.sample_std_error,
            "analytic_bound": self.analytic_bound,
            "trials": self.trials,
            "dominated": self.dominated,
        }


@dataclass(frozen=True)
class SpectralTailReport:
    comparisons: list
    mu_inf_quantiles: dict
    bracket_holds: bool

    def __iter__(self):
        return iter(self.comparisons)

    def __len__(self):
        return len(self.comparisons)

    def __getitem__(self, i):
        return self.comparisons[i]


@dataclass(frozen=True)
class DistortionExperiment:
    reports: list
    target: float = 2 / 3

    @property
    def successes(self) -> int:
        return sum(r.success for r in self.reports)

    @property
    def success_fraction(self) -> float:
        return self.successes / len(self.reports)

    @property
    def passed(self) -> bool:
        return self.success_fraction >= self.target


def _chunks(trials):
    return [(s, min(s + CHUNK, trials)) for s in range(0, trials, CHUNK)]


def _run(trials, fn, threads):
    chunks = _chunks(trials)
    if threads is None or threads <= 1 or len(chunks) == 1:
        parts = [fn(s, e) for s, e in chunks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda c: fn(*c), chunks))
    if isinstance(parts[0], tuple):
        return tuple(np.concatenate(p) for p in zip(*parts))
    return np.concatenate(parts)


def _unit(x, d=None):
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or (d is not None and x.size != d):
        raise InvalidArgument(f"x must be a vector of length {d}")
    if abs(np.linalg.norm(x) - 1.0) > 1e-9:
        raise InvalidArgument("x must be a unit vector")
    return x


def _is_basis_vector(x):
    return np.count_nonzero(x) == 1


def norm_tail_bound(spec: EmbeddingSpec, dist: DistributionTag, theta: float | None = None):
    """Analytic tail bound used for ``dist``, with the parameters behind it."""
    if dist.kind is Kind.GAUSSIAN:
        p = bounds.GaussianTailParams(spec.k, spec.n, spec.epsilon, spec.delta, spec.tau)
        return bounds.gaussian_tail_bound(p), {"bound": "gaussian", "c": p.c_tau}
    if theta is None:
        theta = bounds.suggest_theta(dist.eta, spec.tau)
    p = bounds.SubgaussianParams(dist.eta, theta, spec.tau, spec.delta, spec.n, spec.epsilon)
    value = bounds.subgaussian_tail_bound(p, spec.k)
    return value, {"bound": "subgaussian", "c": p.c_const, "theta": theta,
                   "beta": p.beta, "lambda": p.lam, "eta": dist.eta}


def norm_tail_samples(spec: EmbeddingSpec, dist: DistributionTag, x, trials: int,
                      seed: SeedSpec, threads: int = 1):
    """Per-trial ``||M D x||^2`` (unscaled) and ``||Y||^2 = max mu`` over fresh ``(a, kappa)``."""
    d, k = spec.d, spec.k
    base = seed.stream_id

    def chunk(s, e):
        A = np.empty((e - s, d))
        K = np.empty((e - s, d))
        for r, t in enumerate(range(s, e)):
            A[r], K[r] = draw_generator_and_signs(seed.stream(base + t), dist, d)
        Z = K * x
        values = np.sum(correlate_batch(A, Z, k) ** 2, axis=1)
        mu_inf = np.linalg.eigvalsh(gram_via_autocorrelation(Z, k))[:, -1]
        return values, mu_inf

    return _run(trials, chunk, threads)


def estimate_norm_tail(spec: EmbeddingSpec, dist: DistributionTag, x, side: str, trials: int,
                       seed: SeedSpec, theta: float | None = None, threads: int = 1) -> TailComparison:
    """Frequency of ``||M D x||^2 >= (1+eps)k`` (upper) or ``<= (1-eps)k`` (lower).

    Besides the joint frequency over ``(a, kappa)``, ``extra`` carries the
    frequency conditioned on the sign event ``||mu||_inf <= tau ln^delta n``.
    For a basis vector and Gaussian ``a`` the statistic is exactly chi-square
    with ``k`` degrees of freedom and ``extra["chi2_reference"]`` holds the
    closed-form probability.
    """
    if side not in ("upper", "lower"):
        raise InvalidArgument(f"side must be 'upper' or 'lower', got {side!r}")
    if trials < MIN_TAIL_TRIALS:
        raise InvalidArgument(f"need at least {MIN_TAIL_TRIALS} trials, got {trials}")
    x = _unit(x, spec.d)
    bound, info = norm_tail_bound(spec, dist, theta)

    values, mu_inf = norm_tail_samples(spec, dist, x, trials, seed, threads)
    k, eps = spec.k, spec.epsilon
    threshold = (1 + eps) * k if side == "upper" else (1 - eps) * k
    hit = values >= threshold if side == "upper" else values <= threshold

    level = spec.tau * math.log(spec.n) ** spec.delta
    event = mu_inf <= level
    n_event = int(event.sum())
    extra = {
        "side": side,
        "epsilon": eps,
        "dist": dist.name,
        **info,
        "kappa_event_level": level,
        "kappa_event_freq": n_event / trials,
        "kappa_event_prob_lower": 1.0 - bounds.spectral_bound_raw(spec.d, k, math.sqrt(level)),
        "conditional_freq": (int(hit[event].sum()) / n_event) if n_event else None,
        "conditional_trials": n_event,
    }
    if dist.kind is Kind.GAUSSIAN and _is_basis_vector(x):
        ref = stats.chi2.sf(threshold, k) if side == "upper" else stats.chi2.cdf(threshold, k)
        extra["chi2_reference"] = float(ref)
    return TailComparison.from_hits(threshold, int(hit.sum()), trials, bound, label=side, extra=extra)


def spectral_samples(d: int, k: int, x, trials: int, seed: SeedSpec, threads: int = 1):
    """Per-trial eigenvalues ``mu`` of ``Y Y^T`` (ascending) over fresh sign vectors."""
    x = _unit(x, d)
    base = seed.stream_id

    def chunk(s, e):
        K = np.empty((e - s, d))
        for r, t in enumerate(range(s, e)):
            K[r] = rademacher(seed.stream(base + t).generator(), d)
        mu = np.linalg.eigvalsh(gram_via_autocorrelation(K * x, k))
        return np.clip(mu, 0.0, None)

    return _run(trials, chunk, threads)


def estimate_spectral_tail(d: int, k: int, x, t_grid, trials: int, seed: SeedSpec,
                           threads: int = 1) -> SpectralTailReport:
    """Frequency of ``||Y|| >= t`` for each ``t`` against ``min(1, (d+k) e^{-t^2/2})``."""
    if trials < MIN_TAIL_TRIALS:
        raise InvalidArgument(f"need at least {MIN_TAIL_TRIALS} trials, got {trials}")
    if not 1 <= k <= d:
        raise InvalidArgument(f"need 1 <= k <= d, got k={k}, d={d}")
    mu = spectral_samples(d, k, x, trials, seed, threads)
    mu_inf = mu[:, -1]
    sigma = np.sqrt(mu_inf)
    mu_l1 = mu.sum(axis=1)
    mu_l2 = np.linalg.norm(mu, axis=1)
    bracket = bool(np.all(mu_l2 <= np.sqrt(mu_l1 * mu_inf) * (1 + 1e-12)))

    qs = (0.5, 0.9, 0.99, 0.999)
    quantiles = {f"q{q}": float(np.quantile(mu_inf, q)) for q in qs}
    quantiles["max"] = float(mu_inf.max())

    comparisons = []
    for t in t_grid:
        t = float(t)
        hits = int(np.count_nonzero(sigma >= t))
        comparisons.append(TailComparison.from_hits(
            t, hits, trials, bounds.spectral_bound(d, k, t), label="spectral",
            extra={"d": d, "k": k, "raw_bound": bounds.spectral_bound_raw(d, k, t)},
        ))
    return SpectralTailReport(comparisons, quantiles, bracket)


def chi_square_mixture_samples(alpha, trials: int, seed: SeedSpec, threads: int = 1):
    """Per-trial ``Z = sum_i alpha_i (g_i^2 - 1)`` with standard normal ``g``."""
    alpha = np.asarray(alpha, dtype=np.float64)
    s = alpha.size
    base = seed.stream_id
    gauss = DistributionTag.gaussian()

    def chunk(lo, hi):
        G = np.empty((hi - lo, s))
        for r, t in enumerate(range(lo, hi)):
            G[r] = draw(seed.stream(base + t).generator(), gauss, s)
        return (G * G - 1.0) @ alpha

    return _run(trials, chunk, threads)


def estimate_laurent_massart(alpha, t_grid, trials: int, seed: SeedSpec,
                             threads: int = 1) -> list[TailComparison]:
    """Both chi-square-mixture tails against ``exp(-t)`` for every ``t``.

    Returns, per ``t``, the upper comparison followed by the lower one.
    """
    alpha = np.asarray(alpha, dtype=np.float64)
    if alpha.ndim != 1 or alpha.size == 0 or np.any(alpha < 0):
        raise InvalidArgument("alpha must be a non-empty nonnegative vector")
    if not np.any(alpha > 0):
        raise InvalidArgument("alpha is all zero; Z is identically 0")
    if trials < MIN_LM_TRIALS:
        raise InvalidArgument(f"need at least {MIN_LM_TRIALS} trials, got {trials}")
    Z = chi_square_mixture_samples(alpha, trials, seed, threads)
    out = []
    for t in t_grid:
        t = float(t)
        bound = math.exp(-t)
        up = bounds.laurent_massart_threshold(alpha, t, "upper")
        lo = bounds.laurent_massart_threshold(alpha, t, "lower")
        out.append(TailComparison.from_hits(up, int(np.count_nonzero(Z >= up)), trials, bound,
                                            label="upper", extra={"t": t}))
        out.append(TailComparison.from_hits(-lo, int(np.count_nonzero(Z <= -lo)), trials, bound,
                                            label="lower", extra={"t": t}))
    return out


_SUMS_CACHE: dict = {}
_SUMS_CACHE_SIZE = 16


def weighted_sums(dist: DistributionTag, weights, trials: int, seed: SeedSpec, threads: int = 1):
    """Per-trial ``W = sum_i X_i w_i`` with ``X_i`` i.i.d. from ``dist``.

    Results are memoized (read-only) so a grid over ``lambda`` reuses one set
    of draws. Thread count is not part of the key since it cannot change values.
    """
    w = np.asarray(weights, dtype=np.float64).ravel()
    key = (dist, w.tobytes(), trials, seed)
    hit = _SUMS_CACHE.get(key)
    if hit is not None:
        return hit
    s = w.size
    base = seed.stream_id

    def chunk(lo, hi):
        X = np.empty((hi - lo, s))
        for r, t in enumerate(range(lo, hi)):
            X[r] = draw(seed.stream(base + t).generator(), dist, s)
        return X @ w

    W = _run(trials, chunk, threads)
    W.setflags(write=False)
    if len(_SUMS_CACHE) >= _SUMS_CACHE_SIZE:
        _SUMS_CACHE.pop(next(iter(_SUMS_CACHE)))
    _SUMS_CACHE[key] = W
    return W


CENTERINGS = ("raw", "upper_centered", "lower_centered")


def estimate_mgf(dist: DistributionTag, beta_weights, lam: float, centered: str, trials: int,
                 seed: SeedSpec, threads: int = 1) -> MgfEstimate:
    """Sample mean of ``exp(lam W^2)``, ``exp(lam (W^2-1))`` or ``exp(lam (1-W^2))``."""
    if centered not in CENTERINGS:
        raise InvalidArgument(f"centered must be one of {CENTERINGS}, got {centered!r}")
    w = np.asarray(beta_weights, dtype=np.float64)
    if w.ndim != 1 or abs(np.linalg.norm(w) - 1.0) > 1e-9:
        raise InvalidArgument("beta_weights must be a unit vector")
    if trials < MIN_MGF_TRIALS:
        raise InvalidArgument(f"need at least {MIN_MGF_TRIALS} trials, got {trials}")
    if centered == "raw":
        bound = bounds.mgf_upper_bound(dist.eta, lam)
    elif centered == "upper_centered":
        bound = math.exp(bounds.centered_mgf_bound(dist.eta, lam))
    else:
        bound = math.exp(bounds.lower_centered_mgf_bound(dist.eta, lam))

    W2 = weighted_sums(dist, w, trials, seed, threads) ** 2
    if centered == "raw":
        vals = np.exp(lam * W2)
    elif centered == "upper_centered":
        vals = np.exp(lam * (W2 - 1.0))
    else:
        vals = np.exp(lam * (1.0 - W2))
    return MgfEstimate(
        lam=float(lam),
        sample_mean=float(vals.mean()),
        sample_std_error=float(vals.std(ddof=1) / math.sqrt(trials)),
        analytic_bound=bound,
        trials=int(trials),
        centered=centered,
        dist=dist.name,
    )


def estimate_distortion_success(spec: EmbeddingSpec, dist: DistributionTag, points, repeats: int,
                                seed: SeedSpec, threads: int = 1, method: str = "fft") -> DistortionExperiment:
    """Build ``repeats`` independent embedders (stream ``base + r``) and check every pair."""
    if repeats < 1:
        raise InvalidArgument("repeats must be >= 1")
    points = np.asarray(points, dtype=np.float64)

    def one(r) -> DistortionReport:
        E = build_embedder(spec, dist, seed.stream(seed.stream_id + r))
        return distortion_report(E, points, spec.epsilon, method=method)

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            reports = list(pool.map(one, range(repeats)))
    else:
        reports = [one(r) for r in range(repeats)]
    return DistortionExperiment(reports)


def clear_cache():
    _SUMS_CACHE.clear()
