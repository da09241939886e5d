"""Closed-form tail and MGF bounds for circulant embeddings.

Logarithms are natural throughout. Probability-valued bounds are clamped to
``[0, 1]``; the ``*_raw`` variants return the unclamped expression, which
exceeds 1 for small ``t`` or ``k``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument, OutOfDomain, RegimeViolation


def _clamp(p: float) -> float:
    return min(1.0, max(0.0, p))


def c_tau(tau: float) -> float:
    """Gaussian tail constant ``1 / (8 tau)``."""
    if not tau > 0:
        raise InvalidArgument(f"tau must be positive, got {tau}")
    return 1.0 / (8.0 * tau)


@dataclass(frozen=True)
class GaussianTailParams:
    k: int
    n: int
    epsilon: float
    delta: float
    tau: float = 2.0

    def __post_init__(self):
        if self.k < 1:
            raise InvalidArgument(f"k must be >= 1, got {self.k}")
        if self.n < 2:
            raise InvalidArgument(f"n must be >= 2, got {self.n}")
        if not 0 < self.epsilon < 0.5:
            raise InvalidArgument(f"epsilon must lie in (0, 1/2), got {self.epsilon}")
        if not self.delta > 0:
            raise InvalidArgument(f"delta must be positive, got {self.delta}")
        if not self.tau > 0:
            raise InvalidArgument(f"tau must be positive, got {self.tau}")

    @property
    def c_tau(self) -> float:
        return c_tau(self.tau)

    @property
    def log_factor(self) -> float:
        """``ln(n) ** delta``."""
        return math.log(self.n) ** self.delta

    @property
    def exponent(self) -> float:
        """The ``t`` for which the bound equals ``exp(-t)``."""
        return self.c_tau * self.k * self.epsilon**2 / self.log_factor

    @property
    def kappa_event_level(self) -> float:
        """Cut-off ``tau ln^delta n`` for the event on ``||mu||_inf``."""
        return self.tau * self.log_factor


def spectral_bound_raw(d: int, k: int, t: float) -> float:
    if t < 0:
        raise InvalidArgument(f"t must be nonnegative, got {t}")
    return (d + k) * math.exp(-t * t / 2.0)


def spectral_bound(d: int, k: int, t: float) -> float:
    """Upper bound on ``P(||Y|| >= t)``: ``min(1, (d+k) exp(-t^2/2))``."""
    return _clamp(spectral_bound_raw(d, k, t))


def gaussian_tail_bound(p: GaussianTailParams) -> float:
    """``exp(-c(tau) k eps^2 / ln^delta n)``, bounding each tail of ``||f(x)||^2``."""
    return math.exp(-p.exponent)


@dataclass(frozen=True)
class SubgaussianParams:
    """Parameters of the subgaussian tail bound and its validity regime.

    ``theta`` is free in ``(0, min(1, 1/(8 eta tau)))``; :func:`suggest_theta`
    returns the maximizer of the constant ``c_const``.
    """

    eta: float
    theta: float
    tau: float
    delta: float
    n: int
    epsilon: float

    def __post_init__(self):
        if not 0 < self.eta <= 0.5:
            raise InvalidArgument(f"eta must lie in (0, 1/2], got {self.eta}")
        if not self.theta > 0:
            raise InvalidArgument(f"theta must be positive, got {self.theta}")
        if not self.tau > 0 or not self.delta > 0:
            raise InvalidArgument("tau and delta must be positive")
        if self.n < 2:
            raise InvalidArgument(f"n must be >= 2, got {self.n}")
        if not 0 < self.epsilon < 0.5:
            raise InvalidArgument(f"epsilon must lie in (0, 1/2), got {self.epsilon}")

    @property
    def log_n(self) -> float:
        return math.log(self.n)

    @property
    def beta(self) -> float:
        return self.theta * self.epsilon / (self.tau * self.log_n ** (2 * self.delta))

    @property
    def lam(self) -> float:
        """Laplace parameter, chosen so that ``2 * lam * eta == beta``."""
        return self.theta * self.epsilon / (2 * self.eta * self.tau * self.log_n ** (2 * self.delta))

    @property
    def c_const(self) -> float:
        return self.theta * (1.0 / (2 * self.tau * self.eta) - 4 * self.theta)

    def violations(self) -> list[str]:
        """Human-readable list of the regime inequalities that fail."""
        failed = []
        theta_cap = min(1.0, 1.0 / (8 * self.eta * self.tau))
        if not self.theta < theta_cap:
            failed.append(f"theta < min(1, 1/(8*eta*tau)) = {theta_cap:.6g} (theta={self.theta:.6g})")
        if not self.beta < 0.5:
            failed.append(f"beta < 1/2 (beta={self.beta:.6g})")
        eta_floor = 0.5 * (1 - self.beta**2) / (1 + self.beta**2)
        if not eta_floor <= self.eta <= 0.5:
            failed.append(
                f"(1/2)(1-beta^2)/(1+beta^2) <= eta <= 1/2 (floor={eta_floor:.6g}, eta={self.eta:.6g})"
            )
        largeness = 2 * self.theta * self.epsilon / self.log_n**self.delta
        if not largeness < 0.5:
            failed.append(f"2*theta*eps/ln^delta(n) < 1/2 (value={largeness:.6g})")
        return failed

    @property
    def regime_valid(self) -> bool:
        return not self.violations()

    def check(self) -> "SubgaussianParams":
        failed = self.violations()
        if failed:
            raise RegimeViolation(failed)
        return self


def suggest_theta(eta: float, tau: float) -> float:
    """``1/(16 eta tau)``, the maximizer of ``theta (1/(2 tau eta) - 4 theta)``."""
    return 1.0 / (16.0 * eta * tau)


def subgaussian_tail_bound(p: SubgaussianParams, k: int) -> float:
    """``exp(-c k eps^2 / ln^{2 delta} n)``; refuses outside the valid regime."""
    p.check()
    if k < 1:
        raise InvalidArgument(f"k must be >= 1, got {k}")
    return math.exp(-p.c_const * k * p.epsilon**2 / p.log_n ** (2 * p.delta))


def laurent_massart_threshold(alpha, t: float, side: str) -> float:
    """Deviation level for ``Z = sum alpha_i (a_i^2 - 1)`` at confidence ``exp(-t)``.

    ``side="upper"`` gives ``2||alpha||_2 sqrt(t) + 2||alpha||_inf t`` (bounding
    ``P(Z >=`` it ``)``); ``side="lower"`` gives ``2||alpha||_2 sqrt(t)``, bounding
    ``P(Z <= -`` it ``)``.
    """
    alpha = np.asarray(alpha, dtype=np.float64)
    if alpha.ndim != 1 or alpha.size == 0 or np.any(alpha < 0):
        raise InvalidArgument("alpha must be a non-empty vector of nonnegative numbers")
    if not t > 0:
        raise InvalidArgument(f"t must be positive, got {t}")
    l2 = float(np.linalg.norm(alpha))
    if side == "upper":
        return 2 * l2 * math.sqrt(t) + 2 * float(alpha.max()) * t
    if side == "lower":
        return 2 * l2 * math.sqrt(t)
    raise InvalidArgument(f"side must be 'upper' or 'lower', got {side!r}")


def _check_mgf_domain(eta: float, lam: float):
    if not 0 < eta <= 0.5:
        raise OutOfDomain(f"eta must lie in (0, 1/2], got {eta}")
    if not lam > 0:
        raise OutOfDomain(f"lambda must be positive, got {lam}")
    if not lam < 1.0 / (4 * eta):
        raise OutOfDomain(f"lambda must be < 1/(4 eta) = {1 / (4 * eta):.6g}, got {lam}")


def mgf_upper_bound(eta: float, lam: float) -> float:
    """Bound on ``E exp(lam W^2)``: ``(1 - 4 eta lam)^(-1/2)``."""
    _check_mgf_domain(eta, lam)
    return 1.0 / math.sqrt(1.0 - 4 * eta * lam)


def centered_mgf_bound(eta: float, lam: float) -> float:
    """Bound on ``log E exp(lam (W^2 - 1))``: ``8 eta^2 lam^2 / (1 - 4 eta lam)``."""
    _check_mgf_domain(eta, lam)
    return 8 * eta**2 * lam**2 / (1.0 - 4 * eta * lam)


def lower_mgf_violations(eta: float, lam: float) -> list[str]:
    beta = 2 * lam * eta
    failed = []
    if not beta < 0.5:
        failed.append(f"2*lambda*eta < 1/2 (value={beta:.6g})")
    floor = 0.5 * (1 - beta**2) / (1 + beta**2)
    if not floor <= eta <= 0.5:
        failed.append(f"(1/2)(1-beta^2)/(1+beta^2) <= eta <= 1/2 (floor={floor:.6g}, eta={eta:.6g})")
    return failed


def lower_centered_mgf_bound(eta: float, lam: float) -> float:
    """Same expression as :func:`centered_mgf_bound`, for ``log E exp(lam (1 - W^2))``.

    Only valid when ``beta = 2 lam eta < 1/2`` and
    ``(1/2)(1-beta^2)/(1+beta^2) <= eta``; raises :class:`RegimeViolation` otherwise.
    """
    _check_mgf_domain(eta, lam)
    failed = lower_mgf_violations(eta, lam)
    if failed:
        raise RegimeViolation(failed)
    return centered_mgf_bound(eta, lam)


def gaussian_centered_log_mgf(lam: float) -> float:
    """Exact ``log E exp(lam (g^2 - 1))`` for standard normal ``g``, ``lam < 1/2``."""
    return -0.5 * math.log1p(-2 * lam) - lam
