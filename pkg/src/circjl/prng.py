"""Counter-based random streams.

Every stream is a Philox4x64 generator keyed by ``(master_seed, stream_id)``,
so splitting off trial ``i`` costs one key setup and never depends on how
many other streams were consumed or on which thread asks for it.
"""

from __future__ import annotations

import enum
import math
import os
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument

U64_MAX = 2**64 - 1
SQRT3 = math.sqrt(3.0)

# Reserved stream for auxiliary data (test point sets, random unit vectors)
# so it never collides with per-trial streams 0, 1, 2, ...
AUX_STREAM = U64_MAX


@dataclass(frozen=True)
class SeedSpec:
    master_seed: int
    stream_id: int = 0

    def __post_init__(self):
        for name in ("master_seed", "stream_id"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or not 0 <= value <= U64_MAX:
                raise InvalidArgument(f"{name} must be an unsigned 64-bit integer, got {value!r}")

    def stream(self, stream_id: int) -> "SeedSpec":
        return SeedSpec(self.master_seed, stream_id)

    def generator(self) -> np.random.Generator:
        key = np.array([self.master_seed, self.stream_id], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))


def seed_from_env(default: int = 0) -> int:
    """Master seed from ``CJL_SEED``, or ``default`` when unset."""
    raw = os.environ.get("CJL_SEED")
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw, 0)
    except ValueError as exc:
        raise InvalidArgument(f"CJL_SEED is not an integer: {raw!r}") from exc
    if not 0 <= value <= U64_MAX:
        raise InvalidArgument(f"CJL_SEED out of u64 range: {value}")
    return value


class Kind(enum.Enum):
    GAUSSIAN = "gaussian"
    RADEMACHER = "rademacher"
    UNIFORM = "uniform"


@dataclass(frozen=True)
class DistributionTag:
    """A unit-variance scalar law together with its subgaussian constant ``eta``.

    ``eta`` is the constant in ``E exp(tX) <= exp(eta t^2)``. All three
    built-in laws admit ``eta = 1/2``: Gaussian with equality, Rademacher via
    ``cosh t <= exp(t^2/2)``, and uniform on ``[-sqrt3, sqrt3]`` via
    ``sinh(s)/s <= exp(s^2/6)``.
    """

    kind: Kind
    eta: float = 0.5

    def __post_init__(self):
        if not 0.0 < self.eta <= 0.5:
            raise InvalidArgument(f"eta must lie in (0, 1/2], got {self.eta}")

    @classmethod
    def gaussian(cls) -> "DistributionTag":
        return cls(Kind.GAUSSIAN)

    @classmethod
    def rademacher(cls) -> "DistributionTag":
        return cls(Kind.RADEMACHER)

    @classmethod
    def uniform(cls) -> "DistributionTag":
        return cls(Kind.UNIFORM)

    @classmethod
    def parse(cls, name: str) -> "DistributionTag":
        try:
            return cls(Kind(name.lower()))
        except ValueError as exc:
            choices = ", ".join(k.value for k in Kind)
            raise InvalidArgument(f"unknown distribution {name!r}; choose from {choices}") from exc

    @property
    def name(self) -> str:
        return self.kind.value


def draw(gen: np.random.Generator, dist: DistributionTag, size) -> np.ndarray:
    """Draw i.i.d. samples of ``dist`` from an existing generator."""
    if dist.kind is Kind.GAUSSIAN:
        # numpy's ziggurat uses fixed tables, so output is platform-stable
        return gen.standard_normal(size)
    if dist.kind is Kind.RADEMACHER:
        return rademacher(gen, size)
    return gen.uniform(-SQRT3, SQRT3, size)


def rademacher(gen: np.random.Generator, size) -> np.ndarray:
    return 2.0 * gen.integers(0, 2, size=size, dtype=np.int8).astype(np.float64) - 1.0


def sample_vector(seed: SeedSpec, dist: DistributionTag, length: int) -> np.ndarray:
    """Return ``length`` i.i.d. draws of ``dist`` from the stream named by ``seed``."""
    if int(length) < 1:
        raise InvalidArgument(f"length must be >= 1, got {length}")
    return draw(seed.generator(), dist, int(length))


def sample_rows(master_seed: int, dist: DistributionTag, first: int, count: int,
                length: int) -> np.ndarray:
    """Stack rows ``first .. first+count-1``, row ``r`` drawn from stream ``r``."""
    out = np.empty((count, length))
    for r in range(count):
        out[r] = draw(SeedSpec(master_seed, first + r).generator(), dist, length)
    return out


def random_unit_vector(seed: SeedSpec, d: int) -> np.ndarray:
    v = sample_vector(seed, DistributionTag.gaussian(), d)
    return v / np.linalg.norm(v)
