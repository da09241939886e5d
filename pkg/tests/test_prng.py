import numpy as np
import pytest

from circjl.errors import InvalidArgument
from circjl.prng import (
    DistributionTag,
    Kind,
    SeedSpec,
    sample_rows,
    sample_vector,
    seed_from_env,
)

ALL = [DistributionTag.gaussian(), DistributionTag.rademacher(), DistributionTag.uniform()]


def test_rademacher_support():
    v = sample_vector(SeedSpec(5), DistributionTag.rademacher(), 4)
    assert set(np.unique(v)) <= {-1.0, 1.0}


def test_gaussian_moments():
    v = sample_vector(SeedSpec(5), DistributionTag.gaussian(), 10**6)
    assert abs(v.mean()) < 0.01
    assert abs(v.var() - 1) < 0.01


@pytest.mark.parametrize("dist", ALL, ids=lambda d: d.name)
def test_same_seed_same_vector(dist):
    s = SeedSpec(123, 9)
    assert np.array_equal(sample_vector(s, dist, 1000), sample_vector(s, dist, 1000))


@pytest.mark.parametrize("dist", ALL, ids=lambda d: d.name)
def test_unit_variance(dist):
    v = sample_vector(SeedSpec(77, 3), dist, 10**6)
    # zero-mean laws: variance is E[X^2], whose standard error is sqrt((m4 - 1)/N)
    m2 = np.mean(v**2)
    se = np.sqrt((np.mean(v**4) - m2**2) / v.size)
    assert abs(m2 - 1) <= 3 * se + 1e-12


def test_uniform_support():
    v = sample_vector(SeedSpec(1), DistributionTag.uniform(), 10**5)
    assert np.all(np.abs(v) <= np.sqrt(3))


def test_streams_uncorrelated():
    g = DistributionTag.gaussian()
    a = sample_vector(SeedSpec(42, 0), g, 10**6)
    b = sample_vector(SeedSpec(42, 1), g, 10**6)
    c = sample_vector(SeedSpec(43, 0), g, 10**6)
    assert abs(np.corrcoef(a, b)[0, 1]) < 0.05
    assert abs(np.corrcoef(a, c)[0, 1]) < 0.05


def test_rows_match_individual_streams():
    rows = sample_rows(9, DistributionTag.gaussian(), 10, 3, 5)
    for r in range(3):
        assert np.array_equal(rows[r], sample_vector(SeedSpec(9, 10 + r), DistributionTag.gaussian(), 5))


def test_eta_is_half_for_builtin_laws():
    assert all(d.eta == 0.5 for d in ALL)


def test_rejects_bad_inputs():
    with pytest.raises(InvalidArgument):
        sample_vector(SeedSpec(1), DistributionTag.gaussian(), 0)
    with pytest.raises(InvalidArgument):
        SeedSpec(-1)
    with pytest.raises(InvalidArgument):
        SeedSpec(2**64)
    with pytest.raises(InvalidArgument):
        DistributionTag(Kind.GAUSSIAN, eta=0.7)
    with pytest.raises(InvalidArgument):
        DistributionTag.parse("cauchy")


def test_seed_from_env(monkeypatch):
    monkeypatch.delenv("CJL_SEED", raising=False)
    assert seed_from_env(default=3) == 3
    monkeypatch.setenv("CJL_SEED", "0x10")
    assert seed_from_env() == 16
    monkeypatch.setenv("CJL_SEED", "nope")
    with pytest.raises(InvalidArgument):
        seed_from_env()
