from __future__ import annotations

import math

import numpy as np
import pytest
from scipy import integrate, stats

from chordwalk.geometry import make_body
from chordwalk.oracle import (
    AcceptanceStats,
    RejectionError,
    RejectionSampler,
    exact_ball,
    exact_simplex,
    oracle_for,
    rejection,
)
from chordwalk.quantum import bloch_to_density, is_ppt, min_eigenvalue

N_DRAWS = 1_000_000


@pytest.mark.parametrize("d,r", [(1, 1.0), (3, 1.0), (5, 0.7)])
def test_exact_ball_moments(d, r, rng):
    X = exact_ball(d, r, rng, N_DRAWS)
    r2 = np.einsum("ij,ij->i", X, X)
    assert r2.max() <= r * r * (1 + 1e-15)
    sigma = r2.std() / math.sqrt(N_DRAWS)
    assert abs(r2.mean() - d * r * r / (d + 2)) <= 3 * sigma


def test_exact_ball_d1_is_uniform(rng):
    X = exact_ball(1, 1.0, rng, N_DRAWS)[:, 0]
    assert stats.kstest(X, stats.uniform(-1, 2).cdf).statistic <= 0.002


def test_exact_ball_single_draw(rng):
    assert exact_ball(4, 1.0, rng).shape == (4,)


@pytest.mark.parametrize("N", [2, 3, 5])
def test_exact_simplex_moments(N, rng):
    P = exact_simplex(N, rng, N_DRAWS)
    assert np.abs(P.sum(axis=1) - 1).max() < 1e-14
    assert P.min() >= 0
    mean_sigma = P.std(axis=0) / math.sqrt(N_DRAWS)
    assert np.all(np.abs(P.mean(axis=0) - 1 / N) <= 3 * mean_sigma)
    var = P.var(axis=0)
    c = P - P.mean(axis=0)
    var_sigma = np.sqrt(((c ** 4).mean(axis=0) - var ** 2) / N_DRAWS)
    assert np.all(np.abs(var - (N - 1) / (N * N * (N + 1))) <= 3 * var_sigma)


def test_simplex_variance_formula_by_quadrature():
    # N = 2: the first coordinate is uniform on [0, 1]
    m1 = integrate.quad(lambda x: x, 0, 1)[0]
    m2 = integrate.quad(lambda x: x * x, 0, 1)[0]
    assert m2 - m1 ** 2 == pytest.approx((2 - 1) / (4 * 3), rel=1e-12)


def test_rejection_always_accept(rng):
    s = AcceptanceStats()
    x = rejection(lambda g: g.random(2), lambda p: True, rng, stats=s)
    assert x.shape == (2,)
    assert (s.proposed, s.accepted, s.rate) == (1, 1, 1.0)


def test_rejection_gives_up(rng):
    with pytest.raises(RejectionError):
        rejection(lambda g: g.random(2), lambda p: False, rng, max_tries=100)
    rs = RejectionSampler(lambda k, g: g.random((k, 2)), lambda X: np.zeros(len(X), bool), max_tries=5000)
    with pytest.raises(RejectionError):
        rs(10, rng)


def test_acceptance_stats_stderr():
    s = AcceptanceStats(proposed=10_000, accepted=2500)
    assert s.rate == 0.25
    assert s.stderr == pytest.approx(math.sqrt(0.25 * 0.75 / 10_000))
    assert math.isnan(AcceptanceStats().rate)


def test_birkhoff3_rejection_samples_are_bistochastic(rng):
    body = make_body("birkhoff:n=3")
    o = oracle_for(body)
    assert not o.exact
    X = o.sample(20_000, rng)
    M = body.to_ambient(X)
    assert M.min() >= -1e-12
    assert np.allclose(M.sum(axis=1), 1, atol=1e-12) and np.allclose(M.sum(axis=2), 1, atol=1e-12)
    assert 0 < o.stats.rate < 1 and o.stats.stderr < 0.01


def test_density2_rejection_accepts_everything(rng):
    o = oracle_for(make_body("density:n=2"))
    o.sample(10_000, rng)
    assert o.stats.rate == 1.0


def test_stochastic_oracle_columns_are_simplex_draws(rng):
    body = make_body("stochastic:n=3")
    T = body.to_ambient(oracle_for(body).sample(200_000, rng))
    assert np.allclose(T.sum(axis=1), 1, atol=1e-14) and T.min() >= 0
    # each column is Dirichlet(1, 1, 1): mean 1/3, variance 2/36
    assert np.abs(T.mean(axis=0) - 1 / 3).max() < 0.005
    assert np.abs(T.var(axis=0) - 2 / 36).max() < 0.002
    # distinct columns independent
    assert abs(np.corrcoef(T[:, 0, 0], T[:, 0, 1])[0, 1]) < 0.01


def test_ppt_oracle_states_are_ppt(rng):
    body = make_body("ppt:k=2")
    X = oracle_for(body).sample(2000, rng)
    rho = bloch_to_density(X, body.basis)
    assert np.all(min_eigenvalue(rho) >= -1e-10)
    assert np.all(is_ppt(rho, 2, 1e-10))


@pytest.mark.parametrize("desc", ["birkhoff:n=5", "density:n=4", "ppt:k=3", "lifted:density=tent@ball:d=1"])
def test_oracle_unavailable(desc):
    assert oracle_for(make_body(desc)) is None


@pytest.mark.parametrize("desc,exact", [("ball:d=3", True), ("box:d=4", True), ("simplex:n=4", True),
                                        ("stochastic:n=3", True), ("birkhoff:n=3", False),
                                        ("birkhoff:n=4", False), ("density:n=2", False),
                                        ("density:n=3", False), ("ppt:k=2", False)])
def test_oracle_draws_are_members(desc, exact, rng):
    body = make_body(desc)
    o = oracle_for(body)
    assert o.exact is exact
    X = o.sample(1000, rng)
    assert X.shape == (1000, body.d)
    assert body.contains_many(X).all()
