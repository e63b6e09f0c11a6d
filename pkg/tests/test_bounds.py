from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chordwalk.bounds import (
    AccessibilityError,
    RateBound,
    body_bound,
    bound_fixed_basis,
    bound_random_direction,
    sphere_surface,
    steps_to_tolerance,
    tv_envelope,
    unit_ball_volume,
)
from chordwalk.geometry import make_body


def test_unit_ball_volume_examples():
    assert unit_ball_volume(1) == pytest.approx(2.0, rel=1e-15)
    assert unit_ball_volume(2) == pytest.approx(math.pi, rel=1e-15)
    assert unit_ball_volume(3) == pytest.approx(4 * math.pi / 3, rel=1e-15)
    with pytest.raises(ValueError):
        unit_ball_volume(0)


def test_sphere_surface_examples():
    assert sphere_surface(2) == pytest.approx(2 * math.pi, rel=1e-15)
    assert sphere_surface(3) == pytest.approx(4 * math.pi, rel=1e-15)
    with pytest.raises(ValueError):
        sphere_surface(1)


@pytest.mark.parametrize("d", range(2, 40))
def test_sphere_surface_is_d_times_ball_volume(d):
    assert sphere_surface(d) == pytest.approx(d * unit_ball_volume(d), rel=1e-12)


def test_fixed_basis_ball_example():
    b = bound_fixed_basis(3, 3, 3, 1.0)
    assert b.M == 6
    assert b.theta == pytest.approx((4 * math.pi / 3) / 729, rel=1e-14)
    assert b.theta == pytest.approx(5.745e-3, rel=1e-3)


def test_fixed_basis_birkhoff_example():
    b = bound_fixed_basis(4, 8, 36, 0.5)
    assert b.M == 12
    assert b.theta == pytest.approx(math.pi ** 2 / 2 * 36.0 ** -12 * 2.0 ** -12, rel=1e-13)


@pytest.mark.parametrize("d", [2, 3, 5])
def test_fixed_basis_cube_closed_form(d):
    b = bound_fixed_basis(d, d, d, 1 / math.sqrt(d))
    assert b.M == 2 * d
    assert b.theta == pytest.approx(unit_ball_volume(d) * d ** (-3 * d), rel=1e-13)


def test_random_direction_ball_example():
    b = bound_random_direction(2, 1.0, "as_stated")
    assert (b.M, b.theta, b.alpha, b.C) == (1, 0.5, 0.5, 4.0)
    assert bound_random_direction(2, 1.0).theta == 0.25


@pytest.mark.parametrize("d", [2, 3, 5])
def test_random_direction_cube_closed_form(d):
    b = bound_random_direction(d, 1 / math.sqrt(d), "as_stated")
    sd = math.sqrt(d)
    assert b.alpha == pytest.approx(1 - (2 / d) / ((sd + 1) ** (d - 1) * sd), rel=1e-14)


def test_body_bound_simplex_fixed_basis():
    for N in (3, 4, 6):
        d = N - 1
        b = body_bound(make_body(f"simplex:n={N}"), "fixed_basis")
        assert b.M == 2 * d
        assert b.theta == pytest.approx(unit_ball_volume(d) * d ** (-4 * d), rel=1e-12)


def test_body_bound_simplex_three():
    b = body_bound(make_body("simplex:n=3"), "fixed_basis")
    assert b.M == 4 and b.theta == pytest.approx(math.pi / 256, rel=1e-13)


@pytest.mark.parametrize("N", [2, 3])
def test_body_bound_density_random_direction(N):
    d = N * N - 1
    b = body_bound(make_body(f"density:n={N}"), "random_direction", "as_stated")
    assert b.alpha == pytest.approx(1 - (2 / d) / (N ** (d - 1) * (N - 1)), rel=1e-14)


def test_body_bound_ppt_fixed_basis_refused():
    with pytest.raises(AccessibilityError, match="no accessibility constant"):
        body_bound(make_body("ppt:k=2"), "fixed_basis")
    assert body_bound(make_body("ppt:k=2"), "random_direction").M == 1


def test_body_bound_birkhoff_fixed_uses_exact_move_count():
    body = make_body("birkhoff:n=3")
    m = body.meta
    b = body_bound(body, "fixed_basis")
    assert b.M == 12
    assert b.log_theta == pytest.approx(
        math.log(unit_ball_volume(4)) - 12 * math.log(36) + 12 * math.log(m.r / m.R), rel=1e-14)


def test_large_birkhoff_theta_underflows_but_log_is_finite():
    b = body_bound(make_body("birkhoff:n=6"), "fixed_basis")
    assert b.theta == 0.0
    assert math.isfinite(b.log10_theta) and b.log10_theta < -300
    assert b.alpha == 1.0 and b.log_alpha <= 0
    assert steps_to_tolerance(b, 0.1) == math.inf


def test_tv_envelope_examples():
    b = bound_random_direction(2, 1.0, "as_stated")
    assert tv_envelope(b, 0) == 2.0
    assert tv_envelope(b, 10) == pytest.approx(2.0 ** -8, rel=1e-14)
    with pytest.raises(ValueError):
        tv_envelope(b, -1)


def test_steps_to_tolerance():
    b = bound_random_direction(2, 1.0, "as_stated")
    n = steps_to_tolerance(b, 2.0 ** -8)
    assert n == 10
    assert tv_envelope(b, n) <= 2.0 ** -8 * (1 + 1e-12) and tv_envelope(b, n - 1) > 2.0 ** -8


def test_rate_bound_rejects_theta_at_least_one():
    with pytest.raises(ValueError):
        RateBound(1, 0.0)
    with pytest.raises(ValueError):
        bound_fixed_basis(1, 1, 1, 1.0)


@settings(max_examples=200, deadline=None)
@given(d=st.integers(2, 60), mu=st.floats(1e-3, 1.0))
def test_conservative_is_half_of_as_stated(d, mu):
    a = bound_random_direction(d, mu, "as_stated")
    c = bound_random_direction(d, mu, "conservative")
    assert c.theta <= a.theta
    assert c.log_theta - a.log_theta == pytest.approx(-math.log(2), abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(d=st.integers(2, 12), k=st.integers(1, 30), l=st.integers(1, 40), mu=st.floats(0.05, 1.0))
def test_rate_bound_consistency(d, k, l, mu):
    l = max(l, d)
    b = bound_fixed_basis(d, k, l, mu)
    assert 0 < b.theta < 1 or b.theta == 0.0
    if b.theta > 0:
        assert b.alpha == pytest.approx((1 - b.theta) ** (1 / b.M), rel=1e-14)
        assert b.C == pytest.approx(2 / (1 - b.theta), rel=1e-14)


@settings(max_examples=100, deadline=None)
@given(d=st.integers(2, 30), mu=st.floats(0.01, 1.0), n=st.integers(0, 10_000))
def test_tv_envelope_bounded_and_monotone(d, mu, n):
    b = bound_random_direction(d, mu)
    assert 0 <= tv_envelope(b, n + 1) <= tv_envelope(b, n) <= 2.0
