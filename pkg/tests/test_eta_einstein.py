import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sasaki3.curvature import curvature
from sasaki3.errors import DomainError, RankDeficientError
from sasaki3.eta_einstein import (EtaEinsteinFamily, euler_metric, euler_pullback_residual,
                                  euler_transform, eta_einstein_residual, fit_eta_einstein,
                                  random_euler_points, scalar_curvature_sign, sign_class,
                                  sign_table_row)
from sasaki3.sasaki import build_normal_form, reduced_system_check, verify_sasakian
from sasaki3 import jets as J
from conftest import FAMILY_GRID, family


@settings(max_examples=50)
@given(st.floats(-10, 10, allow_nan=False))
def test_family_constants(W):
    fam = EtaEinsteinFamily(W)
    assert fam.a + fam.b == pytest.approx(2)
    assert 3 * fam.a + fam.b == pytest.approx(fam.scalar_curvature)
    assert fam.sign == sign_class(W)


@pytest.mark.parametrize("W", FAMILY_GRID)
def test_family_grid(W):
    s = family(W)
    pts = s.sample_points(8, seed=11)
    assert verify_sasakian(s, pts).passed
    fit = fit_eta_einstein(s, pts)
    assert fit.a == pytest.approx(2 * W - 2, abs=1e-6)
    assert fit.a + fit.b == pytest.approx(2, abs=1e-6)
    assert fit.is_eta_einstein
    for p in pts[:3]:
        assert curvature(s.metric, p).scalar == pytest.approx(4 * W - 2, abs=1e-6)
    assert max(reduced_system_check(s, pts[:3]).values()) < 1e-6


@pytest.mark.parametrize("W", [w for w in FAMILY_GRID if w != 0])
def test_omega0_closed_form_is_gauge_equivalent(W):
    # closed forms and quadrature share the v0 = 0 gauge, so they agree pointwise
    s = family(W)
    fam = EtaEinsteinFamily(W)
    for _, u, v in s.sample_points(5, seed=2):
        assert fam.omega0_closed_form(u, v) == pytest.approx(s.omega0(u, v), abs=1e-9)


def test_examples_from_the_family_table(round_s3, nil):
    p = round_s3.sample_points(3)
    assert eta_einstein_residual(round_s3, 2, 0, p) < 1e-8
    assert eta_einstein_residual(nil, -2, 4, p) < 1e-8
    assert eta_einstein_residual(nil, 0, 0, p) > 1


def test_non_constant_curvature_is_flagged():
    s = build_normal_form(lambda u, v: J.exp(u * u))
    fit = fit_eta_einstein(s, s.sample_points(8))
    assert not fit.is_eta_einstein


def test_fit_needs_two_samples(nil):
    with pytest.raises(RankDeficientError):
        fit_eta_einstein(nil, nil.sample_points(1))


def test_sign_table():
    assert [sign_table_row(W) for W in (0.4, 0.5, 0.6)] == ["R<0", "R=0", "R>0"]
    assert [scalar_curvature_sign(W) for W in (0.4, 0.5, 0.6)] == [-1, 0, 1]


# Euler coordinates --------------------------------------------------------------

def test_euler_transform_examples():
    r, u, v = euler_transform(2.0, 0.3, 0.0, 0.4)
    assert (r, u, v) == pytest.approx(((0.3 + 0.4) / 2, 0, 0))
    _, u, v = euler_transform(1.0, 0.1, np.pi / 2, 0.0)
    assert (u, v) == pytest.approx((1.0, 0.0))
    _, u, v = euler_transform(-1.0, 0.0, 1.0, np.pi / 2)
    assert (u, v) == pytest.approx((0.0, np.tanh(0.5)))


def test_euler_metric_at_equator():
    g = euler_metric(2.0, (0.0, np.pi / 2, 0.0))
    assert np.allclose(g, np.diag([0.25, 0.25, 0.25]), atol=1e-15)


@pytest.mark.parametrize("W", [-3.0, -2.0, -0.5, 0.5, 1.0, 2.0, 3.0])
def test_euler_pullback(W):
    s = family(W)
    for q in random_euler_points(W, 10, seed=7):
        res = euler_pullback_residual(W, q, s)
        assert res["metric"] < 1e-6 and res["contact"] < 1e-6


def test_euler_domain_errors():
    with pytest.raises(DomainError):
        euler_transform(0.0, 0.0, 1.0, 0.0)
    with pytest.raises(DomainError):
        euler_transform(2.0, 0.0, -0.1, 0.0)
    with pytest.raises(DomainError):
        euler_transform(-1.0, 0.0, 60.0, np.pi / 2)  # artanh argument rounds to 1
    with pytest.raises(DomainError):
        euler_metric(2.0, (0.0, 0.0, 0.0))
