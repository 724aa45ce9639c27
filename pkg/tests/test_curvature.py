import numpy as np
import pytest

from sasaki3 import jets as J
from sasaki3.curvature import (christoffel, curvature, curvature_endomorphism, einstein_divergence,
                               killing_residual)
from sasaki3.errors import DegenerateMetricError
from sasaki3.fields import MetricEvaluator

from conftest import fd_partial, generic_metric

P = np.array([0.3, -0.4, 0.7])


def round_sphere(radius=1.0):
    # (psi, theta, phi) hyperspherical coordinates
    def g(psi, theta, phi):
        s2 = radius**2 * J.sin(psi) ** 2
        return [[radius**2, 0.0, 0.0], [0.0, s2, 0.0], [0.0, 0.0, s2 * J.sin(theta) ** 2]]
    return MetricEvaluator.from_coordinates(g)


def test_euclidean_is_flat():
    b = curvature(MetricEvaluator.euclidean(), P)
    assert np.abs(b.riemann).max() == 0
    assert b.scalar == 0


@pytest.mark.parametrize("radius", [1.0, 2.5])
def test_round_sphere_curvature(radius):
    b = curvature(round_sphere(radius), [0.9, 1.1, 0.3])
    assert b.scalar == pytest.approx(6 / radius**2, abs=1e-12)
    assert np.allclose(b.ricci, 2 / radius**2 * b.metric, atol=1e-12)


def test_christoffel_matches_finite_differences():
    m = generic_metric()
    gam = christoffel(m, P)
    g = m(P)
    ginv = np.linalg.inv(g)
    dg = np.stack([fd_partial(m, P, tuple(np.eye(3, dtype=int)[k])) for k in range(3)], axis=-1)
    first = 0.5 * (dg + dg.transpose(0, 2, 1) - dg.transpose(2, 0, 1))
    assert np.allclose(gam, np.einsum("il,ljk->ijk", ginv, first), atol=1e-5)


def test_riemann_symmetries():
    b = curvature(generic_metric(), P)
    Rl = b.riemann_lowered
    assert np.allclose(Rl, -Rl.transpose(1, 0, 2, 3), atol=1e-12)
    assert np.allclose(Rl, -Rl.transpose(0, 1, 3, 2), atol=1e-12)
    assert np.allclose(Rl, Rl.transpose(2, 3, 0, 1), atol=1e-12)
    assert np.allclose(Rl + Rl.transpose(0, 2, 3, 1) + Rl.transpose(0, 3, 1, 2), 0, atol=1e-12)


def test_contracted_bianchi():
    assert np.abs(einstein_divergence(generic_metric(), P)).max() < 1e-12


def test_killing_residual_detects_non_killing():
    m = generic_metric()
    assert np.abs(killing_residual(m, [1, 0, 0], P)).max() > 1e-2
    assert np.abs(killing_residual(MetricEvaluator.euclidean(), [0, 0, 1], P)).max() == 0


def test_rotation_field_is_killing_for_euclidean():
    def rot(p, order):
        x, y, _ = J.Jet.variables(p, order)
        return J.Jet.stack([-y, x, 0 * x])
    assert np.abs(killing_residual(MetricEvaluator.euclidean(), rot, P)).max() < 1e-15


def test_sasakian_curvature_condition_on_round_s3(round_s3):
    p = np.array([0.2, 0.3, -0.5])
    g = round_s3.metric(p)
    for X in np.eye(3):
        for Y in np.eye(3):
            lhs = curvature_endomorphism(round_s3.metric, X, Y, p)
            rhs = g[0] @ Y * X - (X @ g @ Y) * np.array([1.0, 0, 0])
            assert np.allclose(lhs, rhs, atol=1e-10)


def test_degenerate_metric_rejected():
    m = MetricEvaluator.constant(np.diag([1.0, 1.0, 0.0]))
    with pytest.raises(DegenerateMetricError):
        curvature(m, P)
