import numpy as np
import pytest

from sasaki3.conformal import (conformal_flatness_check, cotton_components_sasakian,
                               cotton_frame_components, frame_norm, weyl_schouten)
from sasaki3.errors import CapabilityError
from sasaki3.fields import MetricEvaluator
from conftest import FAMILY_GRID, family, generic_metric

P = (0.3, -0.4, 0.7)


def test_euclidean_zero():
    C, T = weyl_schouten(MetricEvaluator.euclidean(), P)
    assert np.all(C == 0) and np.all(T == 0)


def test_conformally_flat_metric():
    # exp(2f) times Euclidean is conformally flat
    from sasaki3 import jets as J

    def g(x, y, z):
        w = J.exp(0.4 * x * y - 0.3 * J.sin(z))
        return [[w, 0.0, 0.0], [0.0, w, 0.0], [0.0, 0.0, w]]

    _, T = weyl_schouten(MetricEvaluator.from_coordinates(g), P)
    assert np.abs(T).max() < 1e-12


def test_cotton_symmetries():
    m = generic_metric()
    C, T = weyl_schouten(m, P)
    ginv = np.linalg.inv(m(P))
    assert np.allclose(C, C.T, atol=1e-12)
    assert np.allclose(T, -T.transpose(1, 0, 2), atol=1e-12)
    assert np.abs(np.einsum("ik,ijk->j", ginv, T)).max() < 1e-8
    assert np.abs(T + T.transpose(1, 2, 0) + T.transpose(2, 0, 1)).max() < 1e-8
    assert np.abs(T).max() > 1e-3


def test_capability_error():
    m = MetricEvaluator.euclidean()
    m.max_order = 2
    with pytest.raises(CapabilityError):
        weyl_schouten(m, P)


@pytest.mark.parametrize("W,expected", [(2.0, (0.5, 0.5)), (0.0, (2.5, -1.5)), (1.0, (1.5, -0.5))])
def test_component_examples(W, expected):
    s = family(W)
    p = s.sample_points(1, seed=9)[0]
    assert cotton_components_sasakian(s, p) == pytest.approx(expected, abs=1e-6)


@pytest.mark.parametrize("W", FAMILY_GRID)
def test_route_equivalence_and_dichotomy(W):
    s = family(W)
    pts = s.sample_points(3, seed=4)
    rep = conformal_flatness_check(s, pts)
    assert rep.route_difference <= 1e-6
    R = 4 * W - 2
    assert np.allclose(rep.C00, 2 - R / 4, atol=1e-6)
    assert np.allclose(rep.Cpm, R / 4 - 1, atol=1e-6)
    assert rep.flat == (W == 2.0)
    assert rep.round_signature == (W == 2.0)
    if W != 2.0:
        assert rep.max_norm > 0.1


def test_tensor_projection_matches_spin_route_off_family():
    from sasaki3.sasaki import build_normal_form
    from sasaki3 import jets as J

    s = build_normal_form(lambda u, v: 0.8 + 0.2 * J.sin(u + 2 * v))
    p = (0.1, 0.2, 0.3)
    assert cotton_components_sasakian(s, p) == pytest.approx(cotton_frame_components(s, p), abs=1e-6)


def test_frame_norm_is_frame_invariant():
    rng = np.random.default_rng(0)
    T = rng.standard_normal((3, 3, 3))
    Q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
    assert frame_norm(T, Q) == pytest.approx(np.linalg.norm(T))
