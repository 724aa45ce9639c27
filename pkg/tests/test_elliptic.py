import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sasaki3.elliptic import (GridField, SolverConfig, end_to_end_residual, grid_to_field,
                              laplacian, read_grid_csv, solve_poisson, solve_prescribed_curvature,
                              tw_residual_field, write_grid_csv)
from sasaki3.errors import ConvergenceError, DomainError, PreconditionError
from sasaki3.fields import Rectangle
from sasaki3.sasaki import scalar_curvature_tw

SQUARE = Rectangle(-1, 1, -1, 1)


def phi_round(u, v):
    return np.log(0.5 * np.sqrt(2) * (1 + u * u + v * v))


def phi_manufactured(u, v):
    return np.sin(u) * np.cos(v) / 10


def R_manufactured(u, v):
    # R = 4 exp(2 phi) lap(phi) - 2 with lap(phi) = -2 phi
    phi = phi_manufactured(u, v)
    return 4 * np.exp(2 * phi) * (-2 * phi) - 2


def max_error(result, exact):
    return np.abs(result.values - exact(*result.mesh())).max()


def test_grid_field_invariants():
    with pytest.raises(PreconditionError):
        GridField(SQUARE, np.zeros((2, 2)))
    with pytest.raises(PreconditionError):
        GridField(SQUARE, np.zeros((5, 9)))
    with pytest.raises(PreconditionError):
        GridField(SQUARE, np.full((5, 5), np.nan))
    g = GridField.sample(0.0, Rectangle(0, 2, 0, 1), 9)
    assert g.values.shape == (9, 5) and g.h == 0.25


def test_solver_config_invariants():
    with pytest.raises(PreconditionError):
        SolverConfig(tol=0)
    with pytest.raises(PreconditionError):
        SolverConfig(max_iter=0)


def test_nil_constant_solution():
    r = solve_prescribed_curvature(-2.0, SQUARE, 17, np.log(1 / np.sqrt(2)))
    assert np.allclose(r.phi.values, np.log(1 / np.sqrt(2)), atol=1e-12)


def test_manufactured_convergence():
    errs = [max_error(solve_prescribed_curvature(R_manufactured, SQUARE, n, phi_manufactured).phi,
                      phi_manufactured) for n in (17, 33, 65)]
    ratios = np.array(errs[:-1]) / errs[1:]
    assert np.all((ratios >= 3.4) & (ratios <= 4.6)), ratios


def test_round_solution_recovered_from_nearby_start():
    # the discrete problem has a second solution; start on the round branch
    start = lambda u, v: phi_round(u, v) + 0.05 * np.cos(np.pi * u / 2) * np.cos(np.pi * v / 2)
    errs = [max_error(solve_prescribed_curvature(6.0, SQUARE, n, phi_round, initial=start).phi, phi_round)
            for n in (17, 33, 65)]
    assert errs[-1] < 2e-3
    assert 3.4 <= errs[1] / errs[2] <= 4.6


def test_round_target_has_a_second_discrete_solution():
    # from the harmonic extension Newton lands on another genuine solution
    r = solve_prescribed_curvature(6.0, SQUARE, 33, phi_round)
    assert r.residual <= 1e-10
    assert max_error(r.phi, phi_round) > 0.1


def test_newton_monotone_and_positive():
    r = solve_prescribed_curvature(lambda u, v: np.sin(u) * np.cos(v), SQUARE, 33, 0.0)
    assert np.all(np.diff(r.merit) <= 0)
    assert np.all(r.p0.values > 0)
    assert not r.nonmonotone


def test_nonmonotone_flag():
    r = solve_prescribed_curvature(lambda u, v: -2 + 3 * u, SQUARE, 17, 0.0)
    assert r.nonmonotone


def test_convergence_error_carries_history():
    with pytest.raises(ConvergenceError) as exc:
        solve_prescribed_curvature(lambda u, v: np.sin(u) * np.cos(v), SQUARE, 17, 0.0,
                                   SolverConfig(max_iter=1))
    assert len(exc.value.history) == 2


def test_nan_input_rejected():
    with pytest.raises(PreconditionError):
        solve_prescribed_curvature(np.nan, SQUARE, 9, 0.0)


# Poisson -------------------------------------------------------------------

def test_poisson_harmonic():
    g = GridField.sample(0.0, SQUARE, 21)
    K = solve_poisson(g, lambda u, v: u * u - v * v)
    assert max_error(K, lambda u, v: u * u - v * v) < 1e-12


def test_poisson_nil_potential():
    K = solve_poisson(GridField.sample(2.0, SQUARE, 21), lambda u, v: (u * u + v * v) / 2)
    assert max_error(K, lambda u, v: (u * u + v * v) / 2) < 1e-12
    assert np.abs(laplacian(K.values, K.h) - 2).max() < 1e-10


def test_poisson_manufactured_convergence():
    exact = lambda u, v: np.cos(u) * np.sinh(v)
    errs = [max_error(solve_poisson(GridField.sample(0.0, SQUARE, n), exact), exact) for n in (17, 33, 65)]
    ratios = np.array(errs[:-1]) / errs[1:]
    assert np.all((ratios >= 3.4) & (ratios <= 4.6)), ratios


# interpolation ---------------------------------------------------------------

def test_interpolant_constant():
    f = grid_to_field(GridField.sample(3.0, SQUARE, 6))
    j = f.jet(0.2, -0.3)
    assert j.value == pytest.approx(3.0)
    assert np.allclose(j.c[1:], 0, atol=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.floats(-1, 1), st.floats(-1, 1))
def test_interpolant_reproduces_bilinear(u, v):
    f = grid_to_field(GridField.sample(lambda a, b: a * b, SQUARE, 7))
    j = f.jet(u, v)
    assert j.value == pytest.approx(u * v, abs=1e-12)
    assert j.partial(1, 1) == pytest.approx(1.0, abs=1e-12)
    assert j.partial(2, 0) == pytest.approx(0.0, abs=1e-12)


def test_interpolant_reproduces_nodes_and_third_derivatives():
    g = GridField.sample(lambda a, b: a**3 * b + np.cos(a + b), SQUARE, 9)
    f = grid_to_field(g)
    uu, vv = g.mesh()
    assert np.allclose(f.values(uu, vv), g.values, atol=1e-13)
    cubic = grid_to_field(GridField.sample(lambda a, b: a**3 * b, SQUARE, 9))
    assert cubic.jet(0.3, -0.2).partial(3, 0) == pytest.approx(6 * -0.2, abs=1e-10)


def test_interpolant_outside_rejected():
    with pytest.raises(DomainError):
        grid_to_field(GridField.sample(0.0, SQUARE, 5)).jet(1.2, 0.0)


def test_interpolated_round_p0_curvature():
    f = grid_to_field(GridField.sample(lambda u, v: np.exp(phi_round(u, v)), SQUARE, 129))
    pts = np.random.default_rng(0).uniform(-1, 1, (30, 2))
    assert max(abs(scalar_curvature_tw(f, p) - 6) for p in pts) < 5e-3


@pytest.mark.slow
def test_end_to_end_prescribed_curvature():
    R = lambda u, v: np.sin(u) * np.cos(v)
    r = solve_prescribed_curvature(R, SQUARE, 129, 0.0)
    assert end_to_end_residual(r.phi, R) <= 5e-3
    assert tw_residual_field(r.phi, R, inset=0.05).max() <= 5e-3
    # at the corners zero Dirichlet data force R = -2, whatever the grid
    assert tw_residual_field(r.phi, R).max() == pytest.approx(2 + np.sin(1) * np.cos(1), abs=1e-6)


def test_csv_round_trip(tmp_path):
    g = GridField.sample(lambda u, v: u + 10 * v, Rectangle(0, 1, -0.5, 0.5), 5)
    path = tmp_path / "g.csv"
    write_grid_csv(path, g)
    lines = path.read_text().splitlines()
    assert lines[0] == "u,v,value"
    assert lines[1].split(",")[:2] == ["0.0", "-0.5"] and lines[2].split(",")[:2] == ["0.0", "-0.25"]
    back = read_grid_csv(path)
    assert back.domain == g.domain and np.array_equal(back.values, g.values)


def test_csv_bad_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("x,y,z\n0,0,0\n")
    with pytest.raises(PreconditionError):
        read_grid_csv(path)
