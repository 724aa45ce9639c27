"""Finite-difference solvers on rectangles.

Prescribed scalar curvature: with ``phi = ln P0`` the normal-form curvature
equation becomes the semilinear problem

    lap(phi) = 1/2 (1 + R/2) exp(-2 phi)

solved by damped Newton on the 5-point Laplacian with Dirichlet data.  The
same stencil solves the linear Poisson problem ``lap(K) = 1/P0^2`` for the
Sasakian potential.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.interpolate import NdBSpline, RectBivariateSpline

from .curvature import curvature
from .errors import ConvergenceError, DomainError, PreconditionError
from .fields import Rectangle, ScalarJetField
from .jets import Jet, exp, monomials

LINEAR_TOL = 1e-10
CSV_HEADER = ["u", "v", "value"]


@dataclass(frozen=True, eq=False)
class GridField:
    """Node values on a uniform grid with square cells.

    ``values[i, j]`` sits at ``(u[i], v[j])``.
    """

    domain: Rectangle
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", vals)
        if vals.ndim != 2 or min(vals.shape) < 3:
            raise PreconditionError(f"grid needs at least 3x3 nodes, got {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise PreconditionError("grid values must be finite")
        hu = (self.domain.umax - self.domain.umin) / (vals.shape[0] - 1)
        hv = (self.domain.vmax - self.domain.vmin) / (vals.shape[1] - 1)
        if hu <= 0 or not np.isclose(hu, hv, rtol=1e-9, atol=0):
            raise PreconditionError(f"cells must be square with positive spacing (hu={hu}, hv={hv})")

    @property
    def nx(self) -> int:
        return self.values.shape[0]

    @property
    def ny(self) -> int:
        return self.values.shape[1]

    @property
    def h(self) -> float:
        return (self.domain.umax - self.domain.umin) / (self.nx - 1)

    @property
    def u(self) -> np.ndarray:
        return np.linspace(self.domain.umin, self.domain.umax, self.nx)

    @property
    def v(self) -> np.ndarray:
        return np.linspace(self.domain.vmin, self.domain.vmax, self.ny)

    def mesh(self):
        return np.meshgrid(self.u, self.v, indexing="ij")

    @classmethod
    def sample(cls, fn, domain: Rectangle, nx: int, ny: int | None = None) -> "GridField":
        """Evaluate ``fn(u, v)`` (arrays), a :class:`ScalarJetField` or a constant on the nodes."""
        if ny is None:
            ny = square_count(domain, nx)
        uu, vv = np.meshgrid(np.linspace(domain.umin, domain.umax, nx),
                             np.linspace(domain.vmin, domain.vmax, ny), indexing="ij")
        return cls(domain, _evaluate(fn, uu, vv))

    def with_values(self, values) -> "GridField":
        return GridField(self.domain, values)


def square_count(domain: Rectangle, nx: int) -> int:
    """Node count along v giving square cells for ``nx`` nodes along u."""
    h = (domain.umax - domain.umin) / (nx - 1)
    ny = (domain.vmax - domain.vmin) / h + 1
    if not np.isclose(ny, round(ny), atol=1e-9):
        raise PreconditionError(f"{domain} admits no square cells with {nx} nodes along u")
    return int(round(ny))


def _evaluate(fn, uu, vv) -> np.ndarray:
    if isinstance(fn, GridField):
        if fn.values.shape != uu.shape:
            raise PreconditionError("grid shapes differ")
        return fn.values
    if isinstance(fn, ScalarJetField):
        return fn.values(uu, vv)
    if callable(fn):
        return np.broadcast_to(np.asarray(fn(uu, vv), dtype=float), uu.shape).copy()
    return np.full(uu.shape, float(fn))


@dataclass(frozen=True)
class SolverConfig:
    max_iter: int = 50
    tol: float = 1e-10
    armijo_c: float = 1e-4
    backtrack: float = 0.5
    min_step: float = 2.0**-30

    def __post_init__(self):
        if self.tol <= 0:
            raise PreconditionError("tolerance must be positive")
        if self.max_iter < 1:
            raise PreconditionError("need at least one iteration")
        if not (0 < self.armijo_c < 1 and 0 < self.backtrack < 1):
            raise PreconditionError("line-search parameters must lie in (0, 1)")


@dataclass
class SolveResult:
    phi: GridField
    history: list = field(default_factory=list)       # sup-norm residual per iterate
    merit: list = field(default_factory=list)         # 2-norm residual per iterate
    steps: list = field(default_factory=list)         # accepted step lengths
    nonmonotone: bool = False

    @property
    def iterations(self) -> int:
        return len(self.steps)

    @property
    def residual(self) -> float:
        return self.history[-1]

    @property
    def p0(self) -> GridField:
        return self.phi.with_values(np.exp(self.phi.values))


# discrete operator ----------------------------------------------------

def _interior_laplacian(nx: int, ny: int, h: float) -> sp.csc_matrix:
    """5-point Laplacian on interior nodes, C-ordered (i over u, j over v)."""
    def second(n):
        return sp.diags([1.0, -2.0, 1.0], [-1, 0, 1], shape=(n, n))
    mx, my = nx - 2, ny - 2
    L = sp.kron(second(mx), sp.identity(my)) + sp.kron(sp.identity(mx), second(my))
    return (L / h**2).tocsc()


def laplacian(values: np.ndarray, h: float) -> np.ndarray:
    """5-point Laplacian at the interior nodes."""
    f = values
    return (f[2:, 1:-1] + f[:-2, 1:-1] + f[1:-1, 2:] + f[1:-1, :-2] - 4 * f[1:-1, 1:-1]) / h**2


def _with_interior(boundary: np.ndarray, interior: np.ndarray) -> np.ndarray:
    out = boundary.copy()
    out[1:-1, 1:-1] = interior.reshape(out.shape[0] - 2, out.shape[1] - 2)
    return out


def _boundary_term(boundary: np.ndarray, h: float) -> np.ndarray:
    """Laplacian of the boundary data with zero interior, on interior nodes."""
    b = boundary.copy()
    b[1:-1, 1:-1] = 0.0
    return laplacian(b, h).ravel()


def _direct_solve(L, rhs):
    if not np.all(np.isfinite(rhs)):
        raise ConvergenceError("non-finite right-hand side")
    x = spla.spsolve(L, rhs)
    if not np.all(np.isfinite(x)):
        raise ConvergenceError("singular or ill-conditioned linear system")
    return x


def harmonic_extension(boundary: GridField) -> GridField:
    return solve_poisson(boundary.with_values(np.zeros_like(boundary.values)), boundary)


def solve_poisson(rhs: GridField, boundary) -> GridField:
    """Solve ``lap K = rhs`` with Dirichlet data; certifies the residual at 1e-10."""
    uu, vv = rhs.mesh()
    bvals = _evaluate(boundary, uu, vv)
    L = _interior_laplacian(rhs.nx, rhs.ny, rhs.h)
    b = rhs.values[1:-1, 1:-1].ravel() - _boundary_term(bvals, rhs.h)
    K = _with_interior(bvals, _direct_solve(L, b))
    res = np.abs(laplacian(K, rhs.h) - rhs.values[1:-1, 1:-1]).max()
    scale = max(1.0, np.abs(rhs.values).max())
    if res > LINEAR_TOL * scale:
        raise ConvergenceError(f"Poisson residual {res:.3e} above {LINEAR_TOL:g}", [res])
    return rhs.with_values(K)


def solve_prescribed_curvature(R_target, domain: Rectangle, n: int, boundary,
                               config: SolverConfig | None = None, initial=None) -> SolveResult:
    """Newton solve of ``lap phi = 1/2 (1 + R/2) exp(-2 phi)`` for ``phi = ln P0``.

    Parameters
    ----------
    R_target : ScalarJetField, callable(u, v) or float
        Target scalar curvature.
    domain : Rectangle
    n : int
        Nodes along u; the v count follows from square cells.
    boundary : GridField, callable(u, v) or float
        Dirichlet values of ``phi``.
    initial : GridField, callable(u, v) or float, optional
        Starting iterate; defaults to the harmonic extension of the boundary
        data.  When ``1 + R/2 > 0`` the problem can have several solutions
        and the starting point selects the branch.
    """
    config = config or SolverConfig()
    grid = GridField.sample(0.0, domain, n)
    uu, vv = grid.mesh()
    R = _evaluate(R_target, uu, vv)
    bvals = _evaluate(boundary, uu, vv)
    if not (np.all(np.isfinite(R)) and np.all(np.isfinite(bvals))):
        raise PreconditionError("target curvature and boundary data must be finite")
    f = 0.5 * (1 + 0.5 * R[1:-1, 1:-1]).ravel()
    h = grid.h
    L = _interior_laplacian(grid.nx, grid.ny, h)
    bterm = _boundary_term(bvals, h)

    def residual(x):
        return L @ x + bterm - f * np.exp(-2 * x)

    if initial is None:
        x = harmonic_extension(grid.with_values(bvals)).values[1:-1, 1:-1].ravel()
    else:
        x = _evaluate(initial, uu, vv)[1:-1, 1:-1].ravel().astype(float)
    F = residual(x)
    out = SolveResult(phi=grid, nonmonotone=bool(f.min() < 0 < f.max()))
    out.history.append(float(np.abs(F).max()))
    out.merit.append(float(np.linalg.norm(F)))
    for _ in range(config.max_iter):
        if out.history[-1] <= config.tol:
            break
        J = (L + sp.diags(2 * f * np.exp(-2 * x))).tocsc()
        dx = _direct_solve(J, -F)
        # Armijo on 1/2 |F|^2, whose directional derivative along dx is -|F|^2
        m0 = F @ F
        t = 1.0
        while True:
            xn = x + t * dx
            with np.errstate(over="ignore", invalid="ignore"):
                Fn = residual(xn)
                # an overflowing trial point is rejected like any other
                if np.all(np.isfinite(Fn)) and Fn @ Fn <= (1 - 2 * config.armijo_c * t) * m0:
                    break
            t *= config.backtrack
            if t < config.min_step:
                raise ConvergenceError("line search failed", out.history)
        x, F = xn, Fn
        out.steps.append(t)
        out.history.append(float(np.abs(F).max()))
        out.merit.append(float(np.linalg.norm(F)))
    if out.history[-1] > config.tol:
        raise ConvergenceError(
            f"Newton did not reach {config.tol:g} in {config.max_iter} iterations", out.history)
    out.phi = grid.with_values(_with_interior(bvals, x))
    return out


# interpolation ---------------------------------------------------------

def grid_to_field(g: GridField, name: str = "grid") -> ScalarJetField:
    """Interpolating bicubic spline through the nodes, queried as jets."""
    if min(g.nx, g.ny) < 4:
        raise PreconditionError("interpolation needs at least a 4x4 grid")
    # FITPACK fits the spline; NdBSpline evaluates it, since FITPACK stops at
    # derivative order k - 1 and jets need the third
    tu, tv, c = RectBivariateSpline(g.u, g.v, g.values, kx=3, ky=3, s=0).tck
    spline = NdBSpline((tu, tv), c.reshape(g.nx, g.ny), 3)
    d = g.domain
    slack = 1e-12 * max(1.0, abs(d.umax - d.umin), abs(d.vmax - d.vmin))

    def evaluator(u, v, order):
        u, v = np.broadcast_arrays(u, v)
        if np.any((u < d.umin - slack) | (u > d.umax + slack) | (v < d.vmin - slack) | (v > d.vmax + slack)):
            raise DomainError(f"query outside grid rectangle {d}")
        xi = np.stack([np.clip(u, d.umin, d.umax), np.clip(v, d.vmin, d.vmax)], axis=-1)
        partials = {a: spline(xi, nu=a) for a in monomials(2, order)}
        return Jet.from_partials(partials, 2, order)

    return ScalarJetField(evaluator, name)


def p0_field_from_phi(phi: GridField) -> ScalarJetField:
    """``P0 = exp(phi)`` with ``phi`` interpolated, so positivity is structural."""
    f = grid_to_field(phi, "phi")
    return ScalarJetField(lambda u, v, order: exp(f.jet(u, v, order)), "exp(phi)")


def end_to_end_residual(phi: GridField, R_target, n: int = 13, inset: float = 0.05) -> float:
    """Sup of |tensor-route R of the rebuilt metric - R_target| over an inset lattice.

    The lattice covers the rectangle shrunk by ``inset`` times its width on
    every side.  Dirichlet data incompatible with the equation at a corner
    (e.g. constant data where 1 + R/2 != 0) make the solution fail to be C^2
    there, so a sup over the closed rectangle does not converge with h.
    """
    from .sasaki import build_normal_form

    d = phi.domain
    s = build_normal_form(p0_field_from_phi(phi), domain=d, v0=0.5 * (d.vmin + d.vmax))
    du, dv = inset * (d.umax - d.umin), inset * (d.vmax - d.vmin)
    uu, vv = np.meshgrid(np.linspace(d.umin + du, d.umax - du, n),
                         np.linspace(d.vmin + dv, d.vmax - dv, n), indexing="ij")
    target = _evaluate(R_target, uu, vv)
    worst = 0.0
    for u, v, t in zip(uu.ravel(), vv.ravel(), target.ravel()):
        worst = max(worst, abs(curvature(s.metric, (0.0, u, v)).scalar - t))
    return worst


def tw_residual_field(phi: GridField, R_target, n: int = 201, inset: float = 0.0) -> np.ndarray:
    """|R from 4 P0^2 lap(ln P0) - 2 minus R_target| on a dense lattice (cheap route)."""
    d = phi.domain
    du, dv = inset * (d.umax - d.umin), inset * (d.vmax - d.vmin)
    uu, vv = np.meshgrid(np.linspace(d.umin + du, d.umax - du, n),
                         np.linspace(d.vmin + dv, d.vmax - dv, n), indexing="ij")
    lnp = grid_to_field(phi).jet(uu, vv, 2)
    R = 4 * np.exp(2 * lnp.value) * (lnp.partial(2, 0) + lnp.partial(0, 2)) - 2
    return np.abs(R - _evaluate(R_target, uu, vv))


# CSV --------------------------------------------------------------------

def write_grid_csv(path, g: GridField) -> None:
    """Columns u, v, value; row-major (u index outer, v index inner)."""
    uu, vv = g.mesh()
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_HEADER)
        for u, v, val in zip(uu.ravel(), vv.ravel(), g.values.ravel()):
            w.writerow([repr(float(u)), repr(float(v)), repr(float(val))])


def read_grid_csv(path) -> GridField:
    with open(Path(path), newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or [c.strip() for c in rows[0]] != CSV_HEADER:
        raise PreconditionError(f"{path}: expected header 'u,v,value'")
    data = np.array(rows[1:], dtype=float)
    us, vs = np.unique(data[:, 0]), np.unique(data[:, 1])
    if len(data) != len(us) * len(vs):
        raise PreconditionError(f"{path}: nodes do not form a full grid")
    order = np.lexsort((data[:, 1], data[:, 0]))
    values = data[order, 2].reshape(len(us), len(vs))
    return GridField(Rectangle(us[0], us[-1], vs[0], vs[-1]), values)
