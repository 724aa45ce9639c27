"""Sasakian structures in normal form, built from one function P0(u, v).

In coordinates (r, u, v) the structure is

    eta   = dr + A du,        A(u, v) = int_{v0}^{v} P0(u, s)^-2 ds
    g     = eta^2 + (du^2 + dv^2) / (2 P0^2)
    e0    = d/dr

and the adapted complex frame is
``e_+ = exp(-i r) [P0 (d_u + i d_v) + Omega0 d_r]`` with ``Omega0 = -P0 A``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .curvature import REEB, curvature, curvature_endomorphism, killing_residual
from .errors import DomainError, PreconditionError
from .fields import MetricEvaluator, Rectangle, ScalarJetField, require_inside
from .jets import Jet, log, absolute
from .npp import Triad, spin_coefficients
from .quadrature import adaptive_simpson

SQRT2 = np.sqrt(2.0)
QUAD_TOL = 1e-10
CR_TOL = 1e-10


def _as_field(f) -> ScalarJetField:
    if isinstance(f, ScalarJetField):
        return f
    if callable(f):
        return ScalarJetField.from_function(f)
    return ScalarJetField.constant(f)


def integral_A(p0: ScalarJetField, u: float, v: float, v0: float = 0.0,
               tol: float = QUAD_TOL, order: int = 3) -> Jet:
    """Jet in (u, v) of ``A = int_{v0}^{v} P0(u, s)^-2 ds``.

    Pure-u Taylor coefficients come from differentiating under the integral
    sign (the integrand's u-coefficients are integrated by adaptive
    Simpson); every coefficient involving v comes from the integrand at the
    point itself, so ``dA/dv = P0^-2`` holds exactly.
    """
    from .jets import monomial_index, ncoef

    index = monomial_index(2, order)
    u_cols = [index[(i, 0)] for i in range(order + 1)]

    def integrand(s):
        jet = p0.jet(np.full_like(s, u), s, order) ** -2
        return jet.c[..., u_cols]

    ucoef = adaptive_simpson(integrand, float(v0), float(v), tol=tol)
    c = np.zeros(ncoef(2, order))
    c[u_cols] = ucoef
    if order >= 1:
        local = p0.jet(u, v, order - 1) ** -2
        local_index = monomial_index(2, order - 1)
        for (i, j), k in index.items():
            if j >= 1:
                c[k] = local.c[local_index[(i, j - 1)]] / j
    return Jet(c, 2, order)


def omega0(p0: ScalarJetField, u: float, v: float, v0: float = 0.0, tol: float = QUAD_TOL) -> float:
    """Real Omega0 in the gauge where it vanishes on the baseline v = v0."""
    return float(-p0.jet(u, v, 0).value * integral_A(p0, u, v, v0, tol, order=0).value)


def omega0_jet(p0: ScalarJetField, u: float, v: float, v0: float = 0.0,
               tol: float = QUAD_TOL, order: int = 3) -> Jet:
    return -p0.jet(u, v, order) * integral_A(p0, u, v, v0, tol, order)


def _dz(j: Jet) -> Jet:
    return 0.5 * (j.d(0) - 1j * j.d(1))


def _dzbar(j: Jet) -> Jet:
    return 0.5 * (j.d(0) + 1j * j.d(1))


def _field_jet(f, u, v, order) -> Jet:
    if isinstance(f, Jet):
        return f
    if isinstance(f, ScalarJetField) or hasattr(f, "jet"):
        return f.jet(u, v, order)
    if callable(f):
        return f(u, v, order)
    return Jet.constant(f, 2, order)


def tau0_jet(p0, om0, u, v, order: int = 1) -> Jet:
    """``tau0 = 2 dP0/dz - i Omega0`` as a complex jet in (u, v)."""
    P = _field_jet(p0, u, v, order + 1)
    Om = _field_jet(om0, u, v, order)
    return 2 * _dz(P) - 1j * Om


def compute_tau0(p0, om0, p) -> complex:
    """tau0 at ``p = (u, v)``; ``om0`` is a real field, jet or constant."""
    u, v = p[-2], p[-1]
    return complex(tau0_jet(p0, om0, u, v, order=0).value)


def reduced_system_residual(p0, om0, tau0, R, p):
    """Residuals of the three reduced first-order equations at ``p = (u, v)``.

    ``tau0`` is a callable ``(u, v, order) -> complex Jet`` (for instance
    ``functools.partial(tau0_jet, p0, om0)``) or a jet; ``R`` a number or
    field.  Returns ``(real, complex, complex)``.
    """
    u, v = p[-2], p[-1]
    P = _field_jet(p0, u, v, 1)
    Om = _field_jet(om0, u, v, 1) + 0j
    T = _field_jet(tau0, u, v, 1) + 0j
    Rv = _field_jet(R, u, v, 0).value if not np.isscalar(R) else R
    Pv, Omv, Tv = P.value, Om.value, T.value
    Tb, Omb = T.conj(), Om.conj()
    lhs1 = 2 * Pv * (_dzbar(T).value + _dz(Tb).value) + 1j * (Omv * Tv - np.conj(Omv) * np.conj(Tv))
    res1 = lhs1 - (2 * Tv * np.conj(Tv) - 1 + 0.5 * Rv)
    lhs2 = 2 * Pv * (_dzbar(Omb).value - _dz(Om).value) + 2j * Omv * np.conj(Omv)
    res2 = lhs2 - (np.conj(Tv) * np.conj(Omv) - Tv * Omv - 2j)
    res3 = 2 * _dzbar(P).value - (np.conj(Tv) - 1j * Omv)
    return float(np.real(res1)), complex(res2), complex(res3)


def scalar_curvature_tw(p0, p) -> float:
    """Scalar curvature from the conformal factor alone: ``4 P0^2 lap(ln|P0|) - 2``."""
    u, v = p[-2], p[-1]
    P = _field_jet(p0, u, v, 2)
    if np.any(P.value == 0):
        raise DomainError(f"P0 vanishes at (u={u}, v={v})")
    L = log(absolute(P))
    lap = L.partial(2, 0) + L.partial(0, 2)
    return float(4 * P.value**2 * lap - 2)


def tanaka_webster(R):
    return (R + 2) / 4


@dataclass(frozen=True)
class SasakianStructure:
    """Normal-form Sasakian structure generated by ``p0``.

    Build with :func:`build_normal_form`.  ``p0`` must not vanish on
    ``domain``; A and Omega0 are fixed by requiring them to vanish on the
    baseline ``v = v0``.
    """

    p0: ScalarJetField
    domain: object = field(default_factory=lambda: Rectangle(-1, 1, -1, 1))
    v0: float = 0.0
    quad_tol: float = QUAD_TOL
    name: str = ""

    reeb = REEB

    def check_point(self, u, v) -> None:
        require_inside(self.domain, u, v)
        require_inside(self.domain, u, self.v0)

    def A(self, u, v, order: int = 3, tol: float | None = None) -> Jet:
        self.check_point(u, v)
        return integral_A(self.p0, u, v, self.v0, tol or self.quad_tol, order)

    def omega0(self, u, v) -> float:
        self.check_point(u, v)
        return omega0(self.p0, u, v, self.v0, self.quad_tol)

    def omega0_field(self) -> ScalarJetField:
        return ScalarJetField(lambda u, v, order: omega0_jet(self.p0, float(u), float(v), self.v0,
                                                             self.quad_tol, order), "Omega0")

    def tau0_field(self):
        om = self.omega0_field()
        return lambda u, v, order: tau0_jet(self.p0, om, u, v, order)

    def eta(self, p) -> np.ndarray:
        """Contact form components (dr, du, dv) at ``p``."""
        return np.array([1.0, float(self.A(p[1], p[2], 0).value), 0.0])

    def _pieces(self, p, order, tol=None):
        u, v = float(p[1]), float(p[2])
        P = self.p0.jet(u, v, order).embed(3, (1, 2))
        A = self.A(u, v, order, tol).embed(3, (1, 2))
        return P, A

    def metric_jet(self, p, order: int = 3, tol: float | None = None) -> Jet:
        P, A = self._pieces(p, order, tol)
        f = 0.5 * P**-2
        one = Jet.constant(1.0, 3, order)
        zero = Jet.constant(0.0, 3, order)
        return Jet.stack([Jet.stack([one, A, zero]),
                          Jet.stack([A, A * A + f, zero]),
                          Jet.stack([zero, zero, f])])

    @cached_property
    def metric(self) -> MetricEvaluator:
        return MetricEvaluator(lambda p, order: self.metric_jet(p, order))

    def precise_metric(self, tol: float) -> MetricEvaluator:
        """Metric evaluator with a tighter quadrature tolerance for A."""
        return MetricEvaluator(lambda p, order: self.metric_jet(p, order, tol))

    def frame(self, p, order: int = 3) -> Triad:
        return adapted_frame(self, p, order)

    def sample_points(self, n: int, seed: int = 0, margin: float = 0.05) -> np.ndarray:
        """``n`` random points (r, u, v) with (u, v) inside the domain."""
        rng = np.random.default_rng(seed)
        u, v = self.domain.sample(n, rng, margin)
        r = rng.uniform(-np.pi, np.pi, n)
        return np.column_stack([r, u, v])


def build_normal_form(p0, domain=None, v0: float = 0.0, quad_tol: float = QUAD_TOL,
                      check_grid: int = 64, name: str = "") -> SasakianStructure:
    """Sasakian structure in normal form from a nowhere-zero ``p0``.

    ``p0`` is sampled on a ``check_grid``-squared grid over the domain; a
    zero or sign change raises :class:`DomainError`.  This is a heuristic
    guard, not a proof that P0 has no zeros.
    """
    p0 = _as_field(p0)
    domain = domain if domain is not None else Rectangle(-1, 1, -1, 1)
    uu, vv = domain.grid(check_grid)
    vals = p0.values(uu, vv)
    if not np.all(np.isfinite(vals)) or np.any(vals == 0) or vals.min() * vals.max() < 0:
        raise DomainError(f"P0 vanishes or changes sign on {domain}")
    if isinstance(domain, Rectangle) and not domain.vmin <= v0 <= domain.vmax:
        raise DomainError(f"baseline v0={v0} outside {domain}")
    return SasakianStructure(p0, domain, float(v0), quad_tol, name or p0.name)


def adapted_frame(s: SasakianStructure, p, order: int = 3) -> Triad:
    """Frame dual to (eta, du/(sqrt2 P0), -dv/(sqrt2 P0)), with e_+ rotated by exp(-i r).

    The sign on the third leg orients the frame so that the twist is +1;
    the phase removes epsilon.
    """
    P, A = s._pieces(p, order)
    zero = Jet.constant(0.0, 3, order)
    e0 = Jet.constant(REEB, 3, order)
    e1 = SQRT2 * Jet.stack([-(P * A), P, zero])
    e2 = -SQRT2 * Jet.stack([zero, zero, P])
    return Triad(tuple(float(x) for x in p), e0, e1, e2, phase=-1)


@dataclass
class SasakianReport:
    residuals: dict
    tol: float
    npoints: int

    @property
    def passed(self) -> bool:
        return all(v <= self.tol for v in self.residuals.values())

    @property
    def failures(self) -> list:
        return [k for k, v in self.residuals.items() if v > self.tol]


def sasakian_residuals(metric: MetricEvaluator, triad: Triad, p, reeb=REEB) -> dict:
    """Pointwise residuals of the Sasakian characterisation."""
    p = np.asarray(p, dtype=float)
    out = {"killing": float(np.abs(killing_residual(metric, reeb, p)).max())}
    sc = spin_coefficients(metric, triad, p)
    out["kappa"] = abs(sc.kappa)
    out["sigma"] = abs(sc.sigma)
    out["divergence"] = abs(sc.rho.real)
    out["twist"] = abs(sc.rho.imag - 1)
    out["epsilon"] = abs(sc.epsilon)
    cb = curvature(metric, p)
    g = cb.metric
    frame = triad.real_frame().value
    worst = 0.0
    for X in frame:
        for Y in frame:
            lhs = np.einsum("ijkl,j,k,l->i", cb.riemann, Y, X, reeb)
            rhs = (reeb @ g @ Y) * X - (X @ g @ Y) * reeb
            worst = max(worst, float(np.abs(lhs - rhs).max()))
    out["curvature_condition"] = worst
    return out


def verify_sasakian(s, points, tol: float = 1e-8) -> SasakianReport:
    """Check Killing, geodesic/shear-free/divergence-free/twist-one and the curvature condition.

    ``s`` needs ``metric``, ``frame(p)`` and optionally ``reeb``; any
    candidate (not only normal-form structures) can be verified.
    """
    reeb = getattr(s, "reeb", REEB)
    worst: dict = {}
    points = np.atleast_2d(points)
    for p in points:
        res = sasakian_residuals(s.metric, s.frame(p), p, reeb)
        for k, v in res.items():
            worst[k] = max(worst.get(k, 0.0), v)
    return SasakianReport(worst, tol, len(points))


@dataclass
class IsometryResult:
    isometric: bool
    max_residual: float
    cauchy_riemann: float

    def __bool__(self):
        return self.isometric


def contact_isometry_check(p0, p0_tilde, zmap, samples, tol: float = 1e-10) -> IsometryResult:
    """Criterion for contact isometry between two normal forms.

    ``zmap(u_t, v_t)`` takes the (u~, v~) coordinate jets and returns the
    jets of (u, v); it must be holomorphic in w = u~ + i v~.  ``samples`` is
    an array of (u~, v~) points.
    """
    p0, p0_tilde = _as_field(p0), _as_field(p0_tilde)
    worst, cr = 0.0, 0.0
    for ut, vt in np.atleast_2d(samples):
        wu, wv = Jet.variables([ut, vt], 1)
        zu, zv = zmap(wu, wv)
        zu = zu if isinstance(zu, Jet) else Jet.constant(zu, 2, 1)
        zv = zv if isinstance(zv, Jet) else Jet.constant(zv, 2, 1)
        ux, uy = zu.partial(1, 0), zu.partial(0, 1)
        vx, vy = zv.partial(1, 0), zv.partial(0, 1)
        cr = max(cr, abs(ux - vy), abs(uy + vx))
        if cr > CR_TOL:
            raise PreconditionError(f"map is not holomorphic at w=({ut}, {vt}): Cauchy-Riemann residual {cr:.3e}")
        dzdw2 = ux**2 + vx**2
        lhs = p0_tilde.values(ut, vt) ** 2 * dzdw2
        rhs = p0.values(zu.value, zv.value) ** 2
        worst = max(worst, float(abs(lhs - rhs)))
    return IsometryResult(worst <= tol, worst, float(cr))


def reduced_system_check(s: SasakianStructure, points, R=None) -> dict:
    """Max moduli of the three reduced-equation residuals over ``points``.

    ``R`` defaults to the curvature of P0 itself (``scalar_curvature_tw``).
    """
    om = s.omega0_field()
    tau = s.tau0_field()
    worst = {"reduced1": 0.0, "reduced2": 0.0, "reduced3": 0.0}
    for p in np.atleast_2d(points):
        Rp = scalar_curvature_tw(s.p0, p) if R is None else R
        for key, val in zip(worst, reduced_system_residual(s.p0, om, tau, Rp, p)):
            worst[key] = max(worst[key], float(abs(val)))
    return worst
