"""Constant Tanaka-Webster curvature: the eta-Einstein normal forms.

For constant W the conformal factor is

    W > 0:  P0 = sqrt(W)/2 * (1 + u^2 + v^2)      (sphere, Berger spheres)
    W = 0:  P0 = 1/sqrt(2)                        (Nil)
    W < 0:  P0 = sqrt(-W)/2 * (1 - u^2 - v^2)     (universal cover of SL2R), |z| < 1

and Ricci = a g + b eta (x) eta with a = 2W - 2, b = 4 - 2W, R = 4W - 2.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import jets as jm
from .curvature import curvature
from .errors import DomainError, RankDeficientError
from .fields import Disk, MetricEvaluator, Plane
from .jets import Jet
from .sasaki import SasakianStructure, build_normal_form

POSITIVE, ZERO, NEGATIVE = "positive", "zero", "negative"
ARTANH_GUARD = 1e-12
FIT_TOL = 1e-6


def sign_class(W: float) -> str:
    return POSITIVE if W > 0 else ZERO if W == 0 else NEGATIVE


@dataclass(frozen=True)
class EtaEinsteinFamily:
    W: float

    @property
    def sign(self) -> str:
        return sign_class(self.W)

    @property
    def a(self) -> float:
        return 2 * self.W - 2

    @property
    def b(self) -> float:
        return 4 - 2 * self.W

    @property
    def scalar_curvature(self) -> float:
        return 4 * self.W - 2

    @property
    def domain(self):
        return Disk(1.0) if self.W < 0 else Plane()

    def p0(self, u, v):
        """Conformal factor; works on floats, arrays and jets."""
        if self.W > 0:
            return 0.5 * np.sqrt(self.W) * (1 + u * u + v * v)
        if self.W < 0:
            return 0.5 * np.sqrt(-self.W) * (1 - u * u - v * v)
        return 1 / np.sqrt(2) + 0 * u

    def omega0_closed_form(self, u, v):
        """Omega0 in the v0 = 0 gauge, via arctan (W > 0) or artanh (W < 0)."""
        W = self.W
        if W == 0:
            return -np.sqrt(2) * v
        if W > 0:
            a2 = 1 + u * u
            a = jm.sqrt(a2)
            return -(v / a2 + (1 + u * u + v * v) / (a2 * a) * jm.arctan(v / a)) / np.sqrt(W)
        a2 = 1 - u * u
        a = jm.sqrt(a2)
        return -(v / a2 + (1 - u * u - v * v) / (a2 * a) * jm.arctanh(v / a)) / np.sqrt(-W)

    def structure(self) -> SasakianStructure:
        return family_structure(self.W)


def family_structure(W: float) -> SasakianStructure:
    fam = EtaEinsteinFamily(float(W))
    return build_normal_form(fam.p0, domain=fam.domain, v0=0.0, name=f"eta-Einstein W={W:g}")


def _check_euler_domain(W, theta, arg=None):
    th = jm.value(theta)
    if W > 0 and not np.all((th > 0) & (th < np.pi)):
        raise DomainError(f"theta={th} outside (0, pi)")
    if arg is not None and np.any(np.abs(jm.value(arg)) >= 1 - ARTANH_GUARD):
        raise DomainError(f"artanh argument {jm.value(arg)} outside (-1, 1)")


def euler_transform(W: float, rho, theta, phi, sign: str | None = None):
    """Euler coordinates (rho, theta, phi) -> normal-form (r, u, v).

    Accepts floats, arrays or jets.  ``theta = 0`` is allowed in the
    positive class as the limit onto the axis.
    """
    if W == 0:
        raise DomainError("no Euler coordinates for W = 0")
    if sign is not None and sign != sign_class(W):
        raise ValueError(f"sign {sign!r} inconsistent with W={W}")
    cphi, sphi = jm.cos(phi), jm.sin(phi)
    if W > 0:
        th = jm.value(theta)
        if np.any((th < 0) | (th >= np.pi)):
            raise DomainError(f"theta={th} outside [0, pi)")
        t = jm.tan(theta / 2)
        q = jm.sqrt(1 + cphi * cphi * t * t)
        r = (rho + phi) / W - 2 * cphi * t / (W * q) * jm.arctan(sphi * t / q)
    else:
        t = jm.tanh(theta / 2)
        q = jm.sqrt(1 - cphi * cphi * t * t)
        arg = sphi * t / q
        _check_euler_domain(W, theta, arg)
        r = (rho + phi) / W + 2 * cphi * t / (W * q) * jm.arctanh(arg)
    return r, cphi * t, sphi * t


def euler_metric(W: float, point, sign: str | None = None) -> np.ndarray:
    """The displayed Euler-coordinate metric at (rho, theta, phi)."""
    return euler_metric_evaluator(W)(point)


def euler_metric_evaluator(W: float) -> MetricEvaluator:
    if W == 0:
        raise DomainError("no Euler coordinates for W = 0")

    def fn(rho, theta, phi):
        _check_euler_domain(W, theta)
        th = jm.value(theta)
        if W > 0 and np.any(np.isclose(np.sin(th), 0)):
            raise DomainError("Euler coordinates degenerate at theta in {0, pi}")
        if W > 0:
            c, s2, k = jm.cos(theta), jm.sin(theta) ** 2, 1.0
        else:
            c, s2, k = jm.cosh(theta), jm.sinh(theta) ** 2, -1.0
        fib = 1 / W**2
        return [[fib, 0.0, fib * c],
                [0.0, k / (2 * W), 0.0],
                [fib * c, 0.0, k * s2 / (2 * W) + fib * c * c]]

    return MetricEvaluator.from_coordinates(fn, labels=("rho", "theta", "phi"))


def euler_contact_form(W: float, point) -> np.ndarray:
    _, theta, _ = point
    c = np.cos(theta) if W > 0 else np.cosh(theta)
    return np.array([1.0, 0.0, c]) / W


def euler_pullback_residual(W: float, point, structure: SasakianStructure | None = None) -> dict:
    """Compare the normal form pulled back by the Euler transform with the Euler metric.

    Returns the max abs differences for the metric and for the contact form.
    """
    s = structure or family_structure(W)
    y = Jet.variables(point, 1)
    x = Jet.stack(euler_transform(W, *y))
    jac = x.grad().value  # jac[a, i] = d x^a / d y^i
    xv = x.value
    g = s.metric(xv)
    pulled = jac.T @ g @ jac
    eta = s.eta(xv) @ jac
    return {"metric": float(np.abs(pulled - euler_metric(W, point)).max()),
            "contact": float(np.abs(eta - euler_contact_form(W, point)).max())}


def random_euler_points(W: float, n: int, seed: int = 0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    rho = rng.uniform(-np.pi, np.pi, n)
    phi = rng.uniform(0, 2 * np.pi, n)
    theta = rng.uniform(0.15, np.pi - 0.15, n) if W > 0 else rng.uniform(0.05, 2.0, n)
    return np.column_stack([rho, theta, phi])


# residual and fit -----------------------------------------------------

def _frame_ricci(s: SasakianStructure, p):
    cb = curvature(s.metric, p)
    E = s.frame(p, order=1).real_frame().value
    return E @ cb.ricci @ E.T, E @ s.eta(p)


def eta_einstein_residual(s: SasakianStructure, a: float, b: float, samples) -> float:
    """Max over samples of the orthonormal-frame norm of Ric - a g - b eta eta."""
    worst = 0.0
    for p in np.atleast_2d(samples):
        ric, eta = _frame_ricci(s, p)
        worst = max(worst, float(np.linalg.norm(ric - a * np.eye(3) - b * np.outer(eta, eta))))
    return worst


@dataclass(frozen=True)
class EtaEinsteinFit:
    a: float
    b: float
    residual: float
    tol: float = FIT_TOL

    @property
    def is_eta_einstein(self) -> bool:
        return self.residual <= self.tol


def fit_eta_einstein(s: SasakianStructure, samples, tol: float = FIT_TOL) -> EtaEinsteinFit:
    """Least-squares (a, b) over all frame components at all samples."""
    samples = np.atleast_2d(samples)
    if len(samples) < 2:
        raise RankDeficientError("need at least two sample points")
    rows, rhs = [], []
    for p in samples:
        ric, eta = _frame_ricci(s, p)
        rows.append(np.stack([np.eye(3).ravel(), np.outer(eta, eta).ravel()], axis=1))
        rhs.append(ric.ravel())
    M, y = np.vstack(rows), np.concatenate(rhs)
    if np.linalg.matrix_rank(M) < 2:
        raise RankDeficientError("eta-Einstein design matrix is rank deficient")
    (a, b), *_ = np.linalg.lstsq(M, y, rcond=None)
    resid = eta_einstein_residual(s, a, b, samples)
    return EtaEinsteinFit(float(a), float(b), resid, tol)


def scalar_curvature_sign(W: float) -> int:
    """Sign of R = 4W - 2 for the family of Tanaka-Webster curvature W."""
    return int(np.sign(4 * W - 2))


def sign_table_row(W: float) -> str:
    """Which column of the sign table (R>0, R=0, R<0) the family falls in."""
    return {1: "R>0", 0: "R=0", -1: "R<0"}[scalar_curvature_sign(W)]
