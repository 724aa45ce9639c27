"""Spin-coefficient (Newman-Penrose-Perjes) formalism for riemannian 3-metrics.

Frame indices run over ``0, +, -`` and are stored as ``0, 1, 2``.  The
complex frame is ``e_+ = (e_1 - i e_2)/sqrt(2)``, ``e_- = conj(e_+)``,
optionally multiplied by a phase ``exp(i * phase * r)``.  Connection
coefficients are ``gamma[m, n, p] = g(nabla_{e_p} e_m, e_n)``.

Derivatives of spin coefficients are never taken numerically: the whole
computation runs on jets, so ``D rho`` and friends come out exactly.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .curvature import curvature_jets, jeinsum
from .errors import FrameError
from .fields import MetricEvaluator
from .jets import Jet, exp

ORTHONORMAL_TOL = 1e-10
ZERO, PLUS, MINUS = 0, 1, 2
FRAME_METRIC = np.array([[1, 0, 0], [0, 0, 1], [0, 1, 0]], dtype=float)


@dataclass(frozen=True)
class Triad:
    """Orthonormal frame (e0, e1, e2) expanded about ``point``.

    Each leg is a real jet of shape (3,) over the coordinates (x0, x1, x2).
    """

    point: tuple
    e0: Jet
    e1: Jet
    e2: Jet
    phase: int = 0

    @classmethod
    def constant(cls, point, e0, e1, e2, order: int = 3) -> "Triad":
        legs = (Jet.constant(np.asarray(e, dtype=float), 3, order) for e in (e0, e1, e2))
        return cls(tuple(point), *legs)

    @property
    def order(self) -> int:
        return min(self.e0.order, self.e1.order, self.e2.order)

    def real_frame(self) -> Jet:
        return Jet.stack([self.e0, self.e1, self.e2])

    def complex_frame(self) -> Jet:
        """Rows ``e_0, e_+, e_-`` as a complex jet of shape (3, 3)."""
        plus = (self.e1 - 1j * self.e2) * (1 / np.sqrt(2))
        if self.phase:
            r = Jet.variable(self.point[0], 0, 3, plus.order)
            plus = plus * exp(1j * self.phase * r)
        e0 = self.e0.truncate(plus.order) + 0j
        return Jet.stack([e0, plus, plus.conj()])

    def check(self, g: np.ndarray, tol: float = ORTHONORMAL_TOL) -> None:
        E = self.real_frame().value
        gram = E @ g @ E.T
        err = np.abs(gram - np.eye(3)).max()
        if err > tol:
            raise FrameError(f"triad not orthonormal at {self.point}: max |g(e_a, e_b) - delta| = {err:.3e}")


@dataclass(frozen=True)
class SpinCoefficients:
    kappa: complex
    sigma: complex
    rho: complex
    tau: complex
    epsilon: complex
    gamma: np.ndarray = field(repr=False, default=None)

    def corrupted(self, **changes) -> "SpinCoefficients":
        """Copy with some scalars replaced (negative-control tests)."""
        vals = {k: getattr(self, k) for k in ("kappa", "sigma", "rho", "tau", "epsilon")}
        vals.update(changes)
        return SpinCoefficients(**vals, gamma=self.gamma)


@dataclass(frozen=True)
class RicciComponents:
    """Frame components of Ricci; ``R`` is the scalar curvature."""

    R00: complex
    Rpp: complex
    R0p: complex
    R0m: complex
    Rpm: complex
    R: float


# jet-level machinery --------------------------------------------------

def _scalar_jet(f, p, order: int) -> Jet:
    """Coerce a scalar field into a 3-variable jet about ``p = (x0, x1, x2)``."""
    if isinstance(f, Jet):
        return f
    if hasattr(f, "jet") and not isinstance(f, MetricEvaluator):  # ScalarJetField over (u, v)
        return f.jet(p[1], p[2], order).embed(3, (1, 2))
    if callable(f):
        return f(np.asarray(p, dtype=float), order)
    return Jet.constant(complex(f) if np.iscomplexobj(f) else float(f), 3, order)


def derivatives(E: Jet, f: Jet) -> Jet:
    """``(D f, delta f, delta-bar f)`` as a jet of shape (3,) + f.shape."""
    grad = f.grad()  # grad[..., i]
    lead = "abcdefgh"[: f.ndim]
    return jeinsum(f"mi,{lead}i->m{lead}", E, grad)


def connection_jets(g: Jet, gamma: Jet, E: Jet) -> Jet:
    """``gamma_mnp = g(nabla_{e_p} e_m, e_n)`` for the frame rows of ``E``."""
    dE = E.grad()  # dE[m, i, j] = d_j E_m^i
    nabla = dE + jeinsum("ijk,mk->mij", gamma, E)
    low = jeinsum("il,nl->ni", g, E)
    tmp = jeinsum("mij,ni->mnj", nabla, low)
    return jeinsum("mnj,pj->mnp", tmp, E)


@dataclass
class SpinJets:
    """Spin-coefficient jets at a point plus the frame that produced them."""

    E: Jet
    gamma: Jet

    @property
    def kappa(self):
        return self.gamma[PLUS, ZERO, ZERO]

    @property
    def sigma(self):
        return self.gamma[PLUS, ZERO, PLUS]

    @property
    def rho(self):
        return self.gamma[PLUS, ZERO, MINUS]

    @property
    def tau(self):
        return self.gamma[PLUS, MINUS, MINUS]

    @property
    def epsilon(self):
        return self.gamma[PLUS, MINUS, ZERO]

    def ops(self, f: Jet):
        """Return ``(D f, delta f, delta-bar f)`` as jets."""
        d = derivatives(self.E.truncate(f.order - 1), f)
        return d[0], d[1], d[2]

    def D(self, f: Jet) -> Jet:
        return self.ops(f)[0]

    def delta(self, f: Jet) -> Jet:
        return self.ops(f)[1]

    def deltabar(self, f: Jet) -> Jet:
        return self.ops(f)[2]


def spin_jets(metric: MetricEvaluator, triad: Triad, p, order: int = 3):
    """Curvature jets and spin-coefficient jets at ``p``."""
    cj = curvature_jets(metric, p, order)
    triad.check(cj.metric.value)
    E = triad.complex_frame()
    gamma = connection_jets(cj.metric, cj.christoffel, E)
    return cj, SpinJets(E, gamma)


def gram_schmidt_triad(metric: MetricEvaluator, p, order: int = 3) -> Triad:
    """Orthonormalise the coordinate basis (d0, d1, d2) at ``p``, as jets."""
    g = metric.jet(p, order)
    legs = []
    for k in range(3):
        vec = Jet.constant(np.eye(3)[k], 3, order)
        for e in legs:
            vec = vec - jeinsum("i,i->", jeinsum("ij,j->i", g, e), vec) * e
        norm2 = jeinsum("i,i->", jeinsum("ij,j->i", g, vec), vec)
        legs.append(vec * norm2 ** -0.5)
    return Triad(tuple(p), *legs)


# public operations ----------------------------------------------------

def spin_coefficients(metric: MetricEvaluator, triad: Triad, p) -> SpinCoefficients:
    g = metric.jet(p, 1)
    triad.check(g.value)
    from .curvature import christoffel_from_jet
    _, gam = christoffel_from_jet(g)
    E = triad.complex_frame().truncate(1)
    gamma = connection_jets(g.truncate(0), gam, E).value
    asym = np.abs(gamma + gamma.transpose(1, 0, 2)).max()
    if asym > ORTHONORMAL_TOL:
        raise FrameError(f"connection coefficients not antisymmetric in (m, n): {asym:.3e}")
    return SpinCoefficients(
        kappa=complex(gamma[PLUS, ZERO, ZERO]),
        sigma=complex(gamma[PLUS, ZERO, PLUS]),
        rho=complex(gamma[PLUS, ZERO, MINUS]),
        tau=complex(gamma[PLUS, MINUS, MINUS]),
        epsilon=complex(gamma[PLUS, MINUS, ZERO]),
        gamma=gamma,
    )


def directional_derivatives(triad: Triad, f, p):
    """``(D f, delta f, delta-bar f)`` at ``p``.

    ``f`` may be a :class:`~sasaki3.fields.ScalarJetField` over (u, v), a
    callable ``f(point, order) -> Jet``, or a 3-variable jet about ``p``.
    """
    fj = _scalar_jet(f, p, 1)
    d = derivatives(triad.complex_frame().truncate(0), fj).value
    return complex(d[0]), complex(d[1]), complex(d[2])


def commutator_residual(triad: Triad, spin: SpinCoefficients, f, p):
    """Residuals of the two commutator relations applied to ``f``."""
    fj = _scalar_jet(f, p, 2)
    E = triad.complex_frame()
    first = derivatives(E.truncate(1), fj)  # order 1
    second = derivatives(E.truncate(0), first).value  # second[a, b] = op_a op_b f
    Df, df, dbf = (complex(x) for x in first.value)
    k, s, r, t, e = spin.kappa, spin.sigma, spin.rho, spin.tau, spin.epsilon
    res1 = (second[ZERO, PLUS] - second[PLUS, ZERO]) - ((np.conj(r) + e) * df + s * dbf + k * Df)
    res2 = (second[PLUS, MINUS] - second[MINUS, PLUS]) - (np.conj(t) * dbf - t * df + (np.conj(r) - r) * Df)
    return complex(res1), complex(res2)


def _ricci_spin_jets(sj: SpinJets) -> dict:
    """Spin-form Ricci components from the spin coefficients (jets of order one less)."""
    k, s, r, t, e = sj.kappa, sj.sigma, sj.rho, sj.tau, sj.epsilon
    kb, sb, rb, tb = k.conj(), s.conj(), r.conj(), t.conj()
    D, d, db = sj.D, sj.delta, sj.deltabar
    R00 = D(r) + D(rb) - db(k) - d(kb) + t * k + tb * kb - 2 * k * kb - 2 * s * sb - r * r - rb * rb
    Rpp = -d(k) + D(s) - 2 * e * s - tb * k - k * k - s * rb - r * s
    R0p = -db(s) + d(r) + 2 * t * s + k * r - k * rb
    R0m = -db(e) + D(t) + k * sb - r * kb + e * t - e * kb + tb * sb - t * r
    Rpm = -db(k) + D(r) + d(t) + db(tb) + e * r - e * rb - k * kb + k * t - r * rb - r * r - 2 * t * tb
    half_R = (-2 * d(kb) + 2 * D(rb) + d(t) + db(tb) - 2 * k * kb + 2 * kb * tb - 2 * rb * rb - s * sb
              + e * r - e * rb - r * rb - 2 * t * tb)
    return {"R00": R00, "Rpp": Rpp, "R0p": R0p, "R0m": R0m, "Rpm": Rpm, "R": 2 * half_R}


def ricci_from_spin(metric: MetricEvaluator, triad: Triad, p) -> RicciComponents:
    _, sj = spin_jets(metric, triad, p, 3)
    comps = _ricci_spin_jets(sj)
    vals = {name: complex(j.value) for name, j in comps.items()}
    vals["R"] = vals["R"].real
    return RicciComponents(**vals)


def ricci_projection(metric: MetricEvaluator, triad: Triad, p) -> RicciComponents:
    """Tensor-route Ricci projected onto the complex frame (the comparison oracle)."""
    cj = curvature_jets(metric, p, 2)
    triad.check(cj.metric.value)
    E = triad.complex_frame().value
    Rf = E @ cj.ricci.value @ E.T
    return RicciComponents(R00=complex(Rf[0, 0]), Rpp=complex(Rf[1, 1]), R0p=complex(Rf[0, 1]),
                           R0m=complex(Rf[0, 2]), Rpm=complex(Rf[1, 2]), R=float(cj.scalar.value))


def curvature_identity_residual(metric: MetricEvaluator, triad: Triad, p):
    _, sj = spin_jets(metric, triad, p, 3)
    k, s, r, t, e = sj.kappa, sj.sigma, sj.rho, sj.tau, sj.epsilon
    D, d, db = sj.D, sj.delta, sj.deltabar
    kb, sb, rb, tb = k.conj(), s.conj(), r.conj(), t.conj()
    id1 = (D(r) - db(k) + k * t - r * r) - (D(rb) - d(kb) + kb * tb - rb * rb)
    id2 = (d(sb) - db(rb) - tb * sb - kb * rb) - (db(e) - D(t) - k * sb - e * t + e * kb + t * r)
    return complex(id1.value), complex(id2.value)


def bianchi_residual(metric: MetricEvaluator, triad: Triad, p):
    """Residuals of the two contracted Bianchi identities in spin form.

    The Einstein components come from the spin-coefficient Ricci, so this
    check never touches the tensor-route curvature.
    """
    _, sj = spin_jets(metric, triad, p, 3)
    comps = _ricci_spin_jets(sj)
    half_R = 0.5 * comps["R"]
    E00 = comps["R00"] - half_R
    Epm = comps["Rpm"] - half_R
    Epp = comps["Rpp"]
    Emm = Epp.conj()
    E0p, E0m = comps["R0p"], comps["R0m"]
    k, s, r, t, e = sj.kappa, sj.sigma, sj.rho, sj.tau, sj.epsilon
    kb, sb, rb, tb = k.conj(), s.conj(), r.conj(), t.conj()
    D, d, db = sj.D, sj.delta, sj.deltabar
    b1 = (D(E00) + db(E0p) + d(E0m) + (r + rb) * (Epm - E00)
          + (2 * kb - t) * E0p + (2 * k - tb) * E0m + sb * Epp + s * Emm)
    b2 = (D(E0p) + db(Epp) + d(Epm) + k * (Epm - E00)
          - (e + 2 * r + rb) * E0p - s * E0m + (kb - 2 * t) * Epp)
    return complex(b1.value), complex(b2.value)
