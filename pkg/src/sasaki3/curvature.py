"""Levi-Civita curvature of a 3-metric by tensor calculus on jets.

Index conventions (fixed, and pinned by the Sasakian test on the round
three-sphere family):

* ``Gamma[i, j, k]`` is the Christoffel symbol of the second kind
  :math:`\\Gamma^i_{jk}`.
* ``riemann[i, j, k, l]`` is :math:`R^i{}_{jkl}` with
  :math:`R(\\partial_k, \\partial_l)\\partial_j = R^i{}_{jkl}\\partial_i` and
  :math:`R(X, Y) = \\nabla_X\\nabla_Y - \\nabla_Y\\nabla_X - \\nabla_{[X,Y]}`.
* ``ricci[j, l] = riemann[k, j, k, l]``; the unit sphere has positive
  curvature with these choices.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import MetricEvaluator
from .jets import Jet, inv3, jeinsum

EYE3 = np.eye(3)
REEB = np.array([1.0, 0.0, 0.0])


@dataclass(frozen=True)
class CurvatureJets:
    """Jets of the curvature quantities at one point.

    With a metric jet of order ``n``: ``christoffel`` has order ``n - 1`` and
    everything curvature-valued has order ``n - 2``.
    """

    metric: Jet
    inverse: Jet
    christoffel: Jet
    riemann: Jet
    ricci: Jet
    scalar: Jet


@dataclass(frozen=True)
class CurvatureBundle:
    metric: np.ndarray
    christoffel: np.ndarray
    riemann: np.ndarray
    riemann_lowered: np.ndarray
    ricci: np.ndarray
    scalar: float

    @property
    def einstein(self) -> np.ndarray:
        return self.ricci - 0.5 * self.scalar * self.metric


def christoffel_from_jet(g: Jet) -> tuple[Jet, Jet]:
    """Return ``(g^{-1}, Gamma)`` as jets one order below ``g``."""
    ginv = inv3(g.truncate(g.order - 1))
    dg = g.grad()  # dg[i, j, k] = d_k g_ij
    first_kind = 0.5 * (dg + dg.transpose(0, 2, 1) - dg.transpose(2, 0, 1))
    return ginv, jeinsum("il,ljk->ijk", ginv, first_kind)


def riemann_from_christoffel(gamma: Jet) -> Jet:
    dgam = gamma.grad()  # dgam[i, j, k, m] = d_m Gamma^i_jk
    return (dgam.transpose(0, 2, 3, 1) - dgam.transpose(0, 2, 1, 3)
            + jeinsum("ikm,mlj->ijkl", gamma, gamma)
            - jeinsum("ilm,mkj->ijkl", gamma, gamma))


def curvature_jets(metric: MetricEvaluator, p, order: int = 3) -> CurvatureJets:
    """Curvature jets at ``p`` from a metric jet of the given order (>= 2)."""
    g = metric.jet(p, order)
    ginv, gamma = christoffel_from_jet(g)
    riem = riemann_from_christoffel(gamma)
    ric = jeinsum("ijkl,ik->jl", riem, EYE3)
    scal = jeinsum("jl,jl->", ginv, ric)
    return CurvatureJets(g, ginv, gamma, riem, ric, scal)


def christoffel(metric: MetricEvaluator, p) -> np.ndarray:
    """Christoffel symbols of the second kind at ``p``, shape (3, 3, 3)."""
    _, gamma = christoffel_from_jet(metric.jet(p, 1))
    return gamma.value


def curvature(metric: MetricEvaluator, p) -> CurvatureBundle:
    cj = curvature_jets(metric, p, 2)
    g = cj.metric.value
    riem = cj.riemann.value
    return CurvatureBundle(
        metric=g,
        christoffel=cj.christoffel.value,
        riemann=riem,
        riemann_lowered=np.einsum("im,mjkl->ijkl", g, riem),
        ricci=cj.ricci.value,
        scalar=float(cj.scalar.value),
    )


def _vector_jet(X, p, order: int) -> Jet:
    if callable(X):
        return X(np.asarray(p, dtype=float), order)
    return Jet.constant(np.asarray(X, dtype=float), 3, order)


def killing_residual(metric: MetricEvaluator, X, p) -> np.ndarray:
    """Symmetrised covariant derivative of the 1-form dual to ``X`` at ``p``.

    ``X`` is either a constant component vector or a callable
    ``X(point, order) -> Jet`` of shape (3,).
    """
    g = metric.jet(p, 1)
    _, gamma = christoffel_from_jet(g)
    x_low = jeinsum("jk,k->j", g, _vector_jet(X, p, 1))
    dx = x_low.grad().value  # dx[j, i] = d_i X_j
    cov = dx.T - np.einsum("kij,k->ij", gamma.value, x_low.value)  # cov[i, j] = nabla_i X_j
    return 0.5 * (cov + cov.T)


def curvature_endomorphism(metric: MetricEvaluator, X, Y, p, reeb=REEB) -> np.ndarray:
    """Components of ``R(X, e0) Y`` at ``p`` (``e0`` defaults to d/dr)."""
    riem = curvature(metric, p).riemann
    return np.einsum("ijkl,j,k,l->i", riem, np.asarray(Y, float), np.asarray(X, float), np.asarray(reeb, float))


def einstein_divergence(metric: MetricEvaluator, p) -> np.ndarray:
    """``g^{ik} nabla_k E_ij`` at ``p``; vanishes by the contracted Bianchi identity."""
    cj = curvature_jets(metric, p, 3)
    g = cj.metric.truncate(1)
    E = cj.ricci - 0.5 * cj.scalar * g
    dE = E.grad().value  # dE[i, j, k] = d_k E_ij
    gam = cj.christoffel.value
    Ev = E.value
    cov = dE - np.einsum("mki,mj->ijk", gam, Ev) - np.einsum("mkj,im->ijk", gam, Ev)
    return np.einsum("ik,ijk->j", cj.inverse.value, cov)
