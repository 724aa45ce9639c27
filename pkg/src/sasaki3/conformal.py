"""Weyl-Schouten (Cotton) tensor and conformal flatness of 3-metrics."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curvature import curvature_jets
from .errors import CapabilityError
from .fields import MetricEvaluator
from .jets import jeinsum
from .npp import MINUS, PLUS, ZERO, spin_jets

FLAT_TOL = 1e-5
PRECISE_QUAD_TOL = 1e-12
SIGNATURE_TOL = 1e-6


def weyl_schouten(metric: MetricEvaluator, p):
    """Return ``(C, T)`` at ``p``.

    ``C_ij = R_ij - R g_ij / 4`` and ``T_ijk = nabla_[i C_j]k``
    ``= (nabla_i C_jk - nabla_j C_ik) / 2``; ``T`` vanishes identically
    exactly when the metric is conformally flat.
    """
    if getattr(metric, "max_order", 3) < 3:
        raise CapabilityError("Cotton tensor needs third metric derivatives")
    cj = curvature_jets(metric, p, 3)
    C = cj.ricci - 0.25 * cj.scalar * cj.metric.truncate(1)
    dC = C.grad().value  # dC[j, k, i] = d_i C_jk
    gam = cj.christoffel.value
    Cv = C.value
    # nabla[i, j, k] = nabla_i C_jk
    nabla = (dC.transpose(2, 0, 1)
             - np.einsum("mij,mk->ijk", gam, Cv)
             - np.einsum("mik,jm->ijk", gam, Cv))
    return Cv, 0.5 * (nabla - nabla.transpose(1, 0, 2))


def frame_norm(T: np.ndarray, E: np.ndarray) -> float:
    """Frobenius norm of a covariant 3-tensor in the orthonormal frame rows ``E``."""
    return float(np.linalg.norm(np.einsum("ijk,ai,bj,ck->abc", T, E, E, E)))


def cotton_components_sasakian(s, p, metric: MetricEvaluator | None = None):
    """``(C00, C+-)`` from the adapted-frame spin coefficients.

    With ``X = delta tau + deltabar taubar - 2 tau taubar`` the components
    are ``C00 = -(X - 3)/2`` and ``C+- = (X - 1)/2``.
    """
    metric = metric or s.precise_metric(PRECISE_QUAD_TOL)
    _, sj = spin_jets(metric, s.frame(p, 3), p, 3)
    tau = sj.tau
    X = (sj.delta(tau) + sj.deltabar(tau.conj()) - 2 * tau * tau.conj()).value
    X = float(np.real(X))
    return -0.5 * (X - 3), 0.5 * (X - 1)


def cotton_frame_components(s, p, metric: MetricEvaluator | None = None):
    """``(C00, C+-)`` projected from the tensor route, for cross-checking."""
    metric = metric or s.precise_metric(PRECISE_QUAD_TOL)
    C, _ = weyl_schouten(metric, p)
    E = s.frame(p, 0).complex_frame().value
    proj = np.einsum("ai,bj,ij->ab", E, E, C)
    return float(np.real(proj[ZERO, ZERO])), float(np.real(proj[PLUS, MINUS]))


@dataclass(frozen=True)
class CottonReport:
    max_norm: float
    C00: tuple
    Cpm: tuple
    route_difference: float
    tol: float = FLAT_TOL

    @property
    def flat(self) -> bool:
        return self.max_norm <= self.tol

    @property
    def round_signature(self) -> bool:
        """Whether C00 = C+- = 1/2 at every sample."""
        vals = np.concatenate([self.C00, self.Cpm])
        return bool(np.all(np.abs(vals - 0.5) <= SIGNATURE_TOL))

    def summary(self) -> dict:
        return {"cotton_norm": self.max_norm, "C00_max": float(np.max(self.C00)),
                "C00_min": float(np.min(self.C00)), "Cpm_max": float(np.max(self.Cpm)),
                "Cpm_min": float(np.min(self.Cpm)), "route_difference": self.route_difference,
                "flat": self.flat, "round_signature": self.round_signature}


def conformal_flatness_check(s, samples, tol: float = FLAT_TOL) -> CottonReport:
    """Cotton norms in the adapted orthonormal frame plus the (C00, C+-) signature."""
    metric = s.precise_metric(PRECISE_QUAD_TOL)
    worst, c00, cpm, diff = 0.0, [], [], 0.0
    for p in np.atleast_2d(samples):
        C, T = weyl_schouten(metric, p)
        E = s.frame(p, 0).real_frame().value
        worst = max(worst, frame_norm(T, E))
        a, b = cotton_components_sasakian(s, p, metric)
        ta, tb = cotton_frame_components(s, p, metric)
        diff = max(diff, abs(a - ta), abs(b - tb))
        c00.append(a)
        cpm.append(b)
    return CottonReport(worst, tuple(c00), tuple(cpm), diff, tol)
