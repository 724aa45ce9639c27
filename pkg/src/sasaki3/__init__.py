"""Sasakian 3-manifolds in normal form: curvature, spin coefficients and verification."""
from .jets import BACKEND, Jet
from .errors import (AccuracyError, CapabilityError, ConvergenceError, DegenerateMetricError,
                     DomainError, EvaluationError, ExpressionSyntaxError, FrameError,
                     PreconditionError, RankDeficientError, SasakiError)
from .fields import Disk, MetricEvaluator, Plane, Rectangle, ScalarJetField
from .curvature import christoffel, curvature, curvature_endomorphism, killing_residual
from .npp import (Triad, bianchi_residual, commutator_residual, curvature_identity_residual,
                  ricci_from_spin, ricci_projection, spin_coefficients)
from .sasaki import (SasakianStructure, build_normal_form, compute_tau0, contact_isometry_check,
                     integral_A, omega0, reduced_system_check, reduced_system_residual,
                     scalar_curvature_tw, verify_sasakian)
from .eta_einstein import (EtaEinsteinFamily, euler_metric, euler_transform, eta_einstein_residual,
                           family_structure, fit_eta_einstein)
from .elliptic import (GridField, SolverConfig, grid_to_field, solve_poisson,
                       solve_prescribed_curvature)
from .conformal import conformal_flatness_check, cotton_components_sasakian, weyl_schouten
from .expr import FieldExpression, parse_field_expression

__version__ = "0.1.0"
