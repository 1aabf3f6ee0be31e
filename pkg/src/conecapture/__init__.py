"""Spherical-cone Dirichlet eigenvalues and Brownian-pursuit survival exponents."""

__version__ = "0.1.0"

from .cone_spectra import (ConeSpec, EigenResult, HatTableRow, Verdict,
                           decay_exponent, double_cone_eigen, hat_t_table,
                           lambda_critical, m_exponent, rayleigh_bound_T2,
                           second_mode_eigen, truncated_cone_eigen, verdict,
                           vertex_angle_delta)
from .hyperfun import HyperParams, HypergeometricError, gauss_2f1
from .perturbed_domain import (ContainmentCertificate, NodalDomainSpec,
                               eigen_residual_check, g2_eigenfunction,
                               h_function, radial_mode_u, t2_boundary_beta,
                               verify_containment)
from .pursuit_mc import (ExponentFit, PursuitConfig, SurvivalCurve,
                         fit_tail_exponent, predicted_exponent, simulate,
                         survival_curve)
from .sinc_galerkin import (EigenEstimate, SincDiscretization,
                            TRIANGLE_LAMBDA1_ESTIMATE, convergence_study,
                            leading_eigen, make_discretization)

__all__ = [
    "ConeSpec", "ContainmentCertificate", "EigenEstimate", "EigenResult",
    "ExponentFit", "HatTableRow", "HyperParams", "HypergeometricError",
    "NodalDomainSpec", "PursuitConfig", "SincDiscretization",
    "SurvivalCurve", "TRIANGLE_LAMBDA1_ESTIMATE", "Verdict",
    "convergence_study", "decay_exponent", "double_cone_eigen",
    "eigen_residual_check", "fit_tail_exponent", "g2_eigenfunction",
    "gauss_2f1", "h_function", "hat_t_table", "lambda_critical",
    "leading_eigen", "m_exponent", "make_discretization",
    "predicted_exponent", "radial_mode_u", "rayleigh_bound_T2",
    "second_mode_eigen", "simulate", "survival_curve", "t2_boundary_beta",
    "truncated_cone_eigen", "verdict", "verify_containment",
    "vertex_angle_delta", "__version__",
]
