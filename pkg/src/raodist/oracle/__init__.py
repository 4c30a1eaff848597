"""Numerical oracle: Fisher matrices, geodesics and KL checks from first principles."""

from .fisher import numeric_fisher_expectation, numeric_fisher_hessian, relative_error
from .geodesic import (
    BVPResult,
    GeodesicPath,
    christoffel_fd,
    geodesic_bvp_distance,
    geodesic_ode_residual,
    path_length,
    shoot_distance,
    solve_geodesic_bvp,
)
from .kl import kl_divergence, kl_local_ratio, point_at_distance
from .quadrature import QuadratureScheme, gk_integrate
from .verify import ORACLE_SUITE, check_family, run_verification

__all__ = [
    "BVPResult",
    "GeodesicPath",
    "ORACLE_SUITE",
    "QuadratureScheme",
    "check_family",
    "christoffel_fd",
    "geodesic_bvp_distance",
    "geodesic_ode_residual",
    "gk_integrate",
    "kl_divergence",
    "kl_local_ratio",
    "numeric_fisher_expectation",
    "numeric_fisher_hessian",
    "path_length",
    "point_at_distance",
    "relative_error",
    "run_verification",
    "shoot_distance",
    "solve_geodesic_bvp",
]
