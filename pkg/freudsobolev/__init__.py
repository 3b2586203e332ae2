"""
freudsobolev - Freud and Freud-Sobolev orthogonal polynomials

Recurrence coefficients of the monic orthogonal polynomials for e^{-x^4},
their Sobolev-type modification by point masses M0, M1 at the origin,
zeros and interlacing, the holonomic equation with its electrostatic
reading, and reproduction of the published zero tables.
"""

from .coeffs import (
    build_freud_table,
    forward_hp_table,
    gamma_constants,
    lew_quarles_estimate,
    stieltjes_oracle,
)
from .engine import ReferenceComparisonEngine, compare
from .freud import (
    boundary_values,
    eval_chain,
    kernel,
    kernel_at_zero,
    kernel_x0,
    monic_block,
    orthonormal,
)
from .holonomic import (
    biquartic,
    biquartic_hp,
    biquartic_roots_hp,
    electrostatic_residual,
    ladder_system,
    ode_coeffs,
    ode_coeffs_at,
    u_roots,
    z_asymptotics,
)
from .models import (
    FreudTable,
    MethodTag,
    RunConfig,
    SobolevParams,
    SobolevTable,
    ZeroLabel,
    ZeroSet,
)
from .rational import RationalFn
from .runner import TableProvider, load_config
from .sobolev import (
    build_sobolev_table,
    connection_coeffs,
    eval_limit_poly,
    eval_Q,
    five_term,
    sobolev_inner_oracle,
)
from .tables import build_table
from .verify import GlobalReport, run_verification
from .zeros import freud_zeros, interlacing_report, limit_and_kernel_zeros, m1_sweep, q_zeros

__version__ = "1.0.0"
__all__ = [
    # Coefficients
    "build_freud_table",
    "forward_hp_table",
    "gamma_constants",
    "lew_quarles_estimate",
    "stieltjes_oracle",
    "FreudTable",
    "MethodTag",
    # Freud polynomials and kernels
    "boundary_values",
    "eval_chain",
    "kernel",
    "kernel_at_zero",
    "kernel_x0",
    "monic_block",
    "orthonormal",
    # Sobolev polynomials
    "build_sobolev_table",
    "connection_coeffs",
    "eval_limit_poly",
    "eval_Q",
    "five_term",
    "sobolev_inner_oracle",
    "SobolevParams",
    "SobolevTable",
    # Zeros
    "freud_zeros",
    "interlacing_report",
    "limit_and_kernel_zeros",
    "m1_sweep",
    "q_zeros",
    "ZeroLabel",
    "ZeroSet",
    # Holonomic equation
    "biquartic",
    "biquartic_hp",
    "biquartic_roots_hp",
    "electrostatic_residual",
    "ladder_system",
    "ode_coeffs",
    "ode_coeffs_at",
    "u_roots",
    "z_asymptotics",
    "RationalFn",
    # Tables and verification
    "build_table",
    "ReferenceComparisonEngine",
    "compare",
    "GlobalReport",
    "run_verification",
    # Configuration
    "RunConfig",
    "TableProvider",
    "load_config",
]
