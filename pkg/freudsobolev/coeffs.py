"""
Recurrence coefficients of the monic orthogonal polynomials for e^{-x^4}.

The coefficients a_n^2 solve the string equation

    4 a_n^2 (a_{n+1}^2 + a_n^2 + a_{n-1}^2) = n,   a_0^2 = 0,

whose positive solution starts at a_1^2 = Gamma(3/4)/Gamma(1/4). Running
the equation forward from a_1^2 amplifies rounding errors by roughly
2 + sqrt(3) per step, so the primary method solves the truncated system
for (a_1^2, ..., a_N^2) at once with damped Newton in mpmath and closes it
with the Lew-Quarles estimate.
"""

from __future__ import annotations

import logging
import math
from typing import Optional

import numpy as np
from mpmath import mp

from .exceptions import ConfigurationError, DomainError, OracleError, SolverError
from .models import FreudTable, GammaConstants, MethodTag

logger = logging.getLogger(__name__)

STIELTJES_MAX_DEGREE = 60
CERTIFICATE_TOLERANCE = 1e-10


def gamma_constants(precision_digits: int = 50) -> GammaConstants:
    """Gamma(1/4), Gamma(3/4), a_1^2 and mu_0 = int e^{-x^4} dx."""
    if precision_digits < 16:
        raise ConfigurationError(
            "precision_digits must be at least 16",
            {"precision_digits": precision_digits},
        )
    with mp.workdps(precision_digits):
        g1 = mp.gamma(mp.mpf(1) / 4)
        g3 = mp.gamma(mp.mpf(3) / 4)
        return GammaConstants(
            gamma_quarter=g1,
            gamma_three_quarter=g3,
            a1_sq_exact=g3 / g1,
            mu0=g1 / 2,
            precision_digits=precision_digits,
        )


def lew_quarles_estimate(n: int) -> float:
    """(n/12)^{1/2} (1 + 1/(24 n^2)), the large-n estimate of a_n^2."""
    if n <= 0:
        raise DomainError("Lew-Quarles estimate needs n >= 1", n)
    return math.sqrt(n / 12.0) * (1.0 + 1.0 / (24.0 * n * n))


def _lew_quarles_mp(n: int):
    n = mp.mpf(n)
    return mp.sqrt(n / 12) * (1 + 1 / (24 * n * n))


def _string_residual(x: list, closure) -> list:
    size = len(x) - 1
    out = []
    for n in range(1, size + 1):
        right = x[n + 1] if n < size else closure
        out.append(4 * x[n] * (right + x[n] + x[n - 1]) - n)
    return out


def _scaled_norm(residual: list):
    return max(abs(r) / n for n, r in enumerate(residual, start=1))


def _solve_tridiagonal(lower: list, diag: list, upper: list, rhs: list) -> list:
    """Thomas algorithm; lower[0] and upper[-1] are ignored."""
    size = len(diag)
    c = [mp.mpf(0)] * size
    d = [mp.mpf(0)] * size
    c[0] = upper[0] / diag[0]
    d[0] = rhs[0] / diag[0]
    for i in range(1, size):
        denom = diag[i] - lower[i] * c[i - 1]
        c[i] = upper[i] / denom if i < size - 1 else mp.mpf(0)
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / denom
    out = [mp.mpf(0)] * size
    out[-1] = d[-1]
    for i in range(size - 2, -1, -1):
        out[i] = d[i] - c[i] * out[i + 1]
    return out


def _newton_string_system(size: int, tolerance: float, max_iterations: int) -> list:
    """
    Damped Newton on the string equation for a_1^2..a_size^2.

    Returns the list [a_0^2, ..., a_size^2] at the current mp precision.
    Iterates past `tolerance` while the residual keeps falling so the
    solution is accurate to the working precision.
    """
    closure = _lew_quarles_mp(size + 1)
    x = [mp.mpf(0)] + [_lew_quarles_mp(n) for n in range(1, size + 1)]
    residual = _string_residual(x, closure)
    norm = _scaled_norm(residual)
    floor = mp.mpf(10) ** (-(mp.dps - 6))

    for iteration in range(1, max_iterations + 1):
        if norm <= floor:
            break

        lower, diag, upper = [], [], []
        for n in range(1, size + 1):
            right = x[n + 1] if n < size else closure
            lower.append(4 * x[n])
            diag.append(4 * (right + 2 * x[n] + x[n - 1]))
            upper.append(4 * x[n])
        delta = _solve_tridiagonal(lower, diag, upper, [-r for r in residual])

        step = mp.mpf(1)
        while True:
            trial = [x[0]] + [x[n] + step * delta[n - 1] for n in range(1, size + 1)]
            if all(t > 0 for t in trial[1:]):
                trial_residual = _string_residual(trial, closure)
                trial_norm = _scaled_norm(trial_residual)
                if trial_norm < norm:
                    break
            step /= 2
            if step < mp.mpf(2) ** -40:
                if norm <= tolerance:
                    logger.debug("Newton stalled at residual %s, accepted", mp.nstr(norm, 5))
                    return x
                raise SolverError("Damped Newton step cannot reduce the residual", float(norm), iteration)

        x, residual, norm = trial, trial_residual, trial_norm
        logger.debug("Newton iteration %d: step=%s residual=%s", iteration, mp.nstr(step, 3), mp.nstr(norm, 5))
    else:
        if norm > tolerance:
            raise SolverError("Newton iteration did not converge", float(norm), max_iterations)

    return x


def table_from_a_sq(
    a_sq_hp: list,
    mu0,
    precision_digits: int,
    method_tag: MethodTag,
    keep_hp: bool = True,
) -> FreudTable:
    norms = [mu0]
    for value in a_sq_hp[1:]:
        norms.append(norms[-1] * value)
    a_sq = np.array([float(v) for v in a_sq_hp])
    norm_sq = np.array([float(v) for v in norms])
    gamma = np.array([float(1 / mp.sqrt(v)) for v in norms])
    return FreudTable(
        n_max=len(a_sq_hp) - 1,
        a_sq=a_sq,
        norm_sq=norm_sq,
        gamma=gamma,
        precision_digits=precision_digits,
        method_tag=method_tag,
        a_sq_hp=tuple(a_sq_hp) if keep_hp else (),
    )


def build_freud_table(
    n_max: int,
    precision_digits: int = 64,
    tolerance: float = 1e-14,
    max_iterations: int = 200,
    buffer: int = 50,
) -> FreudTable:
    """
    Solve the string equation for a_1^2..a_{n_max}^2 by damped Newton.

    The system is solved on N = n_max + buffer unknowns with the closure
    a_{N+1}^2 = lew_quarles_estimate(N+1); the buffer is discarded.
    The result is certified against a_1^2 = Gamma(3/4)/Gamma(1/4).
    """
    if n_max < 2:
        raise ConfigurationError("n_max must be at least 2", {"n_max": n_max})
    constants = gamma_constants(precision_digits)

    with mp.workdps(precision_digits):
        logger.info("Solving string equation: n_max=%d buffer=%d dps=%d", n_max, buffer, precision_digits)
        x = _newton_string_system(n_max + buffer, tolerance, max_iterations)
        x = x[: n_max + 1]

        deviation = abs(x[1] - constants.a1_sq_exact)
        if deviation > CERTIFICATE_TOLERANCE:
            raise SolverError(
                "Newton converged to a solution that fails the a_1^2 certificate",
                float(deviation),
                max_iterations,
            )
        table = table_from_a_sq(x, constants.mu0, precision_digits, MethodTag.NEWTON_SYSTEM)

    logger.info("Freud table ready: a_1^2 deviation %.3e", float(deviation))
    return table


def forward_hp_table(n_max: int, precision_digits: Optional[int] = None) -> FreudTable:
    """
    Forward recursion of the string equation from the exact a_1^2.

    Only stable because the working precision is at least 8 * n_max digits;
    kept as an independent certificate of the Newton table.
    """
    if n_max < 2:
        raise ConfigurationError("n_max must be at least 2", {"n_max": n_max})
    digits = max(precision_digits or 0, 8 * n_max, 16)
    constants = gamma_constants(digits)
    with mp.workdps(digits):
        x = [mp.mpf(0), constants.a1_sq_exact]
        for n in range(1, n_max):
            x.append(mp.mpf(n) / (4 * x[n]) - x[n] - x[n - 1])
        return table_from_a_sq(x, constants.mu0, digits, MethodTag.FORWARD_HP)


def instability_profile(table: FreudTable, n_stop: Optional[int] = None) -> np.ndarray:
    """|error| of float64 forward recursion against `table`, indexed by n."""
    n_stop = min(n_stop or table.n_max, table.n_max)
    forward = np.zeros(n_stop + 1)
    forward[1] = table.a_sq[1]
    for n in range(1, n_stop):
        forward[n + 1] = n / (4.0 * forward[n]) - forward[n] - forward[n - 1]
        if not np.isfinite(forward[n + 1]):
            forward[n + 2:] = np.nan
            break
    return np.abs(forward - table.a_sq[: n_stop + 1])


def string_residuals(table: FreudTable) -> np.ndarray:
    """|4 a_n^2 (a_{n+1}^2 + a_n^2 + a_{n-1}^2) - n| for n = 1..n_max-1."""
    a = table.a_sq
    n = np.arange(1, table.n_max)
    return np.abs(4.0 * a[n] * (a[n + 1] + a[n] + a[n - 1]) - n)


def truncation_half_width(max_degree: int) -> float:
    """Half-width X of [-X, X] large enough for degree-max_degree integrands."""
    return max(3.2, 2.0 * (max(max_degree, 1) / 12.0) ** 0.25 + 2.0)


def gauss_legendre_rule(half_width: float, points: int, panel: int = 40) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes and weights on [-half_width, half_width]."""
    panels = max(1, points // panel)
    base_nodes, base_weights = np.polynomial.legendre.leggauss(panel)
    edges = np.linspace(-half_width, half_width, panels + 1)
    mids = 0.5 * (edges[1:] + edges[:-1])
    halves = 0.5 * (edges[1:] - edges[:-1])
    nodes = (mids[:, None] + halves[:, None] * base_nodes[None, :]).ravel()
    weights = (halves[:, None] * base_weights[None, :]).ravel()
    return nodes, weights


def freud_quadrature(max_degree: int, points: int, panel: int = 40) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights for int p(x) e^{-x^4} dx, polynomial degree <= 2 * max_degree."""
    nodes, weights = gauss_legendre_rule(truncation_half_width(max_degree), points, panel)
    return nodes, weights * np.exp(-nodes ** 4)


def _stieltjes_recurrence(n_max: int, nodes: np.ndarray, weights: np.ndarray) -> tuple[float, np.ndarray]:
    mu0 = float(np.sum(weights))
    a_sq = np.zeros(n_max + 1)
    p_prev = np.zeros_like(nodes)
    p = np.full_like(nodes, 1.0 / math.sqrt(mu0))
    b_prev = 0.0
    # alpha_k vanishes for the symmetric weight
    for k in range(n_max):
        q = nodes * p - b_prev * p_prev
        b = math.sqrt(float(np.sum(weights * q * q)))
        a_sq[k + 1] = b * b
        p_prev, p, b_prev = p, q / b, b
    return mu0, a_sq


def stieltjes_oracle(n_max: int, quadrature_points: int = 4000, panel: int = 40) -> FreudTable:
    """
    Discretized Stieltjes procedure on e^{-x^4} dx in double precision.

    The same computation with twice the points must agree to 1e-12,
    otherwise the quadrature is declared under-resolved.
    """
    if n_max > STIELTJES_MAX_DEGREE:
        raise ConfigurationError(
            f"Stieltjes oracle is limited to n_max <= {STIELTJES_MAX_DEGREE}",
            {"n_max": n_max},
        )
    if n_max < 1:
        raise ConfigurationError("n_max must be at least 1", {"n_max": n_max})

    mu0, a_sq = _stieltjes_recurrence(n_max, *freud_quadrature(n_max, quadrature_points, panel))
    mu0_fine, a_sq_fine = _stieltjes_recurrence(n_max, *freud_quadrature(n_max, 2 * quadrature_points, panel))

    discrepancy = max(
        abs(mu0 - mu0_fine) / mu0,
        float(np.max(np.abs(a_sq - a_sq_fine) / np.maximum(1.0, a_sq_fine))),
    )
    logger.debug("Stieltjes oracle refinement discrepancy %.3e", discrepancy)
    if discrepancy > 1e-12:
        raise OracleError("Quadrature under-resolved for the Stieltjes oracle", discrepancy)

    norm_sq = mu0 * np.concatenate([[1.0], np.cumprod(a_sq[1:])])
    return FreudTable(
        n_max=n_max,
        a_sq=a_sq,
        norm_sq=norm_sq,
        gamma=1.0 / np.sqrt(norm_sq),
        precision_digits=16,
        method_tag=MethodTag.STIELTJES,
    )
