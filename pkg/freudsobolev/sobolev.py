"""
Monic Freud-Sobolev polynomials Q_n for the inner product

    <p, q>_1 = int p q e^{-x^4} dx + M0 p(0) q(0) + M1 p'(0) q'(0).

Q_n is evaluated through its kernel representation

    Q_n(x) = F_n(x) - M0 Q_n(0) K_{n-1}(x,0) - M1 Q_n'(0) K^{(0,1)}_{n-1}(x,0),

which is regular at the origin. The connection (quotient) form and the
five-term recurrence are kept as independent cross-checks.
"""

from __future__ import annotations

import logging
import re
from typing import Optional, Union

import numpy as np

from .coeffs import freud_quadrature
from .exceptions import ConfigurationError, DomainError, OracleError
from .freud import ArrayLike, boundary_values, kernel_sums, kernel_x0_derivs, monic_block
from .models import FreudTable, SobolevParams, SobolevTable

logger = logging.getLogger(__name__)

ORACLE_CAP = 14
ORACLE_AGREEMENT = 1e-10

PolySpec = Union[str, tuple[str, int]]


def build_sobolev_table(
    ft: FreudTable,
    params: SobolevParams,
    n_max: Optional[int] = None,
) -> SobolevTable:
    """
    Boundary values, norms and recurrence coefficients of Q_0..Q_{n_max}.

    Entries that vanish by parity are set to exact zeros.
    """
    n_max = ft.n_max - 2 if n_max is None else n_max
    if n_max < 0 or n_max > ft.n_max - 2:
        raise ConfigurationError(
            "Sobolev table needs 0 <= n_max <= FreudTable.n_max - 2",
            {"n_max": n_max, "freud_n_max": ft.n_max},
        )
    M0, M1 = params.M0, params.M1

    bv = boundary_values(ft, n_max)
    k00, k11 = kernel_sums(ft, n_max)
    k00_prev = np.concatenate([[0.0], k00[:-1]])
    k11_prev = np.concatenate([[0.0], k11[:-1]])

    index = np.arange(n_max + 1)
    r = index % 2
    odd = r == 1
    a_sq = ft.a_sq[: n_max + 3]
    norm = ft.norm_sq[: n_max + 1]

    d0 = 1.0 + M0 * k00_prev
    d1 = 1.0 + M1 * k11_prev
    q0 = bv.f0 / d0
    q1 = bv.f1 / d1
    kappa0 = np.where(odd, 0.0, M0 * bv.f0 ** 2 / (norm * d0))
    kappa1 = np.where(odd, M1 * bv.f1 ** 2 / (norm * d1), 0.0)

    phi0 = a_sq[1: n_max + 2] + a_sq[: n_max + 1]
    a10 = np.where(odd, -kappa1 / (4.0 * phi0), 0.0)
    b11 = a_sq[: n_max + 1] * np.where(odd, kappa1, kappa0)

    qnorm_sq = norm * (1.0 + kappa0 + kappa1)
    shift = a10 + b11
    lambda_nn = (phi0 + shift) * norm / qnorm_sq + shift
    lambda_nm2 = np.zeros(n_max + 1)
    if n_max >= 2:
        n = index[2:]
        lambda_nm2[2:] = a_sq[n - 1] * (a_sq[n] + b11[n]) * norm[n - 2] / qnorm_sq[n - 2]

    rho_odd = d1[1::2].copy()

    logger.debug("Sobolev table built: M0=%g M1=%g n_max=%d", M0, M1, n_max)
    return SobolevTable(
        params=params,
        n_max=n_max,
        q0=q0,
        q1=q1,
        kappa0=kappa0,
        kappa1=kappa1,
        r=r,
        a10=a10,
        b11=b11,
        qnorm_sq=qnorm_sq,
        zeta=1.0 / np.sqrt(qnorm_sq),
        lambda_nn=lambda_nn,
        lambda_nm2=lambda_nm2,
        rho_odd=rho_odd,
        k00_prev=k00_prev,
        k11_prev=k11_prev,
    )


def connection_coeffs(st: SobolevTable, n: int) -> tuple[float, float, float, float, int]:
    """(A10(n), B11(n), kappa0_n, kappa1_n, r_n) of the connection formula."""
    if n < 1:
        raise DomainError("Connection coefficients need n >= 1", n)
    st.require(n)
    return (
        float(st.a10[n]),
        float(st.b11[n]),
        float(st.kappa0[n]),
        float(st.kappa1[n]),
        int(st.r[n]),
    )


def connection_coeffs_direct(st: SobolevTable, ft: FreudTable, n: int) -> tuple[float, float]:
    """A10(n) and B11(n) from Q_n(0), Q_n'(0) and boundary values of F."""
    if n < 1:
        raise DomainError("Connection coefficients need n >= 1", n)
    st.require(n)
    bv = boundary_values(ft, n)
    M0, M1 = st.params.M0, st.params.M1
    norm_prev = ft.norm_sq[n - 1]
    a10 = -M1 * st.q1[n] * bv.f0[n - 1] / norm_prev
    b11 = (M0 * st.q0[n] * bv.f0[n] + M1 * st.q1[n] * bv.f1[n]) / norm_prev
    return float(a10), float(b11)


def _shape_output(values: np.ndarray, max_deriv: int) -> ArrayLike:
    if max_deriv == 0:
        value = values[0]
        return value if np.ndim(value) else float(value)
    return values


def eval_Q(st: SobolevTable, ft: FreudTable, n: int, x: ArrayLike, max_deriv: int = 0) -> ArrayLike:
    """
    Q_n and its derivatives from the kernel representation.

    Returns the value for max_deriv = 0, otherwise an array whose leading
    axis runs over the derivative order.
    """
    st.require(n)
    x = np.asarray(x, dtype=float)
    fn = monic_block(ft, n, x, max_deriv)[:, n]
    k, k01 = kernel_x0_derivs(ft, n - 1, x, max_deriv)
    values = fn - st.params.M0 * st.q0[n] * k - st.params.M1 * st.q1[n] * k01
    return _shape_output(values, max_deriv)


def monic_quotient_Q(st: SobolevTable, ft: FreudTable, n: int, x: ArrayLike) -> ArrayLike:
    """Q_n = [(x^2 + A10(n)) F_n + B11(n) x F_{n-1}] / x^2, valid for x != 0."""
    if n < 1:
        raise DomainError("Quotient form needs n >= 1", n)
    st.require(n)
    x = np.asarray(x, dtype=float)
    if np.any(x == 0):
        raise DomainError("Quotient form is singular at x = 0", 0.0)
    block = monic_block(ft, n, x)[0]
    result = ((x * x + st.a10[n]) * block[n] + st.b11[n] * x * block[n - 1]) / (x * x)
    return result if result.ndim else float(result)


def five_term(st: SobolevTable, n: int) -> tuple[float, float]:
    """(lambda_{n,n}, lambda_{n,n-2}); the second is 0 for n < 2."""
    if n < 0:
        raise DomainError("Five-term coefficients need n >= 0", n)
    st.require(n)
    return float(st.lambda_nn[n]), float(st.lambda_nm2[n])


def five_term_unroll(st: SobolevTable, n: int, x: ArrayLike) -> ArrayLike:
    """Q_n from Q_0 = 1, Q_1 = x and Q_{k+2} = (x^2 - lambda_kk) Q_k - lambda_{k,k-2} Q_{k-2}."""
    st.require(n)
    x = np.asarray(x, dtype=float)
    values = [np.ones_like(x), x.copy()]
    for k in range(0, n - 1):
        prev = values[k - 2] if k >= 2 else 0.0
        values.append((x * x - st.lambda_nn[k]) * values[k] - st.lambda_nm2[k] * prev)
    result = values[n]
    return result if result.ndim else float(result)


def five_term_residual(st: SobolevTable, ft: FreudTable, n: int, x: ArrayLike) -> np.ndarray:
    """|x^2 Q_n - Q_{n+2} - lambda_nn Q_n - lambda_{n,n-2} Q_{n-2}| relative to the largest term."""
    st.require(n + 2)
    x = np.asarray(x, dtype=float)
    qn = np.asarray(eval_Q(st, ft, n, x))
    qn2 = np.asarray(eval_Q(st, ft, n + 2, x))
    qprev = np.asarray(eval_Q(st, ft, n - 2, x)) if n >= 2 else np.zeros_like(x)
    terms = [x * x * qn, qn2, st.lambda_nn[n] * qn, st.lambda_nm2[n] * qprev]
    residual = terms[0] - terms[1] - terms[2] - terms[3]
    scale = np.max(np.abs(terms))
    return np.abs(residual) / scale


def connection_residual(st: SobolevTable, ft: FreudTable, n: int, x: ArrayLike) -> np.ndarray:
    """
    x^2 Q_n = F_{n+2} + (phi_n(0) + A10 + B11) F_n + a_{n-1}^2 (a_n^2 + B11) F_{n-2},
    residual relative to the largest term.
    """
    if n < 1:
        raise DomainError("Connection residual needs n >= 1", n)
    st.require(n)
    x = np.asarray(x, dtype=float)
    block = monic_block(ft, n + 2, x)[0]
    a_sq = ft.a_sq
    shift = st.a10[n] + st.b11[n]
    qn = np.asarray(eval_Q(st, ft, n, x))
    terms = [
        x * x * qn,
        block[n + 2],
        (ft.phi(n) + shift) * block[n],
        a_sq[n - 1] * (a_sq[n] + st.b11[n]) * block[n - 2] if n >= 2 else np.zeros_like(x),
    ]
    residual = terms[0] - terms[1] - terms[2] - terms[3]
    return np.abs(residual) / np.max(np.abs(terms))


def eval_limit_poly(ft: FreudTable, n: int, x: ArrayLike, max_deriv: int = 0) -> ArrayLike:
    """
    Limit polynomials of Q_n as a mass grows without bound.

    Even n >= 2: G_n = F_n - [F_n(0)/K_{n-2}(0,0)] K_{n-2}(x,0).
    Odd n >= 3:  J_n = F_n - [F_n'(0)/K^{(1,1)}_{n-2}(0,0)] K^{(0,1)}_{n-2}(x,0).
    """
    if n < 2:
        raise DomainError("Limit polynomials need degree >= 2", n)
    ft.require(n)
    x = np.asarray(x, dtype=float)
    fn = monic_block(ft, n, x, max_deriv)[:, n]
    k, k01 = kernel_x0_derivs(ft, n - 2, x, max_deriv)
    bv = boundary_values(ft, n)
    k00, k11 = kernel_sums(ft, n - 2)
    if n % 2 == 0:
        values = fn - (bv.f0[n] / k00[n - 2]) * k
    else:
        values = fn - (bv.f1[n] / k11[n - 2]) * k01
    return _shape_output(values, max_deriv)


def limit_constant(st: SobolevTable, n: int) -> float:
    """c = M1 K^{(1,1)}_{n-2}(0,0) for odd n, the weight of J_n in Q_n."""
    if n % 2 == 0 or n < 3:
        raise DomainError("Limit constant needs odd n >= 3", n)
    st.require(n)
    return float(st.params.M1 * st.k11_prev[n])


def limit_identity(st: SobolevTable, ft: FreudTable, n: int, x: ArrayLike) -> tuple[float, np.ndarray]:
    """c and the relative residual of (1 + c) Q_n = F_n + c J_n for odd n."""
    c = limit_constant(st, n)
    x = np.asarray(x, dtype=float)
    q = np.asarray(eval_Q(st, ft, n, x))
    f = monic_block(ft, n, x)[0, n]
    j = np.asarray(eval_limit_poly(ft, n, x))
    terms = [(1.0 + c) * q, f, c * j]
    residual = terms[0] - terms[1] - terms[2]
    return c, np.abs(residual) / np.max(np.abs(terms))


_SPEC_PATTERN = re.compile(r"^\s*([FQ])\s*_?\s*(\d+)\s*$")


def _parse_spec(spec: PolySpec) -> tuple[str, int]:
    if isinstance(spec, str):
        match = _SPEC_PATTERN.match(spec)
        if not match:
            raise ConfigurationError(f"Cannot parse polynomial spec '{spec}'", {"spec": spec})
        family, degree = match.group(1), int(match.group(2))
    else:
        family, degree = spec
    if family not in ("F", "Q"):
        raise ConfigurationError(f"Unknown polynomial family '{family}'", {"spec": spec})
    if not 0 <= degree <= ORACLE_CAP:
        raise ConfigurationError(
            f"Oracle degree must lie in 0..{ORACLE_CAP}",
            {"spec": spec, "degree": degree},
        )
    return family, degree


def sobolev_inner_oracle(
    ft: FreudTable,
    params: SobolevParams,
    p_spec: PolySpec,
    q_spec: PolySpec,
    points: int = 4000,
    panel: int = 40,
) -> float:
    """
    <p, q>_1 by quadrature plus the mass terms.

    p and q are given as ("F", k) / ("Q", k) or strings like "Q5".
    """
    specs = [_parse_spec(p_spec), _parse_spec(q_spec)]
    st = build_sobolev_table(ft, params, min(ORACLE_CAP, ft.n_max - 2))

    def evaluate(spec: tuple[str, int], x: np.ndarray) -> np.ndarray:
        family, degree = spec
        if family == "F":
            return monic_block(ft, degree, x, 1)[:, degree]
        return np.asarray(eval_Q(st, ft, degree, x, 1))

    def integral(count: int) -> tuple[float, float]:
        nodes, weights = freud_quadrature(ORACLE_CAP + 1, count, panel)
        p = evaluate(specs[0], nodes)[0]
        q = evaluate(specs[1], nodes)[0]
        scale = np.sqrt(np.sum(weights * p * p) * np.sum(weights * q * q))
        return float(np.sum(weights * p * q)), float(scale)

    coarse, scale = integral(points)
    fine, _ = integral(2 * points)
    discrepancy = abs(coarse - fine) / max(scale, 1e-300)
    if discrepancy > ORACLE_AGREEMENT:
        raise OracleError("Quadrature under-resolved for the Sobolev inner product", discrepancy)

    at_zero = [evaluate(spec, np.zeros(())) for spec in specs]
    masses = params.M0 * at_zero[0][0] * at_zero[1][0] + params.M1 * at_zero[0][1] * at_zero[1][1]
    return fine + float(masses)
