"""
Evaluation of the monic Freud polynomials and their kernels.

Values come from the upward recurrence F_{k+1} = x F_k - a_k^2 F_{k-1}
and derivatives from its differentiated form

    F^{(j)}_{k+1} = j F^{(j-1)}_k + x F^{(j)}_k - a_k^2 F^{(j)}_{k-1}.

Orthonormal values are obtained by scaling with gamma_n at the end.
"""

from __future__ import annotations

import logging
from typing import Union

import numpy as np
from mpmath import mp

from .coeffs import freud_quadrature
from .exceptions import ConfigurationError, DomainError
from .models import BoundaryValues, EvalChain, FreudTable, KernelValues

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

MAX_DERIVATIVE = 3
DIAGONAL_SWITCH = 1e-6


def _check_deriv(max_deriv: int) -> None:
    if not 0 <= max_deriv <= MAX_DERIVATIVE:
        raise ConfigurationError(
            f"max_deriv must lie in 0..{MAX_DERIVATIVE}",
            {"max_deriv": max_deriv},
        )


def monic_block(table: FreudTable, n: int, x: ArrayLike, max_deriv: int = 0) -> np.ndarray:
    """
    F_k^{(j)}(x) for k = 0..n and j = 0..max_deriv.

    Returns an array of shape (max_deriv + 1, n + 1, *x.shape).
    """
    table.require(n)
    _check_deriv(max_deriv)
    x = np.asarray(x, dtype=float)
    a_sq = table.a_sq

    block = np.zeros((max_deriv + 1, n + 1) + x.shape)
    block[0, 0] = 1.0
    if n >= 1:
        block[0, 1] = x
        if max_deriv >= 1:
            block[1, 1] = 1.0
    for k in range(1, n):
        block[0, k + 1] = x * block[0, k] - a_sq[k] * block[0, k - 1]
        for j in range(1, max_deriv + 1):
            block[j, k + 1] = (
                j * block[j - 1, k] + x * block[j, k] - a_sq[k] * block[j, k - 1]
            )
    return block


def _eval_chain_exact(table: FreudTable, n: int, x: float, max_deriv: int) -> EvalChain:
    a_sq = table.a_sq_hp or tuple(float(v) for v in table.a_sq)
    with mp.workdps(table.precision_digits):
        xm = mp.mpf(x)
        rows = [[mp.mpf(0)] * (n + 1) for _ in range(max_deriv + 1)]
        rows[0][0] = mp.mpf(1)
        if n >= 1:
            rows[0][1] = xm
            if max_deriv >= 1:
                rows[1][1] = mp.mpf(1)
        for k in range(1, n):
            a = mp.mpf(a_sq[k])
            rows[0][k + 1] = xm * rows[0][k] - a * rows[0][k - 1]
            for j in range(1, max_deriv + 1):
                rows[j][k + 1] = j * rows[j - 1][k] + xm * rows[j][k] - a * rows[j][k - 1]
        prev = n - 1 if n >= 1 else 0
        values = (float(rows[0][n]), float(rows[0][prev]) if n >= 1 else 0.0)
        derivs = tuple(
            (float(rows[j][n]), float(rows[j][prev]) if n >= 1 else 0.0)
            for j in range(1, max_deriv + 1)
        )
    phi = float(table.phi(n, x)) if n + 1 <= table.n_max else None
    return EvalChain(n=n, x=float(x), values=values, derivs=derivs, phi=phi)


def eval_chain(
    table: FreudTable,
    n: int,
    x: float,
    max_deriv: int = 0,
    exact: bool = False,
) -> EvalChain:
    """
    F_n(x), F_{n-1}(x) and their derivatives up to max_deriv.

    With exact=True the recurrence runs in mpmath at the table's precision,
    using the unrounded coefficients when the table carries them.
    """
    table.require(n)
    _check_deriv(max_deriv)
    if exact:
        return _eval_chain_exact(table, n, x, max_deriv)

    block = monic_block(table, n, float(x), max_deriv)
    prev = n - 1 if n >= 1 else None

    def pair(j: int) -> tuple[float, float]:
        return float(block[j, n]), float(block[j, prev]) if prev is not None else 0.0

    phi = float(table.phi(n, x)) if n + 1 <= table.n_max else None
    return EvalChain(
        n=n,
        x=float(x),
        values=pair(0),
        derivs=tuple(pair(j) for j in range(1, max_deriv + 1)),
        phi=phi,
    )


def orthonormal(table: FreudTable, n: int, x: ArrayLike, max_deriv: int = 0) -> np.ndarray:
    """f_n^{(j)}(x) = gamma_n F_n^{(j)}(x), shape (max_deriv + 1, *x.shape)."""
    block = monic_block(table, n, x, max_deriv)
    return table.gamma[n] * block[:, n]


def boundary_values(table: FreudTable, n_max: int) -> BoundaryValues:
    """F_n^{(j)}(0) for j = 0..3 from the recurrences specialized to x = 0."""
    table.require(n_max)
    a_sq = table.a_sq
    f = np.zeros((4, n_max + 1))
    f[0, 0] = 1.0
    if n_max >= 1:
        f[1, 1] = 1.0
    for k in range(1, n_max):
        f[0, k + 1] = -a_sq[k] * f[0, k - 1]
        for j in range(1, 4):
            f[j, k + 1] = j * f[j - 1, k] - a_sq[k] * f[j, k - 1]

    odd = np.arange(n_max + 1) % 2 == 1
    f[0, odd] = 0.0
    f[1, ~odd] = 0.0
    f[2, odd] = 0.0
    f[3, ~odd] = 0.0
    return BoundaryValues(n_max=n_max, f0=f[0], f1=f[1], f2=f[2], f3=f[3])


def kernel_direct(table: FreudTable, n: int, x: ArrayLike, y: ArrayLike) -> ArrayLike:
    """K_n(x, y) as the sum of F_k(x) F_k(y) / ||F_k||^2 over k <= n."""
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    fx = monic_block(table, n, x)[0]
    fy = monic_block(table, n, y)[0]
    result = np.tensordot(1.0 / table.norm_sq[: n + 1], fx * fy, axes=(0, 0))
    return result if np.ndim(result) else float(result)


def kernel(table: FreudTable, n: int, x: ArrayLike, y: ArrayLike) -> ArrayLike:
    """
    Christoffel-Darboux kernel K_n(x, y).

    Uses the quotient (F_{n+1}(x)F_n(y) - F_n(x)F_{n+1}(y)) / (||F_n||^2 (x - y))
    and switches to the direct sum when |x - y| < 1e-6 (1 + |x|).
    """
    table.require(n + 1)
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    bx = monic_block(table, n + 1, x)[0]
    by = monic_block(table, n + 1, y)[0]

    diff = x - y
    near = np.abs(diff) < DIAGONAL_SWITCH * (1.0 + np.abs(x))
    safe = np.where(near, 1.0, diff)
    quotient = (bx[n + 1] * by[n] - bx[n] * by[n + 1]) / (table.norm_sq[n] * safe)
    direct = np.tensordot(1.0 / table.norm_sq[: n + 1], bx[: n + 1] * by[: n + 1], axes=(0, 0))
    result = np.where(near, direct, quotient)
    return result if result.ndim else float(result)


def kernel_confluent(table: FreudTable, n: int, x: ArrayLike) -> ArrayLike:
    """K_n(x, x) = (F'_{n+1}(x) F_n(x) - F'_n(x) F_{n+1}(x)) / ||F_n||^2."""
    block = monic_block(table, n + 1, x, max_deriv=1)
    result = (block[1, n + 1] * block[0, n] - block[1, n] * block[0, n + 1]) / table.norm_sq[n]
    return result if np.ndim(result) else float(result)


def kernel_sums(table: FreudTable, n_max: int) -> tuple[np.ndarray, np.ndarray]:
    """Cumulative K_n(0,0) and K_n^{(1,1)}(0,0) for n = 0..n_max."""
    bv = boundary_values(table, n_max)
    inv = 1.0 / table.norm_sq[: n_max + 1]
    return np.cumsum(bv.f0 ** 2 * inv), np.cumsum(bv.f1 ** 2 * inv)


def kernel_at_zero(table: FreudTable, n: int) -> KernelValues:
    """K_n(0,0), K_n^{(0,1)}(0,0) = 0 and K_n^{(1,1)}(0,0)."""
    table.require(n + 1)
    k00, k11 = kernel_sums(table, n)
    return KernelValues(n=n, k00=float(k00[n]), k01=0.0, k11=float(k11[n]))


def kernel_at_zero_confluent(table: FreudTable, n: int) -> tuple[float, float]:
    """K_n(0,0) and K_n^{(1,1)}(0,0) from boundary values of F_n and F_{n+1} only."""
    table.require(n + 1)
    bv = boundary_values(table, n + 1)
    f0, f1, f2, f3 = bv.f0, bv.f1, bv.f2, bv.f3
    norm = table.norm_sq[n]
    k00 = (f1[n + 1] * f0[n] - f1[n] * f0[n + 1]) / norm
    k11 = (
        (f2[n + 1] * f1[n] - f2[n] * f1[n + 1]) / 2.0
        + (f3[n + 1] * f0[n] - f3[n] * f0[n + 1]) / 6.0
    ) / norm
    return float(k00), float(k11)


def kernel_x0_derivs(
    table: FreudTable,
    n: int,
    x: ArrayLike,
    max_deriv: int = 0,
) -> tuple[np.ndarray, np.ndarray]:
    """
    x-derivatives of K_n(x, 0) and K_n^{(0,1)}(x, 0) up to max_deriv.

    Both come back with shape (max_deriv + 1, *x.shape). K_{-1} is zero.
    """
    x = np.asarray(x, dtype=float)
    if n < 0:
        zero = np.zeros((max_deriv + 1,) + x.shape)
        return zero, zero.copy()
    table.require(n + 1)
    block = monic_block(table, n, x, max_deriv)
    bv = boundary_values(table, n)
    inv = 1.0 / table.norm_sq[: n + 1]
    k = np.tensordot(bv.f0 * inv, block, axes=(0, 1))
    k01 = np.tensordot(bv.f1 * inv, block, axes=(0, 1))
    return k, k01


def kernel_x0(table: FreudTable, n: int, x: ArrayLike) -> tuple[ArrayLike, ArrayLike]:
    """(K_n(x,0), K_n^{(0,1)}(x,0)) by direct sums, regular at x = 0."""
    k, k01 = kernel_x0_derivs(table, n, x)
    if np.ndim(x):
        return k[0], k01[0]
    return float(k[0]), float(k01[0])


def kernel_x0_quotient(table: FreudTable, n: int, x: ArrayLike) -> tuple[ArrayLike, ArrayLike]:
    """Closed quotient forms of K_n(x,0) and K_n^{(0,1)}(x,0); singular at x = 0."""
    table.require(n + 1)
    x = np.asarray(x, dtype=float)
    if np.any(x == 0):
        raise DomainError("Quotient kernel forms are singular at x = 0", 0.0)
    block = monic_block(table, n + 1, x)[0]
    bv = boundary_values(table, n + 1)
    fn, fn1 = block[n], block[n + 1]
    norm = table.norm_sq[n]
    value_part = fn1 * bv.f0[n] - fn * bv.f0[n + 1]
    k = value_part / (norm * x)
    k01 = (x * (fn1 * bv.f1[n] - fn * bv.f1[n + 1]) + value_part) / (norm * x * x)
    if x.ndim:
        return k, k01
    return float(k), float(k01)


def _relative(residual: np.ndarray, *terms: np.ndarray) -> np.ndarray:
    scale = np.maximum.reduce([np.abs(t) for t in terms])
    return np.abs(residual) / np.maximum(scale, np.finfo(float).tiny)


def appell_residual(table: FreudTable, n: int, x: ArrayLike) -> np.ndarray:
    """
    f_n' - (n/a_n) f_{n-1} - 4 a_n a_{n-1} a_{n-2} f_{n-3}, relative to the largest term.
    """
    if n < 1:
        raise DomainError("Appell relation needs n >= 1", n)
    block = monic_block(table, n, x, max_deriv=1)
    gamma = table.gamma
    a = np.sqrt(table.a_sq)
    derivative = gamma[n] * block[1, n]
    lower = (n / a[n]) * gamma[n - 1] * block[0, n - 1]
    if n >= 3:
        third = 4.0 * a[n] * a[n - 1] * a[n - 2] * gamma[n - 3] * block[0, n - 3]
    else:
        third = np.zeros_like(lower)
    return _relative(derivative - lower - third, derivative, lower, third)


def structure_residual(table: FreudTable, n: int, x: ArrayLike) -> np.ndarray:
    """f_n' + 4 x a_n^2 f_n - 4 a_n phi_n(x) f_{n-1}, relative to the largest term."""
    if n < 1:
        raise DomainError("Structure relation needs n >= 1", n)
    x = np.asarray(x, dtype=float)
    block = monic_block(table, n, x, max_deriv=1)
    gamma = table.gamma
    a_n = np.sqrt(table.a_sq[n])
    derivative = gamma[n] * block[1, n]
    diagonal = 4.0 * x * table.a_sq[n] * gamma[n] * block[0, n]
    lower = 4.0 * a_n * table.phi(n, x) * gamma[n - 1] * block[0, n - 1]
    return _relative(derivative + diagonal - lower, derivative, diagonal, lower)


def reproducing_error(
    table: FreudTable,
    n: int,
    y: float,
    points: int = 4000,
    panel: int = 40,
) -> float:
    """
    max_k |int K_n(x, y) F_k(x) e^{-x^4} dx - F_k(y)| over k <= n.

    Errors are taken relative to max(1, |F_k(y)|).
    """
    table.require(n + 1)
    nodes, weights = freud_quadrature(2 * n, points, panel)
    kernel_values = kernel(table, n, nodes, np.full_like(nodes, y))
    basis = monic_block(table, n, nodes)[0]
    at_y = monic_block(table, n, float(y))[0]
    integrals = basis @ (weights * kernel_values)
    errors = np.abs(integrals - at_y) / np.maximum(1.0, np.abs(at_y))
    worst = float(np.max(errors))
    logger.debug("Reproducing check n=%d y=%.3f: max error %.3e", n, y, worst)
    return worst
