"""
Zeros of F_n, Q_n, the limit polynomials and K^{(0,1)}_n(x,0).

Freud zeros come from the symmetric tridiagonal recurrence matrix. All other
families are bracketed by sign changes on the positive axis, polished by
bisection plus a few guarded Newton steps, and mirrored by parity.
"""

from __future__ import annotations

import logging
from typing import Callable, Iterable

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.optimize import bisect

from .exceptions import BracketingError, ConfigurationError, DomainError
from .freud import boundary_values, kernel_x0_derivs, monic_block
from .models import FreudTable, InterlacingReport, SobolevParams, SobolevTable, SweepResult, ZeroLabel, ZeroSet
from .sobolev import build_sobolev_table, eval_limit_poly, eval_Q, limit_constant
from .utils import loglog_slope

logger = logging.getLogger(__name__)

Evaluator = Callable[[np.ndarray, int], np.ndarray]

MAX_GRID = 2 ** 14
BASE_GRID = 129
BISECT_XTOL = 1e-8
NEWTON_STEPS = 5


def _values(evaluate: Evaluator, x) -> np.ndarray:
    return np.asarray(evaluate(np.asarray(x, dtype=float), 0))[0]


def _polish(evaluate: Evaluator, lo: float, hi: float) -> float:
    root = bisect(lambda t: float(_values(evaluate, t)), lo, hi, xtol=BISECT_XTOL)
    value = abs(float(_values(evaluate, root)))
    for _ in range(NEWTON_STEPS):
        f, df = np.asarray(evaluate(np.asarray(root), 1))
        if df == 0 or value == 0:
            break
        candidate = root - float(f) / float(df)
        if not lo <= candidate <= hi:
            break
        candidate_value = abs(float(_values(evaluate, candidate)))
        if candidate_value >= value:
            break
        root, value = candidate, candidate_value
    return root


def positive_roots(
    evaluate: Evaluator,
    count: int,
    upper: float,
    seeds: Iterable[float] = (),
    label: str = "",
    n: int = 0,
    near_origin: float = 1e-6,
) -> np.ndarray:
    """
    The `count` zeros of an even or odd polynomial on (0, upper].

    evaluate(x, max_deriv) must return an array whose leading axis is the
    derivative order. The grid is the union of the seeds, a geometric
    cluster near the origin and a uniform mesh that doubles until `count`
    sign changes appear.
    """
    if count == 0:
        return np.zeros(0)
    seeds = np.asarray([s for s in seeds if 0 < s < upper], dtype=float)
    cluster = np.geomspace(near_origin * upper, upper, BASE_GRID)
    uniform = BASE_GRID

    while True:
        grid = np.unique(np.concatenate([
            seeds,
            cluster,
            np.linspace(0.0, upper, uniform)[1:],
        ]))
        values = _values(evaluate, grid)
        exact = grid[values == 0.0]
        signs = np.sign(values)
        brackets = np.nonzero(signs[:-1] * signs[1:] < 0)[0]
        found = len(brackets) + len(exact)
        logger.debug("Bracketing %s n=%d: %d of %d on %d points", label, n, found, count, len(grid))
        if found == count:
            break
        if found > count or 2 * uniform > MAX_GRID:
            raise BracketingError(label, n, found, count, len(grid))
        uniform = 2 * uniform - 1

    roots = [_polish(evaluate, grid[i], grid[i + 1]) for i in brackets]
    return np.sort(np.concatenate([roots, exact]))


def _mirror(positive: np.ndarray, with_origin: bool) -> np.ndarray:
    middle = [0.0] if with_origin else []
    return np.concatenate([-positive[::-1], middle, positive])


def freud_zeros(ft: FreudTable, n: int) -> ZeroSet:
    """
    Zeros of F_n as eigenvalues of the zero-diagonal Jacobi matrix with
    off-diagonals a_k, polished by one Newton step and symmetrized.
    """
    ft.require(n)
    if n == 0:
        return ZeroSet(ZeroLabel.FREUD, 0, np.zeros(0), np.zeros(0))
    if n == 1:
        nodes = np.zeros(1)
    else:
        nodes = eigh_tridiagonal(np.zeros(n), np.sqrt(ft.a_sq[1:n]), eigvals_only=True)

    block = monic_block(ft, n, nodes, 1)
    step = np.divide(block[0, n], block[1, n], out=np.zeros(n), where=block[1, n] != 0)
    nodes = np.sort(nodes - step)
    nodes = 0.5 * (nodes - nodes[::-1])
    if n % 2:
        nodes[n // 2] = 0.0

    residuals = np.abs(monic_block(ft, n, nodes)[0, n])
    return ZeroSet(
        ZeroLabel.FREUD,
        n,
        nodes,
        residuals,
        origin_multiplicity=n % 2,
    )


def _freud_seeds(ft: FreudTable, degrees: Iterable[int]) -> list[float]:
    seeds: list[float] = []
    for degree in degrees:
        if 1 <= degree <= ft.n_max:
            seeds.extend(freud_zeros(ft, degree).positive)
    return seeds


def q_zeros(st: SobolevTable, ft: FreudTable, n: int) -> ZeroSet:
    """Real simple zeros of Q_n, ascending, with |Q_n| residuals."""
    st.require(n)
    if n == 0:
        return ZeroSet(ZeroLabel.SOBOLEV, 0, np.zeros(0), np.zeros(0), st.params)

    seeds = _freud_seeds(ft, (n - 1, n, n + 1))
    if n >= 2:
        limit_label = ZeroLabel.LIMIT_G if n % 2 == 0 else ZeroLabel.LIMIT_J
        seeds.extend(limit_and_kernel_zeros(ft, n, limit_label).positive)
    upper = max(seeds, default=1.0) + 2.0

    def evaluate(x: np.ndarray, max_deriv: int) -> np.ndarray:
        return np.asarray(eval_Q(st, ft, n, x, max_deriv)).reshape((max_deriv + 1,) + x.shape)

    positive = positive_roots(evaluate, n // 2, upper, seeds, ZeroLabel.SOBOLEV.value, n)
    zeros = _mirror(positive, n % 2 == 1)
    residuals = np.abs(np.asarray(eval_Q(st, ft, n, zeros)))
    return ZeroSet(
        ZeroLabel.SOBOLEV,
        n,
        zeros,
        residuals,
        params=st.params,
        origin_multiplicity=n % 2,
    )


def limit_and_kernel_zeros(ft: FreudTable, n: int, label: ZeroLabel) -> ZeroSet:
    """
    Zeros of G_n (even n >= 2), J_n (odd n >= 3) or K^{(0,1)}_n(x,0) (odd n).

    The origin is stored once with multiplicity 2, 3 or 1 respectively.
    """
    if label == ZeroLabel.LIMIT_G:
        if n < 2 or n % 2:
            raise DomainError("G_n needs even n >= 2", n)
        multiplicity = 2

        def evaluate(x: np.ndarray, max_deriv: int) -> np.ndarray:
            return np.asarray(eval_limit_poly(ft, n, x, max_deriv)).reshape((max_deriv + 1,) + x.shape)
    elif label == ZeroLabel.LIMIT_J:
        if n < 3 or n % 2 == 0:
            raise DomainError("J_n needs odd n >= 3", n)
        multiplicity = 3

        def evaluate(x: np.ndarray, max_deriv: int) -> np.ndarray:
            return np.asarray(eval_limit_poly(ft, n, x, max_deriv)).reshape((max_deriv + 1,) + x.shape)
    elif label == ZeroLabel.KERNEL01:
        if n < 1 or n % 2 == 0:
            raise DomainError("K^{(0,1)}_n(x,0) zeros need odd n >= 1", n)
        multiplicity = 1

        def evaluate(x: np.ndarray, max_deriv: int) -> np.ndarray:
            return kernel_x0_derivs(ft, n, x, max_deriv)[1]
    else:
        raise ConfigurationError(f"Label {label.value} is not a limit or kernel family")

    count = (n - multiplicity) // 2
    seeds = _freud_seeds(ft, (n - 1, n))
    upper = max(seeds, default=1.0) + 2.0
    positive = positive_roots(evaluate, count, upper, seeds, label.value, n, near_origin=1e-3)
    zeros = _mirror(positive, True)
    residuals = np.abs(_values(evaluate, zeros))
    return ZeroSet(label, n, zeros, residuals, origin_multiplicity=multiplicity)


def interlacing_report(st: SobolevTable, ft: FreudTable, n: int) -> InterlacingReport:
    """Count the zeros of Q_n inside each gap between consecutive zeros of Q_{n+1}."""
    if n < 2:
        raise DomainError("Interlacing report needs n >= 2", n)
    inner = q_zeros(st, ft, n).zeros
    outer = q_zeros(st, ft, n + 1).zeros
    counts = [
        int(np.count_nonzero((inner > lo) & (inner < hi)))
        for lo, hi in zip(outer[:-1], outer[1:])
    ]
    report = InterlacingReport(n=n, params=st.params, inner=inner, outer=outer, counts=counts)
    if not report.interlaced:
        logger.info("Interlacing rupture for n=%d at M0=%g M1=%g, gaps %s",
                    n, st.params.M0, st.params.M1, report.ruptures)
    return report


def _rate_window(grid: np.ndarray) -> np.ndarray:
    window = grid >= 100.0
    if np.count_nonzero(window) < 2:
        window = np.zeros(len(grid), dtype=bool)
        window[-2:] = True
    return window


def m1_sweep(ft: FreudTable, n_odd: int, m1_grid: Iterable[float], M0: float = 0.0) -> SweepResult:
    """
    Positive zeros of Q_{n_odd} along an increasing M1 grid.

    Besides the trajectories this records the limits y_k (zeros of J_{n_odd},
    y_1 = 0), the limits extrapolated linearly in 1/c from the last two grid
    points, and the constants lim c (eta_k^2 - y_k^2) predicted as
    -2 y_k F(y_k) / J'(y_k), or -6 F'(0) / J'''(0) for y_1 = 0, where
    c = M1 K^{(1,1)}_{n_odd-2}(0,0).
    """
    grid = np.asarray(list(m1_grid), dtype=float)
    if n_odd < 3 or n_odd % 2 == 0:
        raise ConfigurationError("m1_sweep needs an odd degree >= 3", {"n_odd": n_odd})
    if len(grid) < 2 or np.any(grid <= 0) or np.any(np.diff(grid) <= 0):
        raise ConfigurationError("M1 grid must be positive and strictly increasing", {"m1_grid": grid.tolist()})

    count = n_odd // 2
    trajectories = np.zeros((count, len(grid)))
    constants = np.zeros(len(grid))
    for i, M1 in enumerate(grid):
        st = build_sobolev_table(ft, SobolevParams(M0, float(M1)), n_odd)
        trajectories[:, i] = q_zeros(st, ft, n_odd).positive
        constants[i] = limit_constant(st, n_odd)
    monotone = [bool(np.all(np.diff(row) < 0)) for row in trajectories]

    j_positive = limit_and_kernel_zeros(ft, n_odd, ZeroLabel.LIMIT_J).positive
    limits = np.concatenate([[0.0], j_positive])

    c1, c2 = constants[-2], constants[-1]
    squares = trajectories[:, -2:] ** 2 - limits[:, None] ** 2
    extrapolated_sq = limits ** 2 + (c2 * squares[:, 1] - c1 * squares[:, 0]) / (c2 - c1)
    extrapolated = np.sqrt(np.maximum(extrapolated_sq, 0.0))

    bv = boundary_values(ft, n_odd)
    j_origin = np.asarray(eval_limit_poly(ft, n_odd, 0.0, 3))
    predicted = np.zeros(count)
    predicted[0] = -6.0 * bv.f1[n_odd] / j_origin[3]
    if count > 1:
        f_values = monic_block(ft, n_odd, j_positive)[0, n_odd]
        j_slopes = np.asarray(eval_limit_poly(ft, n_odd, j_positive, 1))[1]
        predicted[1:] = -2.0 * j_positive * f_values / j_slopes
    measured = c2 * squares[:, 1]

    window = _rate_window(grid)
    rates = np.array([
        loglog_slope(grid[window], np.abs(row[window] - y))
        for row, y in zip(trajectories, limits)
    ])

    logger.info("M1 sweep n=%d over %d points: monotone=%s", n_odd, len(grid), all(monotone))
    return SweepResult(
        n_odd=n_odd,
        m1_grid=grid,
        trajectories=trajectories,
        monotone=monotone,
        limit_zeros=limits,
        extrapolated=extrapolated,
        predicted_constants=predicted,
        measured_constants=measured,
        rate_exponents=rates,
    )
