"""Property suites over the coefficient, polynomial, zero and ODE layers."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from .coeffs import (
    forward_hp_table,
    gamma_constants,
    instability_profile,
    lew_quarles_estimate,
    stieltjes_oracle,
    string_residuals,
)
from .comparators import check_bound, check_decay_exponent
from .engine import ReferenceComparisonEngine
from .freud import (
    appell_residual,
    boundary_values,
    kernel,
    kernel_at_zero_confluent,
    kernel_direct,
    kernel_sums,
    monic_block,
    reproducing_error,
    structure_residual,
)
from .holonomic import (
    biquartic,
    biquartic_roots_hp,
    closed_form_R,
    electrostatic_residual,
    imaginary_residual,
    ladder_system,
    lowering_residual,
    ode_coeffs,
    ode_coeffs_at,
    ode_residual,
    pole_avoiding_samples,
    raising_residual,
    u4_asymptotic,
    u_roots,
    z_asymptotics,
)
from .models import CellStatus, ErrorResponse, FreudTable, PropertyResult, RunConfig, SobolevParams, ZeroLabel
from .runner import load_reference, reference_path
from .sobolev import (
    build_sobolev_table,
    connection_coeffs_direct,
    eval_Q,
    five_term_residual,
    five_term_unroll,
    limit_identity,
    monic_quotient_Q,
    sobolev_inner_oracle,
)
from .tables import build_table
from .utils import loglog_slope, semilog_slope
from .zeros import freud_zeros, limit_and_kernel_zeros, m1_sweep, q_zeros

logger = logging.getLogger(__name__)

SUITES = ("coeffs", "freud", "sobolev", "zeros", "holonomic")
MASS_GRID = (0.1, 1.0, 10.0)
ODE_MASSES = (0.0, 0.1, 1.0, 10.0)


@dataclass
class GlobalReport:
    """Global verification report across suites."""
    total: int = 0
    passed: int = 0
    failed: int = 0
    informational: int = 0
    results: list[PropertyResult] = field(default_factory=list)
    timestamp: str = ""

    def __post_init__(self):
        if not self.timestamp:
            self.timestamp = datetime.now(timezone.utc).isoformat().replace("+00:00", "Z")

    def add(self, result: PropertyResult) -> None:
        self.results.append(result)
        if result.informational:
            self.informational += 1
            return
        self.total += 1
        if result.passed:
            self.passed += 1
        else:
            self.failed += 1

    def to_dict(self) -> dict:
        pass_rate = f"{(self.passed / self.total * 100):.1f}%" if self.total > 0 else "0.0%"
        return {
            "timestamp": self.timestamp,
            "summary": {
                "total_checks": self.total,
                "passed": self.passed,
                "failed": self.failed,
                "informational": self.informational,
                "pass_rate": pass_rate,
            },
            "results": [r.to_dict() for r in self.results],
        }

    def print_summary(self):
        pass_rate = f"{(self.passed / self.total * 100):.1f}%" if self.total > 0 else "0.0%"
        for r in self.results:
            status = "INFO" if r.informational else ("PASS" if r.passed else "FAIL")
            line = f"{status}: {r.suite}.{r.name} measured={r.measured:.3e} tolerance={r.tolerance:.1e}"
            print(line + (f" ({r.message})" if r.message else ""))
        print(f"\nVerification: {self.passed}/{self.total} passed ({pass_rate})")
        if self.failed > 0:
            print(f"  Failed: {self.failed}")
        if self.informational:
            print(f"  Informational: {self.informational}")


class _Suite:
    """Collects PropertyResults for one suite."""

    def __init__(self, name: str, config: RunConfig):
        self.name = name
        self.config = config
        self.results: list[PropertyResult] = []

    def bound(self, check: str, measured: float, key: str) -> None:
        tolerance = self.config.tol(key)
        passed, message = check_bound(float(measured), tolerance)
        self.results.append(PropertyResult(self.name, check, passed, float(measured), tolerance, message=message))

    def flag(self, check: str, passed: bool, measured: float = 0.0, message: str = "") -> None:
        self.results.append(PropertyResult(self.name, check, bool(passed), float(measured), 0.0, message=message))

    def decay(self, check: str, fitted: float, stated: float) -> None:
        slack = self.config.tol("exponent_slack")
        passed, message = check_decay_exponent(fitted, stated, slack)
        self.results.append(PropertyResult(self.name, check, passed, fitted, stated + slack, message=message))

    def info(self, check: str, measured: float, message: str = "") -> None:
        self.results.append(PropertyResult(self.name, check, True, float(measured), 0.0, True, message))

    def table(self, ft: FreudTable, table_id: int) -> None:
        path = reference_path(self.config, table_id)
        if not Path(path).exists():
            self.info(f"table{table_id}_reference", 0.0, f"reference file {path} not found")
            return
        engine = ReferenceComparisonEngine(self.config.tol("table"))
        report = engine.compare(build_table(ft, table_id), load_reference(str(path)))
        if isinstance(report, ErrorResponse):
            self.flag(f"table{table_id}_reproduction", False, message=report.error["message"])
            return
        worst = max(
            (abs(float(c.expected) - float(c.computed)) for c in report.cells
             if isinstance(c.expected, float) and c.computed is not None and c.status != CellStatus.SUSPECT),
            default=0.0,
        )
        self.flag(f"table{table_id}_reproduction", report.is_match, worst,
                  f"{len(report.mismatches)} mismatches, {len(report.suspects)} suspect")


def _decay_window(n_max: int, lo: int = 20, hi: int = 200) -> np.ndarray:
    return np.arange(lo, min(hi, n_max) + 1)


def coeffs_suite(ft: FreudTable, config: RunConfig) -> list[PropertyResult]:
    suite = _Suite("coeffs", config)
    constants = gamma_constants(max(32, ft.precision_digits))
    suite.bound("a1_certificate", abs(ft.a_sq[1] - float(constants.a1_sq_exact)), "a1_certificate")

    residuals = string_residuals(ft)
    suite.bound("string_residual", float(np.max(residuals / np.arange(1, ft.n_max))), "string_residual")

    n_oracle = min(60, ft.n_max)
    oracle = stieltjes_oracle(n_oracle, config.quadrature_points, config.quadrature_panel)
    suite.bound("stieltjes_agreement",
                float(np.max(np.abs(oracle.a_sq - ft.a_sq[: n_oracle + 1]))), "oracle_agreement")

    forward = forward_hp_table(n_oracle)
    suite.bound("forward_hp_agreement",
                float(np.max(np.abs(forward.a_sq - ft.a_sq[: n_oracle + 1]))), "oracle_agreement")

    window = _decay_window(ft.n_max)
    deviation = [abs(ft.a_sq[n] / lew_quarles_estimate(n) - 1.0) for n in window]
    suite.decay("lew_quarles_decay", loglog_slope(window, deviation), -4.0)

    profile = instability_profile(ft, 40)
    finite = np.isfinite(profile) & (profile > 0)
    steps = np.nonzero(finite)[0]
    growth = 10 ** semilog_slope(steps, profile[finite]) if len(steps) > 2 else float("nan")
    suite.info("forward_instability_rate", growth, "per-step error growth of float64 forward recursion")
    return suite.results


def freud_suite(ft: FreudTable, config: RunConfig) -> list[PropertyResult]:
    suite = _Suite("freud", config)
    x = np.linspace(-2.0, 2.0, 41)
    top = min(40, ft.n_max - 1)

    suite.bound("appell", max(float(np.max(appell_residual(ft, n, x))) for n in range(1, top + 1)), "appell")
    suite.bound("structure", max(float(np.max(structure_residual(ft, n, x))) for n in range(1, top + 1)), "structure")
    suite.bound("reproducing",
                max(reproducing_error(ft, n, y) for n in range(0, 11) for y in (-0.7, 0.3, 1.1)),
                "reproducing")

    k00, k11 = kernel_sums(ft, top)
    worst = 0.0
    for n in range(top):
        c00, c11 = kernel_at_zero_confluent(ft, n)
        worst = max(worst, abs(c00 / k00[n] - 1.0), abs(c11 - k11[n]) / max(k11[n], 1e-300) if n else abs(c11))
    suite.bound("kernel_confluent", worst, "kernel_confluent")

    pairs = [(0.2, -0.2), (0.3, 0.3), (1.1, -0.4)]
    worst = max(
        abs(kernel(ft, n, a, b) / kernel_direct(ft, n, a, b) - 1.0)
        for n in range(1, 12) for a, b in pairs
    )
    suite.bound("kernel_quotient", worst, "kernel_confluent")

    block = monic_block(ft, top, x)[0]
    mirrored = monic_block(ft, top, -x)[0]
    signs = (-1.0) ** np.arange(top + 1)
    scale = np.max(np.abs(block), axis=1)
    suite.bound("parity", float(np.max(np.abs(mirrored - signs[:, None] * block) / scale[:, None])), "parity")

    bv = boundary_values(ft, min(50, ft.n_max))
    evens = np.arange(0, min(50, ft.n_max) + 1, 2)
    violations = int(np.count_nonzero(np.sign(bv.f0[evens]) != (-1.0) ** (evens // 2)))
    suite.flag("boundary_sign_alternation", violations == 0, violations)
    suite.flag("kernel_monotone", bool(np.all(np.diff(k00) >= 0) and np.all(np.diff(k11) >= 0)))
    n = np.arange(1, top + 1)
    suite.info("k00_growth_ratio", float(np.ptp(k00[1:] * n ** -0.75)), "spread of K_n(0,0) n^{-3/4}")
    return suite.results


def _sobolev_checks(suite: _Suite, ft: FreudTable, params: SobolevParams, tag: str) -> None:
    st = build_sobolev_table(ft, params, min(22, ft.n_max - 2))
    grid = np.linspace(-2.0, 2.0, 101)
    suite.bound(f"five_term_{tag}",
                max(float(np.max(five_term_residual(st, ft, n, grid))) for n in range(0, 21)),
                "five_term")

    off_origin = grid[np.abs(grid) > 1e-3]
    worst = 0.0
    for n in range(1, 21):
        kernel_form = np.asarray(eval_Q(st, ft, n, off_origin))
        scale = np.max(np.abs(kernel_form))
        worst = max(
            worst,
            float(np.max(np.abs(monic_quotient_Q(st, ft, n, off_origin) - kernel_form)) / scale),
            float(np.max(np.abs(five_term_unroll(st, n, off_origin) - kernel_form)) / scale),
        )
    suite.bound(f"representation_{tag}", worst, "representation")

    worst = 0.0
    for n in range(1, 21):
        a10, b11 = connection_coeffs_direct(st, ft, n)
        scale = max(1.0, abs(st.b11[n]), abs(st.a10[n]))
        worst = max(worst, abs(a10 - st.a10[n]) / scale, abs(b11 - st.b11[n]) / scale)
    suite.bound(f"connection_identity_{tag}", worst, "representation")

    worst = max(
        float(np.max(np.abs(np.asarray(eval_Q(st, ft, n, -grid)) - (-1) ** n * np.asarray(eval_Q(st, ft, n, grid)))))
        / float(np.max(np.abs(np.asarray(eval_Q(st, ft, n, grid)))))
        for n in range(0, 21)
    )
    suite.bound(f"parity_{tag}", worst, "parity")

    worst = 0.0
    for m in range(0, 13):
        for n in range(m, 13):
            value = sobolev_inner_oracle(ft, params, ("Q", m), ("Q", n),
                                         suite.config.quadrature_points, suite.config.quadrature_panel)
            if m == n:
                worst = max(worst, abs(value / st.qnorm_sq[n] - 1.0))
            else:
                worst = max(worst, abs(value) / math.sqrt(st.qnorm_sq[m] * st.qnorm_sq[n]))
    suite.bound(f"orthogonality_{tag}", worst, "orthogonality")

    if params.M1 > 0:
        worst = max(float(np.max(limit_identity(st, ft, n, grid)[1])) for n in range(3, 16, 2))
        suite.bound(f"limit_identity_{tag}", worst, "representation")


def sobolev_suite(ft: FreudTable, config: RunConfig) -> list[PropertyResult]:
    suite = _Suite("sobolev", config)
    params = config.params
    _sobolev_checks(suite, ft, params, "config")
    if params != SobolevParams(1.0, 0.5):
        _sobolev_checks(suite, ft, SobolevParams(1.0, 0.5), "reference")

    x = np.linspace(-1.5, 1.5, 31)
    shifted_m1 = build_sobolev_table(ft, SobolevParams(params.M0, params.M1 + 1.0), 20)
    shifted_m0 = build_sobolev_table(ft, SobolevParams(params.M0 + 1.0, params.M1), 20)
    base = build_sobolev_table(ft, params, 20)
    exact = all(
        np.array_equal(eval_Q(base, ft, n, x), eval_Q(shifted_m1 if n % 2 == 0 else shifted_m0, ft, n, x))
        for n in range(0, 21)
    )
    suite.flag("decoupling", exact)

    st = build_sobolev_table(ft, params)
    window = _decay_window(st.n_max, 20, 200)
    if params.is_unperturbed:
        suite.info("asymptotic_fits", 0.0, "unperturbed masses, ratios are exact")
        return suite.results

    a_sq = ft.a_sq
    ratio = np.sqrt(st.qnorm_sq / ft.norm_sq[: st.n_max + 1]) - 1.0
    for parity, mass in ((0, params.M0), (1, params.M1)):
        if mass > 0:
            sub = window[window % 2 == parity]
            suite.decay(f"norm_ratio_decay_{'even' if parity == 0 else 'odd'}", loglog_slope(sub, ratio[sub]), -1.0)
    lam = np.abs(st.lambda_nn[window] / (a_sq[window + 1] + a_sq[window]) - 1.0)
    suite.decay("lambda_nn_decay", loglog_slope(window, lam), -2.0)
    lam2 = np.abs(st.lambda_nm2[window] / (a_sq[window - 1] * a_sq[window]) - 1.0)
    suite.decay("lambda_nm2_decay", loglog_slope(window, lam2), -1.5)
    return suite.results


def _interlaced(outer: np.ndarray, inner: np.ndarray) -> bool:
    """outer[k] < inner[k] < outer[k+1] for every inner zero."""
    if len(outer) != len(inner) + 1:
        return False
    return all(outer[k] < inner[k] < outer[k + 1] for k in range(len(inner)))


def _chain_holds(eta: np.ndarray, x: np.ndarray, y: np.ndarray) -> bool:
    chain = []
    for k in range(len(eta)):
        chain.extend([y[k], eta[k], x[k]])
    return bool(np.all(np.diff(chain) > 0))


def zeros_suite(ft: FreudTable, config: RunConfig) -> list[PropertyResult]:
    suite = _Suite("zeros", config)
    unperturbed = build_sobolev_table(ft, SobolevParams(), 12)
    worst = max(
        float(np.max(np.abs(q_zeros(unperturbed, ft, n).zeros - freud_zeros(ft, n).zeros)))
        for n in range(1, 11)
    )
    suite.bound("unperturbed_zeros", worst, "closed_form")

    violations = []
    for M1 in MASS_GRID:
        st = build_sobolev_table(ft, SobolevParams(config.M0, M1), 15)
        for n in range(3, 16, 2):
            eta = q_zeros(st, ft, n).positive
            x = freud_zeros(ft, n).positive
            y = np.concatenate([[0.0], limit_and_kernel_zeros(ft, n, ZeroLabel.LIMIT_J).positive])
            if not _chain_holds(eta, x, y):
                violations.append(f"n={n} M1={M1}")
    suite.flag("interlacing_chain", not violations, len(violations), ", ".join(violations))

    kernel_violations, pair_violations, limit_violations = [], [], []
    for m in range(1, 11):
        x = freud_zeros(ft, 2 * m + 1).positive
        w = limit_and_kernel_zeros(ft, 2 * m - 1, ZeroLabel.KERNEL01).positive
        w_next = limit_and_kernel_zeros(ft, 2 * m + 1, ZeroLabel.KERNEL01).positive
        if not _interlaced(x, w):
            kernel_violations.append(f"m={m}")
        if not _interlaced(w_next, w):
            pair_violations.append(f"m={m}")
        if m >= 2 and not _interlaced(x, limit_and_kernel_zeros(ft, 2 * m + 1, ZeroLabel.LIMIT_J).positive):
            limit_violations.append(f"m={m}")
    suite.flag("kernel01_freud_interlacing", not kernel_violations, len(kernel_violations),
               ", ".join(kernel_violations))
    suite.flag("kernel01_pair_interlacing", not pair_violations, len(pair_violations), ", ".join(pair_violations))
    suite.flag("limit_freud_interlacing", not limit_violations, len(limit_violations), ", ".join(limit_violations))

    sweep = m1_sweep(ft, 7, config.M1_grid if len(config.M1_grid) > 1 else [0.03, 1.0, 1e4], config.M0)
    suite.flag("sweep_monotone", all(sweep.monotone))
    suite.bound("sweep_limit", float(np.max(np.abs(sweep.extrapolated ** 2 - sweep.limit_zeros ** 2))),
                "limit_extrapolation")
    worst = float(np.max(np.abs(sweep.measured_constants / sweep.predicted_constants - 1.0)))
    suite.bound("sweep_constant", worst, "rate_constant")
    expected = np.array([-0.5] + [-1.0] * (len(sweep.rate_exponents) - 1))
    worst = float(np.max(np.abs(sweep.rate_exponents / expected - 1.0)))
    suite.bound("sweep_rate", worst, "rate_constant")

    suite.table(ft, 1)
    suite.table(ft, 2)
    return suite.results


def holonomic_suite(ft: FreudTable, config: RunConfig) -> list[PropertyResult]:
    suite = _Suite("holonomic", config)
    params = config.params

    st = build_sobolev_table(ft, params, max(config.n, 22))
    ls = ladder_system(st, ft, config.n)
    samples = np.array([0.3, 0.9, 1.7])
    suite.bound("lowering", float(np.max(lowering_residual(ls, st, ft, samples))), "ladder")
    suite.bound("raising", float(np.max(raising_residual(ls, st, ft, samples))), "ladder")

    worst, worst_s = 0.0, 0.0
    for M in ODE_MASSES:
        st_m = build_sobolev_table(ft, SobolevParams(M, M), 16)
        for n in range(2, 16):
            ls_m = ladder_system(st_m, ft, n)
            oc = ode_coeffs(ls_m)
            x = pole_avoiding_samples([oc.R, oc.S], -2.5, 2.5, 20)
            worst = max(worst, float(np.max(ode_residual(oc, st_m, ft, x))))
            _, s_pointwise = ode_coeffs_at(ls_m, x)
            deviation = np.abs(oc.S(x) - s_pointwise) / np.maximum(1.0, np.abs(s_pointwise))
            worst_s = max(worst_s, float(np.max(deviation)))
    suite.bound("ode_residual", worst, "ode")
    suite.bound("ode_S_pointwise", worst_s, "ode")

    worst = 0.0
    for M1 in MASS_GRID:
        st_m = build_sobolev_table(ft, SobolevParams(config.M0, M1), 22)
        for n in range(3, 22, 2):
            oc = ode_coeffs(ladder_system(st_m, ft, n))
            worst = max(worst, oc.R.mismatch(closed_form_R(oc.u4, oc.u2, oc.u0)))
    suite.bound("closed_form_R", worst, "closed_form")

    worst = 0.0
    for M1 in MASS_GRID:
        st_m = build_sobolev_table(ft, SobolevParams(config.M0, M1), 19)
        for n in range(3, 20, 2):
            worst = max(worst, electrostatic_residual(st_m, ft, n).worst)
    suite.bound("electrostatic", worst, "electrostatic")

    worst, worst_hp = 0.0, 0.0
    for M1 in MASS_GRID:
        st_m = build_sobolev_table(ft, SobolevParams(0.0, M1), 19)
        for n in range(1, 20, 2):
            coefficients = biquartic(st_m, ft, n)
            roots = u_roots(*coefficients, n=n)
            worst = max(worst, float(np.max(roots.residuals)),
                        imaginary_residual(*coefficients, float(roots.imaginary[-1])))
            re_root, im_root = biquartic_roots_hp(ft, M1, n)
            worst_hp = max(worst_hp, abs(float(roots.zeros[-1]) - re_root),
                           abs(float(roots.imaginary[-1]) - im_root))
    suite.bound("u_root_residual", worst, "closed_form")
    suite.bound("u_root_high_precision", worst_hp, "closed_form")

    st_big = build_sobolev_table(ft, SobolevParams(0.0, 1.0))
    half = np.arange(50, (st_big.n_max - 1) // 2 + 1)
    if len(half):
        deviation = max(abs(biquartic(st_big, ft, 2 * k + 1)[0] / u4_asymptotic(k) - 1.0) for k in half)
        suite.bound("u4_asymptotic", deviation, "rate_constant")
        k = int(half[-1])
        roots = u_roots(*biquartic(st_big, ft, 2 * k + 1))
        approx_plus, approx_minus = z_asymptotics(k)
        z_plus = float(roots.zeros[-1]) ** 2
        z_minus = -float(roots.imaginary[-1]) ** 2
        suite.info("z_plus_asymptotic", abs(z_plus / approx_plus - 1.0), f"half-index {k}")
        suite.info("z_minus_asymptotic", abs(z_minus / approx_minus - 1.0), f"half-index {k}")

    suite.table(ft, 3)
    return suite.results


_SUITE_FUNCTIONS: dict[str, Callable[[FreudTable, RunConfig], list[PropertyResult]]] = {
    "coeffs": coeffs_suite,
    "freud": freud_suite,
    "sobolev": sobolev_suite,
    "zeros": zeros_suite,
    "holonomic": holonomic_suite,
}


def run_verification(
    ft: FreudTable,
    config: RunConfig,
    suites: Optional[list[str]] = None,
    print_report: bool = False,
) -> GlobalReport:
    """
    Run the named suites ("all" or None for every suite).

    Args:
        ft: Coefficient table, large enough for the asymptotic fits
        config: Run configuration supplying masses and tolerances
        suites: Suite names
        print_report: Whether to print the summary

    Returns:
        GlobalReport with one PropertyResult per check
    """
    names = list(SUITES) if not suites or "all" in suites else suites
    report = GlobalReport()
    for name in names:
        logger.info("Running suite %s", name)
        for result in _SUITE_FUNCTIONS[name](ft, config):
            report.add(result)
    if print_report:
        report.print_summary()
    return report
