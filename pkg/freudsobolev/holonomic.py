"""
Ladder operators and the second-order ODE satisfied by Q_n.

All coefficients are exact rational functions of x built from scalars of the
Freud and Sobolev tables:

    Q_n      = A_n F_n + B_n F_{n-1},        A_n = (x^2 + A10(n)) / x^2,  B_n = B11(n) / x
    F_n'     = a_n F_n + b_n F_{n-1},        a_n = -4 x a_n^2,  b_n = 4 a_n^2 phi_n(x)
    F_{n-2}  = (beta F_{n-1} - F_n) / gamma_{n-1},   beta = x,  gamma_{n-1} = -a_{n-1}^2

Eliminating F_n, F_{n-1} gives the lowering relation Q_n' = Xi2 Q_n - Xi1 Q_{n-1}
and the raising relation Q_{n-1}' + Theta1 Q_{n-1} = Theta2 Q_n, and from them

    Q_n'' + R Q_n' + S Q_n = 0,
    R = Theta1 - Xi2 - Xi1'/Xi1,   S = Xi2 (Xi1'/Xi1 - Theta1) - Xi2' + Theta2 Xi1.

For odd degree R = 2/x - 4x^3 - u'/u with the even biquartic
u = u4 x^4 + u2 x^2 + u0.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from mpmath import mp
from numpy.polynomial import Polynomial

from .coeffs import gamma_constants
from .exceptions import DegenerateSystemError, DomainError, UnexpectedRegimeError
from .models import FreudTable, SobolevTable, ZeroLabel, ZeroSet
from .rational import RationalFn
from .sobolev import eval_Q
from .zeros import q_zeros

logger = logging.getLogger(__name__)

POLE_CLEARANCE = 1e-2


@dataclass
class LadderSystem:
    """Rational coefficients of the ladder operators for Q_n."""
    n: int
    A_n: RationalFn
    B_n: RationalFn
    a_n: RationalFn
    b_n: RationalFn
    beta_n: RationalFn
    gamma_n: RationalFn
    C1: RationalFn
    D1: RationalFn
    A2: RationalFn
    B2: RationalFn
    C2: RationalFn
    D2: RationalFn
    Lambda: RationalFn
    Xi1: RationalFn
    Xi2: RationalFn
    Theta1: RationalFn
    Theta2: RationalFn
    kappa1: float = 0.0
    a_sq: float = 0.0
    phi0: float = 0.0
    phi0_prev: float = 0.0

    def coefficients(self) -> list[RationalFn]:
        return [
            self.A_n, self.B_n, self.a_n, self.b_n, self.C1, self.D1, self.A2,
            self.B2, self.C2, self.D2, self.Lambda, self.Xi1, self.Xi2,
            self.Theta1, self.Theta2,
        ]


@dataclass
class OdeCoeffs:
    """R and S of Q_n'' + R Q_n' + S Q_n = 0; biquartic data for odd n."""
    n: int
    R: RationalFn
    S: RationalFn
    u4: Optional[float] = None
    u2: Optional[float] = None
    u0: Optional[float] = None
    z_plus: Optional[float] = None
    z_minus: Optional[float] = None

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "R": {"num": self.R.num.coef.tolist(), "den": self.R.den.coef.tolist()},
            "S": {"num": self.S.num.coef.tolist(), "den": self.S.den.coef.tolist()},
            "u4": self.u4,
            "u2": self.u2,
            "u0": self.u0,
            "z_plus": self.z_plus,
            "z_minus": self.z_minus,
        }


@dataclass
class EquilibriumCheck:
    """Electrostatic equilibrium residuals at the nonzero zeros of Q_n, n odd."""
    n: int
    zeros: np.ndarray
    residuals: np.ndarray
    scales: np.ndarray

    @property
    def relative(self) -> np.ndarray:
        return self.residuals / self.scales

    @property
    def worst(self) -> float:
        return float(np.max(self.relative)) if len(self.relative) else 0.0


def _connection_pair(st: SobolevTable, m: int) -> tuple[RationalFn, RationalFn]:
    if m == 1:
        return RationalFn.constant(1.0), RationalFn.constant(0.0)
    A = RationalFn([st.a10[m], 0.0, 1.0], [0.0, 0.0, 1.0])
    B = RationalFn([st.b11[m]], [0.0, 1.0])
    return A, B


def _a(ft: FreudTable, m: int) -> RationalFn:
    return RationalFn([0.0, -4.0 * ft.a_sq[m]])


def _b(ft: FreudTable, m: int) -> RationalFn:
    return RationalFn(4.0 * ft.a_sq[m] * Polynomial([ft.phi(m), 0.0, 1.0]))


def _gamma(ft: FreudTable, m: int) -> RationalFn:
    return RationalFn.constant(-ft.a_sq[m])


def _derivative_pair(ft: FreudTable, m: int, A: RationalFn, B: RationalFn) -> tuple[RationalFn, RationalFn]:
    """(C, D) with Q_m' = C F_m + D F_{m-1}."""
    C = A.deriv() + A * _a(ft, m)
    D = B.deriv() + A * _b(ft, m)
    if not B.is_zero():
        gamma = _gamma(ft, m - 1)
        b_prev = _b(ft, m - 1)
        C = C + B * b_prev / gamma
        D = D + B * (_a(ft, m - 1) - b_prev * RationalFn.x() / gamma)
    return C, D


def ladder_system(st: SobolevTable, ft: FreudTable, n: int) -> LadderSystem:
    """Assemble the lowering and raising coefficients of Q_n, 2 <= n <= st.n_max."""
    if n < 2:
        raise DomainError("Ladder system needs n >= 2", n)
    st.require(n)
    x = RationalFn.x()

    A_n, B_n = _connection_pair(st, n)
    A_prev, B_prev = _connection_pair(st, n - 1)
    C1, D1 = _derivative_pair(ft, n, A_n, B_n)
    C_prev, D_prev = _derivative_pair(ft, n - 1, A_prev, B_prev)

    gamma = _gamma(ft, n - 1)
    A2 = B_prev / gamma
    B2 = A_prev - B_prev * x / gamma
    C2 = D_prev / gamma
    D2 = C_prev - D_prev * x / gamma

    Lambda = A_n * B2 - A2 * B_n
    if Lambda.is_zero():
        raise DegenerateSystemError("Lambda", n)

    system = LadderSystem(
        n=n,
        A_n=A_n,
        B_n=B_n,
        a_n=_a(ft, n),
        b_n=_b(ft, n),
        beta_n=x,
        gamma_n=_gamma(ft, n),
        C1=C1,
        D1=D1,
        A2=A2,
        B2=B2,
        C2=C2,
        D2=D2,
        Lambda=Lambda,
        Xi1=(C1 * B_n - A_n * D1) / Lambda,
        Xi2=(C1 * B2 - A2 * D1) / Lambda,
        Theta1=(C2 * B_n - A_n * D2) / Lambda,
        Theta2=(C2 * B2 - A2 * D2) / Lambda,
        kappa1=float(st.kappa1[n]),
        a_sq=float(ft.a_sq[n]),
        phi0=float(ft.phi(n)),
        phi0_prev=float(ft.phi(n - 1)),
    )
    logger.debug("Ladder system n=%d: Xi1 degrees %s, Xi2 degrees %s", n, system.Xi1.degrees, system.Xi2.degrees)
    return system


def _biquartic_coefficients(kappa1: float, a_sq: float, phi: float, phi_prev: float) -> tuple[float, float, float]:
    u4 = 16.0 * phi * phi * (1.0 + kappa1)
    u2 = 4.0 * phi * (4.0 * phi * phi + kappa1 * (2.0 + kappa1) * (4.0 * a_sq * phi - 1.0))
    u0 = kappa1 * (
        -12.0 * phi * phi
        + kappa1 * (1.0 + 8.0 * a_sq * phi * (-1.0 + 2.0 * phi_prev * phi))
    )
    return u4, u2, u0


def ode_coeffs(ls: LadderSystem) -> OdeCoeffs:
    """R and S from the ladder system; biquartic data attached for odd n."""
    if ls.Xi1.is_zero():
        raise DegenerateSystemError("Xi1", ls.n)
    log_xi1 = ls.Xi1.log_derivative()
    R = ls.Theta1 - ls.Xi2 - log_xi1
    S = ls.Xi2 * (log_xi1 - ls.Theta1) - ls.Xi2.deriv() + ls.Theta2 * ls.Xi1

    coeffs = OdeCoeffs(n=ls.n, R=R, S=S)
    if ls.n % 2:
        u4, u2, u0 = _biquartic_coefficients(ls.kappa1, ls.a_sq, ls.phi0, ls.phi0_prev)
        z_plus, z_minus = _quadratic_roots(u4, u2, u0)
        coeffs.u4, coeffs.u2, coeffs.u0 = u4, u2, u0
        coeffs.z_plus, coeffs.z_minus = z_plus, z_minus
    return coeffs


def _value_and_slope(f: RationalFn, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    num, den = f.num(x), f.den(x)
    return num / den, (f.num.deriv()(x) * den - num * f.den.deriv()(x)) / (den * den)


def ode_coeffs_at(ls: LadderSystem, x) -> tuple[np.ndarray, np.ndarray]:
    """R(x) and S(x) evaluated pointwise from Xi1, Xi2, Theta1 and Theta2."""
    x = np.asarray(x, dtype=float)
    xi1, dxi1 = _value_and_slope(ls.Xi1, x)
    xi2, dxi2 = _value_and_slope(ls.Xi2, x)
    theta1, theta2 = ls.Theta1(x), ls.Theta2(x)
    log_xi1 = dxi1 / xi1
    R = theta1 - xi2 - log_xi1
    S = xi2 * (log_xi1 - theta1) - dxi2 + theta2 * xi1
    return R, S


def biquartic(st: SobolevTable, ft: FreudTable, n_odd: int) -> tuple[float, float, float]:
    """(u4, u2, u0) of u(x) = u4 x^4 + u2 x^2 + u0 for odd degree n_odd >= 1."""
    if n_odd < 1 or n_odd % 2 == 0:
        raise DomainError("Biquartic needs an odd degree", n_odd)
    st.require(n_odd)
    return _biquartic_coefficients(
        float(st.kappa1[n_odd]),
        float(ft.a_sq[n_odd]),
        float(ft.phi(n_odd)),
        float(ft.phi(n_odd - 1)),
    )


def biquartic_hp(ft: FreudTable, M1: float, n_odd: int, precision_digits: Optional[int] = None) -> tuple:
    """
    (u4, u2, u0) as mpf, rebuilt from a_sq_hp without the float Sobolev table.

    kappa1 = M1 F_n'(0)^2 / (||F_n||^2 (1 + M1 K^{(1,1)}_{n-1}(0,0))) with M0 = 0.
    Tables without a_sq_hp fall back to the float a_n^2.
    """
    if n_odd < 1 or n_odd % 2 == 0:
        raise DomainError("Biquartic needs an odd degree", n_odd)
    ft.require(n_odd + 1)
    digits = max(precision_digits or ft.precision_digits, 30)
    source = ft.a_sq_hp or tuple(float(v) for v in ft.a_sq)
    with mp.workdps(digits):
        a_sq = [mp.mpf(v) for v in source[: n_odd + 2]]
        f0, f1 = [mp.mpf(1), mp.mpf(0)], [mp.mpf(0), mp.mpf(1)]
        for k in range(1, n_odd):
            f0.append(-a_sq[k] * f0[k - 1])
            f1.append(f0[k] - a_sq[k] * f1[k - 1])
        norms = [gamma_constants(digits).mu0]
        for k in range(1, n_odd + 1):
            norms.append(norms[-1] * a_sq[k])
        k11 = mp.fsum(f1[k] ** 2 / norms[k] for k in range(n_odd))
        m1 = mp.mpf(M1)
        kappa1 = m1 * f1[n_odd] ** 2 / (norms[n_odd] * (1 + m1 * k11))
        phi = a_sq[n_odd + 1] + a_sq[n_odd]
        phi_prev = a_sq[n_odd] + a_sq[n_odd - 1]
        return _biquartic_coefficients(kappa1, a_sq[n_odd], phi, phi_prev)


def biquartic_roots_hp(
    ft: FreudTable,
    M1: float,
    n_odd: int,
    precision_digits: Optional[int] = None,
) -> tuple[float, float]:
    """Real and imaginary root magnitudes of u(x; n_odd), solved in mpmath."""
    digits = max(precision_digits or ft.precision_digits, 30)
    u4, u2, u0 = biquartic_hp(ft, M1, n_odd, digits)
    with mp.workdps(digits):
        disc = u2 * u2 - 4 * u4 * u0
        if disc < 0:
            raise UnexpectedRegimeError("Quadratic in z = x^2 has complex roots", float(disc))
        root = mp.sqrt(disc)
        z_plus = (-u2 + root) / (2 * u4)
        z_minus = (-u2 - root) / (2 * u4)
        return float(mp.sqrt(max(z_plus, 0))), float(mp.sqrt(max(-z_minus, 0)))


def biquartic_poly(u4: float, u2: float, u0: float) -> Polynomial:
    return Polynomial([u0, 0.0, u2, 0.0, u4])


def _quadratic_roots(u4: float, u2: float, u0: float) -> tuple[float, float]:
    if u4 == 0:
        raise DomainError("Leading biquartic coefficient vanishes", u4)
    disc = u2 * u2 - 4.0 * u4 * u0
    if disc < 0:
        raise UnexpectedRegimeError("Quadratic in z = x^2 has complex roots", disc)
    q = -0.5 * (u2 + math.copysign(math.sqrt(disc), u2))
    if q == 0:
        return 0.0, 0.0
    roots = sorted([q / u4, u0 / q])
    return roots[1], roots[0]


def u_roots(u4: float, u2: float, u0: float, n: int = 0) -> ZeroSet:
    """
    Roots of the biquartic: real +-sqrt(z_plus) in `zeros`, imaginary
    magnitudes +-sqrt(-z_minus) in `imaginary`.
    """
    z_plus, z_minus = _quadratic_roots(u4, u2, u0)
    real = math.sqrt(max(z_plus, 0.0))
    imag = math.sqrt(max(-z_minus, 0.0))
    zeros = np.array([-real, real])
    u = biquartic_poly(u4, u2, u0)
    scale = max(abs(u4), abs(u2), abs(u0))
    residuals = np.abs(u(zeros)) / scale
    return ZeroSet(
        ZeroLabel.BIQUARTIC_U,
        n,
        zeros,
        residuals,
        imaginary=np.array([-imag, imag]),
    )


def imaginary_residual(u4: float, u2: float, u0: float, magnitude: float) -> float:
    """|u(i m)| = |u4 m^4 - u2 m^2 + u0| relative to the largest coefficient."""
    m2 = magnitude * magnitude
    return abs(u4 * m2 * m2 - u2 * m2 + u0) / max(abs(u4), abs(u2), abs(u0))


def z_asymptotics(n: int) -> tuple[float, float]:
    """
    Two-term large-n expansions of z_plus and z_minus, n the half-index of degree 2n+1.

    The leading term of z_minus grows like n^{+1/2}, matching the imaginary
    roots of u that increase with the degree; it is not n^{-1/2}.
    """
    if n < 1:
        raise DomainError("z asymptotics need n >= 1", n)
    root = math.sqrt(1.5)
    z_plus = (27.0 / 64.0) * root * n ** -1.5 - (243.0 / 512.0) * root * n ** -2.5
    z_minus = -math.sqrt(2.0 / 3.0) * n ** 0.5 - 0.25 * root * n ** -2.5
    return z_plus, z_minus


def u4_asymptotic(n: int) -> float:
    """(32/3) n (1 + 15/(8n)), n the half-index."""
    if n < 1:
        raise DomainError("u4 asymptotics need n >= 1", n)
    return (32.0 / 3.0) * n * (1.0 + 15.0 / (8.0 * n))


def closed_form_R(u4: float, u2: float, u0: float) -> RationalFn:
    """2/x - 4x^3 - u'/u."""
    u = biquartic_poly(u4, u2, u0)
    return RationalFn([2.0], [0.0, 1.0]) - RationalFn([0.0, 0.0, 0.0, 4.0]) - RationalFn(u.deriv(), u)


def external_potential(u4: float, u2: float, u0: float, x) -> np.ndarray:
    """V_ext(x) = ln|u(x)|/2 - ln(x^2 e^{-x^4})/2."""
    x = np.asarray(x, dtype=float)
    u = biquartic_poly(u4, u2, u0)
    return 0.5 * np.log(np.abs(u(x))) - np.log(np.abs(x)) + 0.5 * x ** 4


def pole_avoiding_samples(
    functions: list[RationalFn],
    lo: float,
    hi: float,
    count: int,
    clearance: float = POLE_CLEARANCE,
) -> np.ndarray:
    """`count` points in [lo, hi] at least `clearance` away from every real pole."""
    poles = np.concatenate([f.poles() for f in functions] + [np.zeros(1)])
    candidates = np.linspace(lo, hi, 8 * count + 1)
    distance = np.min(np.abs(candidates[:, None] - poles[None, :]), axis=1)
    usable = candidates[distance >= clearance]
    if len(usable) <= count:
        return usable
    picks = np.linspace(0, len(usable) - 1, count).round().astype(int)
    return usable[picks]


def lowering_residual(ls: LadderSystem, st: SobolevTable, ft: FreudTable, x) -> np.ndarray:
    """|Xi2 Q_n - Q_n' - Xi1 Q_{n-1}| relative to the largest term."""
    x = np.asarray(x, dtype=float)
    q = np.asarray(eval_Q(st, ft, ls.n, x, 1))
    q_prev = np.asarray(eval_Q(st, ft, ls.n - 1, x))
    terms = [ls.Xi2(x) * q[0], q[1], ls.Xi1(x) * q_prev]
    return np.abs(terms[0] - terms[1] - terms[2]) / np.maximum.reduce([np.abs(t) for t in terms])


def raising_residual(ls: LadderSystem, st: SobolevTable, ft: FreudTable, x) -> np.ndarray:
    """|Theta1 Q_{n-1} + Q_{n-1}' - Theta2 Q_n| relative to the largest term."""
    x = np.asarray(x, dtype=float)
    q_prev = np.asarray(eval_Q(st, ft, ls.n - 1, x, 1))
    q = np.asarray(eval_Q(st, ft, ls.n, x))
    terms = [ls.Theta1(x) * q_prev[0], q_prev[1], ls.Theta2(x) * q]
    return np.abs(terms[0] + terms[1] - terms[2]) / np.maximum.reduce([np.abs(t) for t in terms])


def ode_residual(oc: OdeCoeffs, st: SobolevTable, ft: FreudTable, x) -> np.ndarray:
    """|Q_n'' + R Q_n' + S Q_n| relative to the largest term."""
    x = np.asarray(x, dtype=float)
    q = np.asarray(eval_Q(st, ft, oc.n, x, 2))
    terms = [q[2], oc.R(x) * q[1], oc.S(x) * q[0]]
    return np.abs(terms[0] + terms[1] + terms[2]) / np.maximum.reduce([np.abs(t) for t in terms])


def electrostatic_residual(st: SobolevTable, ft: FreudTable, n_odd: int) -> EquilibriumCheck:
    """
    Equilibrium condition at the nonzero zeros y_k of Q_{n_odd}:

        sum_{j != k} 1/(y_j - y_k) + u'(y_k)/(2 u(y_k)) - 1/y_k + 2 y_k^3 = 0.

    The zero at the origin enters the sums but is not a test point.
    """
    u4, u2, u0 = biquartic(st, ft, n_odd)
    u = biquartic_poly(u4, u2, u0)
    du = u.deriv()
    zeros = q_zeros(st, ft, n_odd).zeros
    nonzero = zeros[zeros != 0.0]

    residuals, scales = [], []
    for y in nonzero:
        others = zeros[zeros != y]
        terms = [
            float(np.sum(1.0 / (others - y))),
            du(y) / (2.0 * u(y)),
            -1.0 / y,
            2.0 * y ** 3,
        ]
        residuals.append(abs(sum(terms)))
        scales.append(max(abs(t) for t in terms))
    return EquilibriumCheck(
        n=n_odd,
        zeros=nonzero,
        residuals=np.array(residuals),
        scales=np.array(scales),
    )
