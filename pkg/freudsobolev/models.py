"""Data models for the freudsobolev toolkit."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Optional

import numpy as np

from .exceptions import ConfigurationError, TableExhaustedError


class LogLevel(Enum):
    DEBUG = "DEBUG"
    INFO = "INFO"
    WARN = "WARN"
    ERROR = "ERROR"


class MethodTag(Enum):
    NEWTON_SYSTEM = "newton_system"
    FORWARD_HP = "forward_hp"
    STIELTJES = "stieltjes"


class ZeroLabel(Enum):
    FREUD = "freud"
    SOBOLEV = "sobolev"
    LIMIT_G = "limit_G"
    LIMIT_J = "limit_J"
    KERNEL01 = "kernel01"
    BIQUARTIC_U = "biquartic_u"


class OutputFormat(Enum):
    CSV = "csv"
    JSON = "json"
    TSV = "tsv"


class CellStatus(Enum):
    MATCH = "MATCH"
    MISMATCH = "MISMATCH"
    SUSPECT = "SUSPECT"
    MISSING = "MISSING"


def _freeze(*arrays: np.ndarray) -> None:
    for array in arrays:
        array.setflags(write=False)


@dataclass(frozen=True)
class GammaConstants:
    """Gamma-function constants of the quartic Freud weight (mpmath values)."""
    gamma_quarter: Any
    gamma_three_quarter: Any
    a1_sq_exact: Any
    mu0: Any
    precision_digits: int

    def to_dict(self) -> dict:
        return {
            "gamma_quarter": str(self.gamma_quarter),
            "gamma_three_quarter": str(self.gamma_three_quarter),
            "a1_sq_exact": str(self.a1_sq_exact),
            "mu0": str(self.mu0),
            "precision_digits": self.precision_digits,
        }


@dataclass(frozen=True)
class FreudTable:
    """
    Recurrence data of the monic Freud polynomials F_n for e^{-x^4}.

    a_sq[n] holds a_n^2 (a_sq[0] = 0), norm_sq[n] = ||F_n||^2 and
    gamma[n] = ||F_n||^{-1}. a_sq_hp optionally carries the
    high-precision values the float arrays were rounded from.
    """
    n_max: int
    a_sq: np.ndarray
    norm_sq: np.ndarray
    gamma: np.ndarray
    precision_digits: int
    method_tag: MethodTag
    a_sq_hp: tuple = ()

    def __post_init__(self):
        _freeze(self.a_sq, self.norm_sq, self.gamma)

    def require(self, n: int) -> None:
        """Raise TableExhaustedError unless degree n is covered."""
        if n > self.n_max:
            raise TableExhaustedError(n, self.n_max)

    def phi(self, n: int, x: Any = 0.0) -> Any:
        """phi_n(x) = a_{n+1}^2 + a_n^2 + x^2."""
        self.require(n + 1)
        return self.a_sq[n + 1] + self.a_sq[n] + x * x

    @property
    def mu0(self) -> float:
        return float(self.norm_sq[0])

    def to_dict(self) -> dict:
        return {
            "n_max": self.n_max,
            "precision_digits": self.precision_digits,
            "method_tag": self.method_tag.value,
            "a_sq": self.a_sq.tolist(),
            "norm_sq": self.norm_sq.tolist(),
            "gamma": self.gamma.tolist(),
        }


@dataclass(frozen=True)
class EvalChain:
    """F_n and F_{n-1} at one point, with derivatives up to max_deriv."""
    n: int
    x: float
    values: tuple[float, float]
    derivs: tuple[tuple[float, float], ...] = ()
    phi: Optional[float] = None

    def derivative(self, order: int) -> float:
        """F_n^{(order)}(x); order 0 is the value."""
        if order == 0:
            return self.values[0]
        return self.derivs[order - 1][0]


@dataclass(frozen=True)
class BoundaryValues:
    """F_n^{(j)}(0) for j = 0..3 and n = 0..n_max."""
    n_max: int
    f0: np.ndarray
    f1: np.ndarray
    f2: np.ndarray
    f3: np.ndarray

    def __post_init__(self):
        _freeze(self.f0, self.f1, self.f2, self.f3)

    def order(self, j: int) -> np.ndarray:
        return (self.f0, self.f1, self.f2, self.f3)[j]


@dataclass(frozen=True)
class KernelValues:
    """Christoffel-Darboux kernel quantities at the origin."""
    n: int
    k00: float
    k01: float
    k11: float

    def to_dict(self) -> dict:
        return {"n": self.n, "k00": self.k00, "k01": self.k01, "k11": self.k11}


@dataclass(frozen=True)
class SobolevParams:
    """Point masses at the origin: M0 on values, M1 on first derivatives."""
    M0: float = 0.0
    M1: float = 0.0

    def __post_init__(self):
        if self.M0 < 0 or self.M1 < 0:
            raise ConfigurationError(
                "Masses must be nonnegative",
                {"M0": self.M0, "M1": self.M1},
            )

    @property
    def is_unperturbed(self) -> bool:
        return self.M0 == 0 and self.M1 == 0

    def to_dict(self) -> dict:
        return {"M0": self.M0, "M1": self.M1}


@dataclass(frozen=True)
class SobolevTable:
    """
    Scalar data of the monic Freud-Sobolev polynomials Q_n, n = 0..n_max.

    rho_odd[m] = 1 + M1 K^{(1,1)}_{2m-1}(0,0) belongs to degree 2m+1.
    """
    params: SobolevParams
    n_max: int
    q0: np.ndarray
    q1: np.ndarray
    kappa0: np.ndarray
    kappa1: np.ndarray
    r: np.ndarray
    a10: np.ndarray
    b11: np.ndarray
    qnorm_sq: np.ndarray
    zeta: np.ndarray
    lambda_nn: np.ndarray
    lambda_nm2: np.ndarray
    rho_odd: np.ndarray
    k00_prev: np.ndarray
    k11_prev: np.ndarray

    def __post_init__(self):
        _freeze(
            self.q0, self.q1, self.kappa0, self.kappa1, self.r, self.a10,
            self.b11, self.qnorm_sq, self.zeta, self.lambda_nn,
            self.lambda_nm2, self.rho_odd, self.k00_prev, self.k11_prev,
        )

    def require(self, n: int) -> None:
        if n > self.n_max:
            raise TableExhaustedError(n, self.n_max)

    def to_dict(self) -> dict:
        return {
            "params": self.params.to_dict(),
            "n_max": self.n_max,
            "q0": self.q0.tolist(),
            "q1": self.q1.tolist(),
            "kappa0": self.kappa0.tolist(),
            "kappa1": self.kappa1.tolist(),
            "qnorm_sq": self.qnorm_sq.tolist(),
            "lambda_nn": self.lambda_nn.tolist(),
            "lambda_nm2": self.lambda_nm2.tolist(),
        }


@dataclass
class ZeroSet:
    """
    Sorted real zeros of a named polynomial.

    A zero at the origin is stored once; origin_multiplicity records how
    often it counts. For label biquartic_u the real roots live in `zeros`
    and the pure imaginary ones, as magnitudes, in `imaginary`.
    """
    label: ZeroLabel
    n: int
    zeros: np.ndarray
    residuals: np.ndarray
    params: Optional[SobolevParams] = None
    origin_multiplicity: int = 0
    imaginary: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def degree(self) -> int:
        extra = self.origin_multiplicity - 1 if self.origin_multiplicity else 0
        return len(self.zeros) + len(self.imaginary) + extra

    @property
    def positive(self) -> np.ndarray:
        return self.zeros[self.zeros > 0]

    def csv_rows(self) -> list[list]:
        """Rows `label,n,M0,M1,k,zero,residual` with k counted from 1."""
        M0 = self.params.M0 if self.params else ""
        M1 = self.params.M1 if self.params else ""
        return [
            [self.label.value, self.n, M0, M1, k + 1, float(z), float(res)]
            for k, (z, res) in enumerate(zip(self.zeros, self.residuals))
        ]

    def to_dict(self) -> dict:
        result = {
            "label": self.label.value,
            "n": self.n,
            "zeros": self.zeros.tolist(),
            "residuals": self.residuals.tolist(),
            "origin_multiplicity": self.origin_multiplicity,
        }
        if self.params:
            result["params"] = self.params.to_dict()
        if len(self.imaginary):
            result["imaginary"] = self.imaginary.tolist()
        return result


@dataclass
class InterlacingReport:
    """Which gaps of the zeros of Q_{n+1} hold exactly one zero of Q_n."""
    n: int
    params: SobolevParams
    inner: np.ndarray
    outer: np.ndarray
    counts: list[int] = field(default_factory=list)

    @property
    def gaps(self) -> list[bool]:
        return [count == 1 for count in self.counts]

    @property
    def interlaced(self) -> bool:
        return all(self.gaps)

    @property
    def ruptures(self) -> list[int]:
        return [k for k, ok in enumerate(self.gaps) if not ok]

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "params": self.params.to_dict(),
            "interlaced": self.interlaced,
            "gaps": self.gaps,
            "ruptures": self.ruptures,
        }


@dataclass
class SweepResult:
    """Positive-zero trajectories of Q_{n_odd} along an increasing M1 grid."""
    n_odd: int
    m1_grid: np.ndarray
    trajectories: np.ndarray
    monotone: list[bool]
    limit_zeros: np.ndarray
    extrapolated: np.ndarray
    predicted_constants: np.ndarray
    measured_constants: np.ndarray
    rate_exponents: np.ndarray

    def to_dict(self) -> dict:
        return {
            "n_odd": self.n_odd,
            "m1_grid": self.m1_grid.tolist(),
            "trajectories": self.trajectories.tolist(),
            "monotone": self.monotone,
            "limit_zeros": self.limit_zeros.tolist(),
            "extrapolated": self.extrapolated.tolist(),
            "predicted_constants": self.predicted_constants.tolist(),
            "measured_constants": self.measured_constants.tolist(),
            "rate_exponents": self.rate_exponents.tolist(),
        }


DEFAULT_TOLERANCES = {
    "table": 1e-5,
    "string_residual": 1e-12,
    "a1_certificate": 1e-10,
    "oracle_agreement": 1e-10,
    "appell": 1e-9,
    "structure": 1e-9,
    "reproducing": 1e-8,
    "kernel_confluent": 1e-10,
    "five_term": 1e-9,
    "orthogonality": 1e-8,
    "parity": 1e-12,
    "representation": 1e-9,
    "ladder": 1e-8,
    "ode": 1e-7,
    "closed_form": 1e-8,
    "electrostatic": 1e-6,
    "limit_extrapolation": 1e-6,
    "rate_constant": 0.05,
    "exponent_slack": 0.5,
}


@dataclass
class RunConfig:
    """Configuration shared by the library entry points and the CLI."""
    n_max: int = 250
    precision_digits: int = 64
    M0: float = 0.0
    M1: float = 1.0
    M1_grid: list[float] = field(default_factory=lambda: [0.03, 0.05, 0.09, 1.0, 10.0, 100.0, 1000.0, 10000.0])
    n: int = 7
    n_odd_range: list[int] = field(default_factory=lambda: list(range(1, 20, 2)))
    output_format: OutputFormat = OutputFormat.CSV
    cache_path: Optional[str] = None
    out_path: Optional[str] = None
    reference_dir: str = "reference"
    full_precision: bool = False
    log_level: LogLevel = LogLevel.INFO
    newton_tolerance: float = 1e-14
    newton_max_iterations: int = 200
    newton_buffer: int = 50
    quadrature_points: int = 4000
    quadrature_panel: int = 40
    tolerances: dict[str, float] = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))

    def validate(self) -> None:
        """Raise ConfigurationError on inconsistent settings."""
        if self.n_max < 2:
            raise ConfigurationError("n_max must be at least 2", {"n_max": self.n_max})
        if self.precision_digits < 16:
            raise ConfigurationError(
                "precision_digits must be at least 16",
                {"precision_digits": self.precision_digits},
            )
        if self.M0 < 0 or self.M1 < 0:
            raise ConfigurationError("Masses must be nonnegative", {"M0": self.M0, "M1": self.M1})
        if not self.M1_grid:
            raise ConfigurationError("M1_grid must be nonempty")
        if not self.n_odd_range:
            raise ConfigurationError("n_odd_range must be nonempty")
        for key, value in self.tolerances.items():
            if key not in DEFAULT_TOLERANCES:
                raise ConfigurationError(f"Unknown tolerance key '{key}'", {"key": key})
            if value <= 0:
                raise ConfigurationError(f"Tolerance '{key}' must be positive", {key: value})

    @property
    def params(self) -> SobolevParams:
        return SobolevParams(self.M0, self.M1)

    def tol(self, key: str) -> float:
        return self.tolerances.get(key, DEFAULT_TOLERANCES[key])

    def to_dict(self) -> dict:
        return {
            "n_max": self.n_max,
            "precision_digits": self.precision_digits,
            "M0": self.M0,
            "M1": self.M1,
            "M1_grid": list(self.M1_grid),
            "n": self.n,
            "output_format": self.output_format.value,
            "cache_path": self.cache_path,
            "full_precision": self.full_precision,
            "log_level": self.log_level.value,
            "tolerances": dict(self.tolerances),
        }


@dataclass
class PropertyResult:
    """Outcome of one property check in a verification suite."""
    suite: str
    name: str
    passed: bool
    measured: float
    tolerance: float
    informational: bool = False
    message: str = ""

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "name": self.name,
            "status": "INFO" if self.informational else ("PASS" if self.passed else "FAIL"),
            "measured": self.measured,
            "tolerance": self.tolerance,
            "message": self.message,
        }


@dataclass
class CellDiff:
    """Comparison of one computed table cell against its reference value."""
    path: str
    status: CellStatus
    expected: Any
    computed: Any
    tolerance: Optional[float]
    message: str = ""

    def to_dict(self) -> dict:
        return {
            "path": self.path,
            "status": self.status.value,
            "expected": self.expected,
            "computed": self.computed,
            "tolerance": self.tolerance,
            "message": self.message,
        }


@dataclass
class ExecutionInfo:
    """Execution metadata."""
    duration_ms: int
    timestamp: str
    engine_version: str = "1.0.0"

    def to_dict(self) -> dict:
        return {
            "duration_ms": self.duration_ms,
            "timestamp": self.timestamp,
            "engine_version": self.engine_version,
        }


@dataclass
class TableReport:
    """Result of comparing a computed table with its reference file."""
    table_id: int
    is_match: bool
    execution: ExecutionInfo
    cells: list[CellDiff] = field(default_factory=list)

    @property
    def mismatches(self) -> list[CellDiff]:
        return [c for c in self.cells if c.status in (CellStatus.MISMATCH, CellStatus.MISSING)]

    @property
    def suspects(self) -> list[CellDiff]:
        return [c for c in self.cells if c.status == CellStatus.SUSPECT]

    def to_dict(self) -> dict:
        return {
            "table_id": self.table_id,
            "is_match": self.is_match,
            "execution": self.execution.to_dict(),
            "summary": {
                "cells_checked": len(self.cells),
                "mismatches": len(self.mismatches),
                "suspect": len(self.suspects),
            },
            "cells": [c.to_dict() for c in self.cells],
        }


@dataclass
class ErrorResponse:
    """Error response structure."""
    success: bool = False
    error: Optional[dict] = None
    exit_code: int = 3

    def to_dict(self) -> dict:
        result = {"success": self.success}
        if self.error:
            result["error"] = self.error
        return result
