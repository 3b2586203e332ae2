"""
Builders for the zero tables and the plot-data exports.

Tables come back as plain dicts with the same layout as the reference files
under reference/, so the comparison engine can address cells in both by the
same JSONPath.
"""

from __future__ import annotations

import logging
from typing import Iterable, Optional

import numpy as np

from .exceptions import ConfigurationError
from .freud import monic_block
from .holonomic import biquartic, external_potential, u_roots
from .models import FreudTable, SobolevParams
from .sobolev import build_sobolev_table, eval_Q
from .utils import round_half
from .zeros import interlacing_report, q_zeros

logger = logging.getLogger(__name__)

ZERO_TABLES = {
    1: {"M0": 0.0, "M1": [0.0, 0.2, 0.4, 1.0]},
    2: {"M0": 1.0, "M1": [0.0, 0.4, 0.9, 2.0]},
}
ZERO_COLUMNS = ["eta_5_2", "eta_4_2", "eta_5_3", "eta_4_3", "eta_5_4"]
BIQUARTIC_MASSES = [0.1, 1.0, 10.0]
BIQUARTIC_DEGREES = list(range(1, 20, 2))


def _value(value: float, full_precision: bool) -> float:
    return float(value) if full_precision else round_half(value)


def zeros_table(
    ft: FreudTable,
    table_id: int,
    M0: float,
    m1_values: Iterable[float],
    full_precision: bool = False,
) -> dict:
    """
    Zeros eta_{5,2..4} of Q_5 and eta_{4,2..3} of Q_4 per M1, with the
    rupture flag set when Q_4 and Q_5 fail to interlace.
    """
    rows = []
    for M1 in m1_values:
        st = build_sobolev_table(ft, SobolevParams(M0, float(M1)), 5)
        eta5 = q_zeros(st, ft, 5).zeros
        eta4 = q_zeros(st, ft, 4).zeros
        report = interlacing_report(st, ft, 4)
        cells = [eta5[1], eta4[1], eta5[2], eta4[2], eta5[3]]
        row = {"M1": float(M1)}
        row.update({name: _value(v, full_precision) for name, v in zip(ZERO_COLUMNS, cells)})
        row["rupture"] = not report.interlaced
        rows.append(row)
        logger.debug("Table %d row M1=%g: %s", table_id, M1, row)
    return {
        "table_id": table_id,
        "M0": float(M0),
        "key": "M1",
        "columns": ["M1"] + ZERO_COLUMNS + ["rupture"],
        "rows": rows,
    }


def biquartic_table(
    ft: FreudTable,
    masses: Iterable[float] = BIQUARTIC_MASSES,
    degrees: Iterable[int] = BIQUARTIC_DEGREES,
    full_precision: bool = False,
) -> dict:
    """Real and imaginary root magnitudes of u(x; degree), rows ordered degree-major."""
    masses = list(masses)
    degrees = list(degrees)
    if any(d < 1 or d % 2 == 0 for d in degrees):
        raise ConfigurationError("Biquartic degrees must be odd and positive", {"degrees": degrees})
    tables = {M: build_sobolev_table(ft, SobolevParams(0.0, M), max(degrees)) for M in masses}

    rows = []
    for degree in degrees:
        for M in masses:
            roots = u_roots(*biquartic(tables[M], ft, degree), n=degree)
            rows.append({
                "degree": degree,
                "M": M,
                "re_root": _value(roots.zeros[-1], full_precision),
                "im_root": _value(roots.imaginary[-1], full_precision),
            })
    return {
        "table_id": 3,
        "key": "degree",
        "columns": ["degree", "M", "re_root", "im_root"],
        "rows": rows,
    }


def build_table(
    ft: FreudTable,
    table_id: int,
    M1: Optional[float] = None,
    full_precision: bool = False,
) -> dict:
    """Table 1, 2 or 3; for the zero tables an explicit M1 replaces the row grid."""
    if table_id in ZERO_TABLES:
        layout = ZERO_TABLES[table_id]
        m1_values = [M1] if M1 is not None else layout["M1"]
        return zeros_table(ft, table_id, layout["M0"], m1_values, full_precision)
    if table_id == 3:
        masses = [M1] if M1 is not None else BIQUARTIC_MASSES
        return biquartic_table(ft, masses, full_precision=full_precision)
    raise ConfigurationError(f"Unknown table id {table_id}", {"table_id": table_id})


def zero_trajectories(
    ft: FreudTable,
    n: int,
    M0: float,
    m1_grid: Iterable[float],
) -> tuple[list[str], list[list]]:
    """Rows (M1, k, eta_k) for every zero of Q_n along the grid."""
    rows = []
    for M1 in m1_grid:
        st = build_sobolev_table(ft, SobolevParams(M0, float(M1)), n)
        for k, zero in enumerate(q_zeros(st, ft, n).zeros, start=1):
            rows.append([float(M1), k, float(zero)])
    return ["M1", "k", "eta"], rows


def polynomial_samples(
    ft: FreudTable,
    n: int,
    params: SobolevParams,
    points: int = 201,
    half_width: float = 2.0,
) -> tuple[list[str], list[list]]:
    """Rows (x, F_n(x), Q_n(x)) on a symmetric grid."""
    x = np.linspace(-half_width, half_width, points)
    st = build_sobolev_table(ft, params, n)
    f = monic_block(ft, n, x)[0, n]
    q = np.asarray(eval_Q(st, ft, n, x))
    return ["x", "F_n", "Q_n"], [[float(a), float(b), float(c)] for a, b, c in zip(x, f, q)]


def u_root_rows(
    ft: FreudTable,
    M1: float,
    degrees: Iterable[int] = BIQUARTIC_DEGREES,
) -> tuple[list[str], list[list]]:
    """Rows (M1, n, re_root, im_root) for one mass, n the odd degree."""
    doc = biquartic_table(ft, [M1], degrees, full_precision=True)
    return ["M1", "n", "re_root", "im_root"], [
        [M1, row["degree"], row["re_root"], row["im_root"]] for row in doc["rows"]
    ]


def potential_samples(
    ft: FreudTable,
    n_odd: int,
    params: SobolevParams,
    points: int = 200,
    upper: float = 2.5,
) -> tuple[list[str], list[list]]:
    """Rows (x, V_ext(x)) on (0, upper]; points where u vanishes are dropped."""
    st = build_sobolev_table(ft, params, n_odd)
    coefficients = biquartic(st, ft, n_odd)
    x = np.linspace(upper / points, upper, points)
    with np.errstate(divide="ignore"):
        v = external_potential(*coefficients, x)
    keep = np.isfinite(v)
    return ["x", "V_ext"], [[float(a), float(b)] for a, b in zip(x[keep], v[keep])]
