"""Example usage of the freudsobolev toolkit."""

import json
from pathlib import Path

from freudsobolev import (
    SobolevParams,
    ZeroLabel,
    biquartic,
    build_freud_table,
    build_sobolev_table,
    build_table,
    compare,
    electrostatic_residual,
    freud_zeros,
    interlacing_report,
    limit_and_kernel_zeros,
    m1_sweep,
    q_zeros,
    u_roots,
)
from freudsobolev.runner import load_reference

REFERENCE_DIR = Path(__file__).parent / "reference"


def main():
    print("=" * 60)
    print("Freud-Sobolev polynomials - Example")
    print("=" * 60)

    ft = build_freud_table(60, 40)
    print(f"\na_1^2 = {ft.a_sq[1]:.16f}")
    print(f"a_2^2 = {ft.a_sq[2]:.16f}")
    print(f"||F_5||^2 = {ft.norm_sq[5]:.12e}")

    params = SobolevParams(M0=0.0, M1=0.2)
    st = build_sobolev_table(ft, params, 20)
    print(f"\nZeros for M0 = {params.M0}, M1 = {params.M1}:")
    print(f"  F_5: {freud_zeros(ft, 5).zeros.round(6)}")
    print(f"  Q_5: {q_zeros(st, ft, 5).zeros.round(6)}")
    print(f"  Q_4: {q_zeros(st, ft, 4).zeros.round(6)}")

    report = interlacing_report(st, ft, 4)
    print(f"\nQ_4 and Q_5 interlace: {report.interlaced}")

    print("\nLimit polynomial J_7 (positive zeros):", limit_and_kernel_zeros(ft, 7, ZeroLabel.LIMIT_J).positive.round(6))


def example_with_rupture():
    """Interlacing fails once M1 is large enough."""
    print("\n" + "=" * 60)
    print("Example with Interlacing Rupture")
    print("=" * 60)

    ft = build_freud_table(30, 30)
    for M1 in (0.2, 0.4, 1.0):
        st = build_sobolev_table(ft, SobolevParams(0.0, M1), 5)
        report = interlacing_report(st, ft, 4)
        print(f"  M1 = {M1}: interlaced={report.interlaced} ruptures={report.ruptures}")


def example_electrostatics():
    """Biquartic roots and the equilibrium of the zeros of Q_9."""
    print("\n" + "=" * 60)
    print("Example with the Electrostatic Model")
    print("=" * 60)

    ft = build_freud_table(40, 40)
    st = build_sobolev_table(ft, SobolevParams(0.0, 1.0), 9)
    roots = u_roots(*biquartic(st, ft, 9), n=9)
    print(f"\nu(x; 9) roots: +-{roots.zeros[-1]:.6f}, +-{roots.imaginary[-1]:.6f} i")
    check = electrostatic_residual(st, ft, 9)
    print(f"Worst force balance residual: {check.worst:.3e}")


def example_table_comparison():
    """Table 1 against its reference file."""
    print("\n" + "=" * 60)
    print("Example with Reference Comparison")
    print("=" * 60)

    ft = build_freud_table(30, 30)
    result = compare(build_table(ft, 1), load_reference(str(REFERENCE_DIR / "table1.json")))
    if hasattr(result, "is_match"):
        print(f"\nMatch: {result.is_match}")
        print(f"Cells checked: {len(result.cells)}")
        for cell in result.mismatches + result.suspects:
            print(f"  - [{cell.status.value}] {cell.path}: {cell.message}")
    else:
        print(f"\nError: {result.error['code']}")
        print(f"Message: {result.error['message']}")


def example_sweep():
    """Zeros of Q_7 as M1 grows."""
    print("\n" + "=" * 60)
    print("Example with the M1 Sweep")
    print("=" * 60)

    ft = build_freud_table(30, 30)
    sweep = m1_sweep(ft, 7, [0.1, 1.0, 10.0, 100.0, 1000.0, 10000.0])
    print(json.dumps(sweep.to_dict(), indent=2))


if __name__ == "__main__":
    main()
    example_with_rupture()
    example_electrostatics()
    example_table_comparison()
    example_sweep()
