"""Halo bifurcation thresholds for the shipped case studies.

For each system and each of L1, L2 the first-order analytic energy
``h_ly`` is compared with the energy at which the planar Lyapunov orbit of
the degree-4 center-manifold flow actually loses stability.

    python demos/thresholds.py
"""

import time

from halobif.normal_form import resonant_coeffs, thresholds
from halobif.params import load_case
from halobif.reproduce import numeric_threshold, pipeline

CASES = [
    ("earth-moon", 0.0, 0.0),
    ("earth-moon", 0.0, None),
    ("sun-barycenter", 0.0, 0.0),
    ("sun-barycenter", 0.01, None),
    ("sun-vesta", 0.0, 0.0),
    ("sun-vesta", 0.01, None),
]


def main():
    print(f"{'system':<16}{'beta':>6}{'A':>12}{'point':>7}{'delta':>11}{'h_ly':>9}{'h_num':>9}{'rel diff':>10}")
    t0 = time.perf_counter()
    for name, beta, A in CASES:
        p = load_case(name, beta=beta, A=A)
        for j in (1, 2):
            rc = resonant_coeffs(pipeline(p, j)[2])
            ha = thresholds(rc).h_ly
            hn = numeric_threshold(p, j)
            print(f"{name:<16}{p.beta:>6g}{p.A:>12.4g}{'L' + str(j):>7}{rc.delta:>11.3e}"
                  f"{ha:>9.4f}{hn:>9.4f}{abs(ha - hn) / hn:>10.2e}")
    print(f"# {time.perf_counter() - t0:.1f} s")


if __name__ == "__main__":
    main()
