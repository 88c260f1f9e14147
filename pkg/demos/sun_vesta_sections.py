"""Section portraits of the Sun-Vesta (beta = 0.01) L1 center manifold.

Three energies bracket the two stability changes of the planar Lyapunov
orbit: below the first, the section is foliated around the vertical orbit;
between them, two elliptic islands (the loop orbits) appear off the axis;
above the second, a hyperbolic pair (the inclined orbits) sits on ``y = 0``.
The fixed points found by Newton on the section map are overlaid.

    python demos/sun_vesta_sections.py [output.png]
"""

import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from halobif.bifurcation import section_extent, section_fixed_points
from halobif.dynamics import CMField, poincare_map
from halobif.params import load_case
from halobif.reproduce import pipeline

ENERGIES = (0.03, 0.06, 0.15)


def portrait(ax, fld, h, n_seeds=14, T=3000.0):
    ymin, ymax, pmin, pmax = section_extent(fld, h)
    seeds = [(y, 0.0) for y in np.linspace(0.97 * ymin, 0.97 * ymax, n_seeds)]
    seeds += [(0.0, p) for p in np.linspace(0.9 * pmin, 0.9 * pmax, n_seeds // 2)]
    for orb in poincare_map(fld, h, seeds, T=T, max_crossings=400):
        pts = orb.as_array()
        ax.plot(pts[:, 0], pts[:, 1], ".", ms=0.8)
    for fp in section_fixed_points(fld, h):
        ax.plot(fp.y, fp.py, "ko" if fp.kind == "elliptic" else "kx", ms=6)
    ax.set_title(f"h = {h}")
    ax.set_xlabel("y")


def main(out="sun_vesta_sections.png"):
    fld = CMField(pipeline(load_case("sun-vesta"), 1)[2])
    fig, axes = plt.subplots(1, len(ENERGIES), figsize=(5 * len(ENERGIES), 4.5))
    for ax, h in zip(axes, ENERGIES):
        portrait(ax, fld, h)
    axes[0].set_ylabel("py")
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    print(f"wrote {out}")


if __name__ == "__main__":
    main(*sys.argv[1:])
