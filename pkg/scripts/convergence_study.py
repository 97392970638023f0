"""Mesh convergence of the bound-state energies.

Part one: order of accuracy on the empty well (mode 10 of 21 nm), where the
exact answer is known.  Part two: the reference modes of the rectangular
presets at dx = 0.02 ... 0.0025 nm, showing how many decimals are stable.

    python3 scripts/convergence_study.py
"""

from __future__ import annotations

import numpy as np

from qwell1d.config import load_preset
from qwell1d.numerov import solve_grid
from qwell1d.validate import convergence_slope

STEPS = (0.02, 0.01, 0.005, 0.0025)


def main():
    for stencil in ("numerov", "plain"):
        slope, dxs, errs = convergence_slope(0.08, stencil=stencil)
        print(f"empty well, E_10, {stencil:>7} stencil: slope {slope:.3f}  errors "
              + " ".join(f"{e:.2e}" for e in errs))
    print()
    print("preset  mode " + " ".join(f"{dx:>10g}" for dx in STEPS) + "   last change")
    for name in ("fig6", "fig7", "fig8", "fig11", "fig13", "fig16"):
        cfg = load_preset(name)
        case = cfg.cases[0]
        modes = sorted({int(e["n"]) for e in cfg.expected})
        table = []
        for dx in STEPS:
            pairs = solve_grid(case.well.grid(dx), max(modes))
            table.append([pairs[n - 1].energy for n in modes])
        table = np.array(table)
        for j, n in enumerate(modes):
            print(f"{name:<7} E_{n:<3d}" + " ".join(f"{v:10.6f}" for v in table[:, j])
                  + f"   {abs(table[-1, j] - table[-2, j]):.1e}")


if __name__ == "__main__":
    main()
