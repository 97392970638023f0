"""Run every figure preset and tabulate reference vs computed values.

    python3 scripts/reproduce_all.py [--out out] [--dx 0.005] [--mass 0.075] [--markdown]

``--mass`` overrides the uniform mass ratio of every case (diagnostic only;
the presets themselves stay at 0.067).
"""

from __future__ import annotations

import argparse
import time
from pathlib import Path

from qwell1d.cli import compare_expected, run_bound, run_transmission
from qwell1d.config import PRESETS, load_preset


def override_mass(cfg, mass):
    for case in cfg.cases:
        if case.structure is not None:
            case.structure.mass_ratio = mass
        elif not isinstance(case.well.mass, dict):
            case.well.mass = mass


def main():
    ap = argparse.ArgumentParser(description="reproduce all figure presets")
    ap.add_argument("--out", type=Path, default=Path("out"))
    ap.add_argument("--dx", type=float)
    ap.add_argument("--mass", type=float)
    ap.add_argument("--markdown", action="store_true", help="print a markdown table")
    args = ap.parse_args()

    rows = []
    for name in PRESETS:
        cfg = load_preset(name)
        if args.mass:
            override_mass(cfg, args.mass)
        t0 = time.perf_counter()
        if cfg.run_mode == "transmission":
            results = run_transmission(cfg, args.out, quiet=True)
        else:
            results = run_bound(cfg, args.out, dx=args.dx, quiet=True)
        dt = time.perf_counter() - t0
        comps = compare_expected(cfg, results)
        print(f"{name}: {len(results)} case(s), {dt:.2f}s, "
              f"{sum(c.ok for c in comps)}/{len(comps)} reference values matched")
        rows += [(name, c) for c in comps]

    if args.markdown:
        print("\n| preset | quantity | reference | computed | difference | within tolerance |")
        print("|---|---|---|---|---|---|")
        for name, c in rows:
            print(f"| {name} | {c.quantity} | {c.reference:.4f} | {c.computed:.4f} | "
                  f"{c.computed - c.reference:+.4f} | {'yes' if c.ok else 'no'} |")
    n_ok = sum(c.ok for _, c in rows)
    print(f"\n{n_ok}/{len(rows)} reference values within tolerance")


if __name__ == "__main__":
    main()
