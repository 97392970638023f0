"""Command-line front end.

    qwell1d transmission --config run.json [--out DIR] [--engine analytic|tmm|both]
    qwell1d bound        --config run.json [--out DIR] [--dx NM] [--modes N]
    qwell1d validate     [--config run.json] [--dx NM]
    qwell1d reproduce    fig6 [--out DIR] [--dx NM] [--strict]

Exit codes: 0 success, 1 config error, 2 numerical failure, 3 validation
failure (or, with ``reproduce --strict``, a reference value missed).
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import analytic, config as cfgmod, tmm
from .analytic import SweepTable, find_peaks, write_csv
from .config import ConfigError, RunConfig
from .numerov import EigensolverError, confinement_report
from .pdm import solve_pdm
from .validate import ValidateOptions, run_suite

log = logging.getLogger("qwell1d")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_VALIDATION = 0, 1, 2, 3


class NumericalFailure(RuntimeError):
    pass


@dataclass
class CaseResult:
    label: str
    files: list = field(default_factory=list)
    table: SweepTable | None = None
    pairs: list | None = None
    max_dT: float | None = None
    seconds: float = 0.0


def _engine_for(case, engine: str) -> str:
    closed = case.structure.closed_form()
    if engine == "auto":
        return "analytic" if closed else "tmm"
    if engine in ("analytic", "both") and closed is None:
        raise ConfigError(f"case {case.label!r}: no closed form applies; use --engine tmm")
    return engine


def _warn_rows(label, table: SweepTable):
    for i, msg in sorted(table.errors.items()):
        print(f"warning: {label}: row {i} (E = {table.E[i]:.6g} eV) failed: {msg}", file=sys.stderr)


def run_transmission(config: RunConfig, out_dir: Path, engine: str | None = None,
                     quiet: bool = False) -> list[CaseResult]:
    """Sweep every case and write ``<name>_<label>_transmission.csv``."""
    engine = engine or config.engine
    energies = config.energy_grid.values()
    out_dir.mkdir(parents=True, exist_ok=True)
    results = []
    for case in config.cases:
        t0 = time.perf_counter()
        which = _engine_for(case, engine)
        path = out_dir / f"{config.name}_{case.label}_transmission.csv"
        res = CaseResult(case.label)
        if which in ("analytic", "both"):
            kind, params = case.structure.closed_form()
            res.table = analytic.sweep(kind, params, energies)
        if which in ("tmm", "both"):
            t_tab = tmm.sweep_tmm(case.structure.layered(), energies)
            if which == "tmm":
                res.table = t_tab
        if which == "both":
            a_tab = res.table
            dT = np.abs(a_tab.T - t_tab.T)
            res.max_dT = float(np.nanmax(dT))
            write_csv(path, {"E_eV": a_tab.E, "T_analytic": a_tab.T, "R_analytic": a_tab.R,
                             "T_tmm": t_tab.T, "R_tmm": t_tab.R, "abs_dT": dT})
            _warn_rows(case.label, t_tab)
        else:
            res.table.to_csv(path)
        _warn_rows(case.label, res.table)
        if not np.any(res.table.ok):
            raise NumericalFailure(f"case {case.label!r}: every row failed")
        res.files.append(path)
        res.seconds = time.perf_counter() - t0
        if not quiet:
            msg = f"{case.label}: {len(energies)} energies via {which} -> {path}"
            if res.max_dT is not None:
                msg += f"\n{case.label}: max |dT| analytic vs tmm = {res.max_dT:.3e}"
            print(msg)
        results.append(res)
    return results


def solve_case(case, dx: float, n_modes: int):
    grid = case.well.grid(dx)
    if grid.constant_mass and case.well.von_roos is None:
        from .numerov import solve_grid

        return grid, solve_grid(grid, n_modes)
    return grid, solve_pdm(grid, case.well.params, n_modes)


def run_bound(config: RunConfig, out_dir: Path, dx: float | None = None,
              n_modes: int | None = None, quiet: bool = False) -> list[CaseResult]:
    """Solve every case; write eigenvalue and |psi|^2 CSVs per case."""
    dx = dx or config.dx
    n_modes = n_modes or config.n_modes
    out_dir.mkdir(parents=True, exist_ok=True)
    results = []
    for case in config.cases:
        t0 = time.perf_counter()
        try:
            grid, pairs = solve_case(case, dx, n_modes)
        except EigensolverError as exc:
            raise NumericalFailure(f"case {case.label!r}: {exc}") from exc
        reports = [confinement_report(p, grid) for p in pairs]
        cols = {"n": np.array([p.index for p in pairs]),
                "E_eV": np.array([p.energy for p in pairs])}
        for j, region in enumerate(reports[0]):
            cols[region.label] = np.array([rep[j].probability for rep in reports])
        ev_path = out_dir / f"{config.name}_{case.label}_eigenvalues.csv"
        write_csv(ev_path, cols)
        wf = {"x_nm": grid.x}
        for p in pairs:
            wf[f"psi2_{p.index}"] = p.density
        wf_path = out_dir / f"{config.name}_{case.label}_eigenfunctions.csv"
        write_csv(wf_path, wf)
        res = CaseResult(case.label, [ev_path, wf_path], pairs=pairs,
                         seconds=time.perf_counter() - t0)
        if not quiet:
            shown = ", ".join(f"{p.energy:.4f}" for p in pairs[:10])
            more = " ..." if len(pairs) > 10 else ""
            print(f"{case.label}: {len(pairs)} modes (dx {dx:g} nm, {res.seconds:.2f}s): {shown}{more}")
        results.append(res)
    return results


@dataclass
class Comparison:
    case: str
    quantity: str
    reference: float
    computed: float
    tol: float

    @property
    def ok(self) -> bool:
        return bool(np.isfinite(self.computed) and abs(self.computed - self.reference) <= self.tol)

    def line(self) -> str:
        status = "match" if self.ok else "MISMATCH"
        return (f"  {self.case:>12s} {self.quantity:<18s} reference {self.reference:<10.6g} "
                f"computed {self.computed:<12.6g} diff {self.computed - self.reference:+.4f}  {status}")


def compare_expected(config: RunConfig, results: list[CaseResult]) -> list[Comparison]:
    """Evaluate the ``expected`` entries of a config against computed results."""
    by_label = {r.label: r for r in results}
    out = []
    for e in config.expected:
        res = by_label[e["case"]]
        kind = e.get("kind", "energy")
        if kind == "energy":
            n = int(e["n"])
            E = res.pairs[n - 1].energy if n <= len(res.pairs) else float("nan")
            out.append(Comparison(res.label, f"E_{n}", float(e["E"]), E, float(e.get("tol", 0.003))))
        elif kind == "peak":
            peaks = find_peaks(res.table, float(e.get("min_height", 0.5)))
            target = float(e["E"])
            if peaks:
                pE, pT = min(peaks, key=lambda p: abs(p[0] - target))
            else:
                pE = pT = float("nan")
            out.append(Comparison(res.label, "peak E", target, pE, float(e.get("E_tol", 0.002))))
            if "T" in e:
                out.append(Comparison(res.label, "peak T", float(e["T"]), pT, float(e.get("T_tol", 0.005))))
        elif kind == "T_at":
            kind_, params = config_case(config, res.label).structure.closed_form() or (None, None)
            E = float(e["E"])
            if kind_ is not None:
                T = analytic.sweep(kind_, params, np.array([E])).T[0]
            else:
                T = tmm.scatter(config_case(config, res.label).structure.layered(), E).T
            out.append(Comparison(res.label, f"T({E:g})", float(e["T"]), float(T), float(e.get("tol", 0.005))))
        else:
            raise ConfigError(f"unknown expected kind {kind!r}")
    return out


def config_case(config: RunConfig, label: str):
    return next(c for c in config.cases if c.label == label)


def run_validate(config: RunConfig | None, dx: float | None = None, quiet: bool = False):
    opts = ValidateOptions.from_dict(config.validate if config else {})
    if dx:
        opts.dx = dx
    checks = run_suite(opts)
    for c in checks:
        print(c.line())
    n_fail = sum(not c.passed for c in checks)
    print(f"{len(checks) - n_fail}/{len(checks)} checks passed")
    return checks


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qwell1d", description="1D heterostructure scattering and bound states")
    p.add_argument("mode", choices=cfgmod.MODES)
    p.add_argument("preset", nargs="?", help="preset name for reproduce (fig4 ... fig18)")
    p.add_argument("--config", type=Path, help="JSON run configuration")
    p.add_argument("--out", type=Path, help="output directory (default: config output_dir)")
    p.add_argument("--dx", type=float, help="mesh step in nm for bound-state runs")
    p.add_argument("--engine", choices=("analytic", "tmm", "both"), help="scattering engine")
    p.add_argument("--modes", type=int, help="number of bound states")
    p.add_argument("--strict", action="store_true",
                   help="reproduce: exit 3 when a reference value is missed")
    p.add_argument("--quiet", action="store_true")
    return p


def _load(args) -> RunConfig | None:
    if args.mode == "reproduce":
        if args.config:
            return cfgmod.load(args.config)
        if not args.preset:
            raise ConfigError("reproduce needs a preset name or --config")
        return cfgmod.load_preset(args.preset)
    if args.preset:
        raise ConfigError(f"unexpected argument {args.preset!r}")
    if args.config is None:
        if args.mode == "validate":
            return None
        raise ConfigError(f"{args.mode} needs --config")
    cfg = cfgmod.load(args.config)
    if cfg.mode != args.mode and cfg.mode != "reproduce":
        cfg = RunConfig.from_dict({**cfg.to_dict(), "mode": args.mode})
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    if args.dx is not None and not args.dx > 0:
        print("error: --dx must be > 0", file=sys.stderr)
        return EXIT_CONFIG
    if args.modes is not None and args.modes < 1:
        print("error: --modes must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = _load(args)
        if args.mode == "validate":
            checks = run_validate(cfg, args.dx, args.quiet)
            return EXIT_OK if all(c.passed for c in checks) else EXIT_VALIDATION
        out = args.out or Path(cfg.output_dir)
        mode = cfg.run_mode if args.mode == "reproduce" else args.mode
        if mode == "transmission":
            results = run_transmission(cfg, out, args.engine, args.quiet)
        else:
            results = run_bound(cfg, out, args.dx, args.modes, args.quiet)
        if args.mode != "reproduce":
            return EXIT_OK
        comparisons = compare_expected(cfg, results)
        if comparisons:
            print(f"{cfg.name}: comparison with reference values")
            for c in comparisons:
                print(c.line())
            missed = sum(not c.ok for c in comparisons)
            print(f"{len(comparisons) - missed}/{len(comparisons)} reference values matched"
                  + ("; see docs/discrepancies.md" if missed else ""))
            if missed and args.strict:
                return EXIT_VALIDATION
        return EXIT_OK
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, TypeError, KeyError) as exc:
        print(f"error: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalFailure, EigensolverError, ArithmeticError) as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
