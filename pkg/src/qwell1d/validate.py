"""Invariant suite behind ``qwell1d validate``.

Each check returns a :class:`Check` with the measured value and the
threshold it was held to.  Checks never raise; an exception inside one is
reported as a failure of that check only.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from . import analytic, tmm
from .core import UNITS, EnergyGrid, LayeredStructure, build_grid
from .numerov import (apply_hamiltonian, empty_well_energies, solve_grid)
from .pdm import MassProfile, VonRoosParams, residual_check, residual_threshold, solve_pdm

FIG4 = dict(V1=0.4655, a=2.5, L1=2.5, V2=0.3258, b=1.5, L2=2.5)
FIG5_I = dict(V1=1.0, a=2.5, L1=2.5, V2=0.5, b=1.5, L2=2.5)
FIG5_II = dict(V1=1.0, a=2.5, L1=2.5, V2=2.0, b=1.5, L2=2.5)


@dataclass
class Check:
    name: str
    passed: bool
    measured: str
    threshold: str = ""
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f" (limit {self.threshold})" if self.threshold else ""
        return f"[{status}] {self.name}: {self.measured}{extra}  [{self.seconds:.2f}s]"


@dataclass
class ValidateOptions:
    dx: float = 0.005
    dx0: float = 0.08
    n_points: int = 2000
    inject_sign_error: bool = False
    stencil: str = "numerov"

    @classmethod
    def from_dict(cls, d: dict) -> "ValidateOptions":
        known = {k: d[k] for k in ("dx", "dx0", "n_points", "inject_sign_error", "stencil") if k in d}
        return cls(**known)


def _closed_form_cases():
    sb = dict(V0=0.4655, a=2.5)
    sq = dict(V1_left=0.4655, a=2.5, L=6.5, V_right=0.6, b=1.8)
    return [
        ("single barrier", "single_barrier", sb, LayeredStructure.from_pairs([(2.5, 0.4655)])),
        ("double barrier", "sqw_db", sq,
         LayeredStructure.from_pairs([(2.5, 0.4655), (6.5, 0.0), (1.8, 0.6)])),
        ("triple barrier fig4", "dqwtb", FIG4, LayeredStructure.dqwtb(**FIG4)),
        ("triple barrier fig5 I", "dqwtb", FIG5_I, LayeredStructure.dqwtb(**FIG5_I)),
        ("triple barrier fig5 II", "dqwtb", FIG5_II, LayeredStructure.dqwtb(**FIG5_II)),
    ]


def _analytic_T(kind, params, energies, sign):
    if kind == "dqwtb" and sign != 1:
        p = params
        t = np.array([analytic._dqwtb(E, p["V1"], p["a"], p["L1"], p["V2"], p["b"], p["L2"],
                                      0.067, UNITS, sign)[0] for E in energies])
        return np.abs(t) ** 2
    return analytic.sweep(kind, params, energies).T


def check_flux(opts: ValidateOptions) -> Check:
    E = np.linspace(0.01, 1.0, opts.n_points)
    worst = 0.0
    for _, kind, params, stack in _closed_form_cases():
        tab = analytic.sweep(kind, params, E)
        worst = max(worst, float(np.max(np.abs(tab.T + tab.R - 1))))
        tab = tmm.sweep_tmm(stack, E)
        worst = max(worst, float(np.max(np.abs(tab.T + tab.R - 1))))
    uneven = LayeredStructure.from_pairs([(2.5, 1.0), (2.5, 0.0), (1.5, 0.5), (2.5, 0.0), (2.5, 0.8)])
    tab = tmm.sweep_tmm(uneven, E)
    worst = max(worst, float(np.max(np.abs(tab.T + tab.R - 1))))
    return Check("flux conservation |T+R-1|", worst < 1e-10, f"{worst:.2e}", "1e-10")


def check_oracle(opts: ValidateOptions) -> Check:
    E = np.linspace(0.01, 1.0, opts.n_points)
    sign = -1 if opts.inject_sign_error else 1
    parts = []
    worst = 0.0
    for label, kind, params, stack in _closed_form_cases():
        d = float(np.max(np.abs(_analytic_T(kind, params, E, sign) - tmm.sweep_tmm(stack, E).T)))
        parts.append(f"{label} {d:.1e}")
        worst = max(worst, d)
    return Check("analytic vs transfer matrix max|dT|", worst < 1e-8,
                 f"{worst:.2e} (" + "; ".join(parts) + ")", "1e-8")


def check_swap(opts: ValidateOptions) -> Check:
    E = np.linspace(0.01, 1.0, opts.n_points)
    base = dict(V1=0.4655, a=2.5, V2=0.3258, b=1.5)
    t14 = analytic.sweep("dqwtb", {**base, "L1": 1.0, "L2": 4.0}, E).T
    t41 = analytic.sweep("dqwtb", {**base, "L1": 4.0, "L2": 1.0}, E).T
    d = float(np.max(np.abs(t14 - t41)))
    return Check("well-swap symmetry of T", d < 1e-12, f"{d:.2e}", "1e-12")


def check_reciprocity(opts: ValidateOptions) -> Check:
    E = np.linspace(0.01, 1.0, opts.n_points)
    stack = LayeredStructure.from_pairs([(2.5, 1.0), (1.0, 0.0), (1.5, 0.5), (4.0, 0.0), (2.0, 0.8)])
    d = float(np.max(np.abs(tmm.sweep_tmm(stack, E).T - tmm.sweep_tmm(stack.reversed(), E).T)))
    return Check("left/right reciprocity of T", d < 1e-10, f"{d:.2e}", "1e-10")


def _empty_mode(width, dx, n, stencil):
    """Mode-n energy and realised width of an empty 0.067 m_e well."""
    grid = build_grid(width, dx, None, 0.067)
    if stencil == "numerov":
        return solve_grid(grid, n)[n - 1].energy, grid.width
    # plain three-point stencil, second order; used as a sensitivity control
    c = UNITS.kinetic(0.067)
    N = grid.n
    d = np.full(N, 2 * c / dx**2)
    e = np.full(N - 1, -c / dx**2)
    E = sla.eigh_tridiagonal(d, e, select="i", select_range=(n - 1, n - 1), eigvals_only=True)
    return float(E[0]), grid.width


def convergence_slope(dx0=0.08, width=21.0, mode=10, stencil="numerov", levels=4):
    """Log-log slope of |E_n(dx) - exact| over dx0, dx0/2, ...

    The exact value uses the realised wall-to-wall width (N + 1) dx, so a
    step that does not divide the nominal width still converges cleanly.
    """
    dxs = [dx0 / 2**i for i in range(levels)]
    errs = []
    for dx in dxs:
        E, W = _empty_mode(width, dx, mode, stencil)
        errs.append(abs(E - empty_well_energies(mode, W, 0.067)[-1]))
    return float(np.polyfit(np.log(dxs), np.log(errs), 1)[0]), dxs, errs


def check_convergence(opts: ValidateOptions) -> Check:
    slope, dxs, errs = convergence_slope(opts.dx0, stencil=opts.stencil)
    ok = abs(slope - 4.0) <= 0.3
    detail = ", ".join(f"{e:.1e}" for e in errs)
    return Check(f"convergence order (E_10, 21 nm, dx {dxs[0]:g}..{dxs[-1]:g})", ok,
                 f"slope {slope:.3f}; errors {detail}", "4.0 +/- 0.3")


def check_empty_well(opts: ValidateOptions) -> Check:
    grid = build_grid(21.0, opts.dx, None, 0.067)
    E = np.array([p.energy for p in solve_grid(grid, 10)])
    exact = empty_well_energies(10, 21.0, 0.067)
    rel = float(np.max(np.abs(E - exact) / exact))
    return Check("empty-well law, first 10 modes", rel < 1e-4, f"max rel err {rel:.2e}", "1e-4")


def check_numerov_quality(opts: ValidateOptions) -> Check:
    grid = build_grid(21.0, opts.dx, LayeredStructure.dqwtb(1, 3, 3, 1, 3, 3), 0.067)
    pairs = solve_grid(grid, 20)
    m = np.full(grid.n, 0.067)
    res = max(float(np.sqrt(np.sum((apply_hamiltonian(p.psi, grid.dx, grid.v, m) - p.energy * p.psi) ** 2)
                            * grid.dx)) / max(1.0, abs(p.energy)) for p in pairs)
    U = np.array([p.psi for p in pairs])
    orth = float(np.max(np.abs(U @ U.T * grid.dx - np.eye(len(pairs)))))
    par = max(float(np.max(np.abs(p.psi - p.parity * p.psi[::-1]))) for p in pairs)
    ok = res <= 1e-8 and orth < 1e-8 and par < 1e-6
    return Check("Numerov residual / orthonormality / parity (1 eV triple barrier)", ok,
                 f"{res:.1e} / {orth:.1e} / {par:.1e}", "1e-8 / 1e-8 / 1e-6")


def check_monotonic(opts: ValidateOptions) -> Check:
    rows = []
    for V in (0.0, 1.0, 2.0, 3.0, 10.0):
        grid = build_grid(21.0, opts.dx, LayeredStructure.dqwtb(V, 3, 3, V, 3, 3), 0.067)
        rows.append([p.energy for p in solve_grid(grid, 10)])
    worst = float(np.min(np.diff(np.array(rows), axis=0)))
    return Check("energies non-decreasing in barrier height", worst >= 0,
                 f"min step {worst:.3e} eV", ">= 0")


def check_pdm_reduction(opts: ValidateOptions) -> Check:
    grid = build_grid(21.0, opts.dx, LayeredStructure.dqwtb(1, 3, 3, 1, 3, 3), 0.067)
    a = np.array([p.energy for p in solve_pdm(grid, n_modes=10)])
    b = np.array([p.energy for p in solve_grid(grid, 10)])
    rel = float(np.max(np.abs(a - b) / np.abs(b)))
    return Check("position-dependent mass reduces to constant mass", rel < 1e-9,
                 f"max rel diff {rel:.1e}", "1e-9")


PDM_PROFILES = (
    MassProfile("smooth-step", dict(m_left=0.067, m_right=0.15, center=10.5, width=1.0)),
    MassProfile("gaussian-bump", dict(base=0.067, amplitude=0.3, center=10.5, sigma=1.0)),
)


def pdm_test_potential(x):
    """Smooth hump used for residual checks; steps would spoil the difference oracle."""
    return 0.5 * np.exp(-((x - 10.5) / 3.0) ** 2)


def check_pdm_residual(opts: ValidateOptions) -> Check:
    worst = 0.0
    for profile in PDM_PROFILES:
        grid = build_grid(21.0, opts.dx, pdm_test_potential, profile)
        for params in (VonRoosParams(), VonRoosParams(-0.5, 0.0, -0.5)):
            for p in solve_pdm(grid, params, 10):
                worst = max(worst, residual_check(p, grid, params) / residual_threshold(p.energy))
    return Check("position-dependent mass residual, 10 modes x 2 profiles", worst <= 1.0,
                 f"worst residual / limit {worst:.2e}", "1")


CHECKS = (check_flux, check_oracle, check_swap, check_reciprocity, check_convergence,
          check_empty_well, check_numerov_quality, check_monotonic, check_pdm_reduction,
          check_pdm_residual)


def run_suite(opts: ValidateOptions | None = None, checks=CHECKS) -> list[Check]:
    opts = opts or ValidateOptions()
    out = []
    for fn in checks:
        t0 = time.perf_counter()
        try:
            c = fn(opts)
        except Exception as exc:  # noqa: BLE001 - one broken check must not stop the rest
            c = Check(fn.__name__, False, f"error: {exc!r}")
        c.seconds = time.perf_counter() - t0
        out.append(c)
    return out
