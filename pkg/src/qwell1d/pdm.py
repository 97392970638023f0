"""Bound states with a position-dependent effective mass.

The von Roos kinetic operator with ordering parameters (alpha, beta, gamma),
alpha + beta + gamma = -1, leads to

    psi'' - (m'/m) psi' + [ (t m''/m - s m'^2/m^2) / 2 + (2m/hbar^2)(E - V) ] psi = 0

with t = alpha + gamma and s = alpha (gamma + 2) - gamma (alpha + 2).
Writing psi = sqrt(m) phi removes the first-derivative term:

    phi'' = -(2m/hbar^2) (E - V_eff) phi
    V_eff = V - (hbar^2 / 2m) [ (1 + t) m'' / (2m) - (3 + 2 s) / 4 (m'/m)^2 ]

Numerov applied to the phi equation gives the symmetric-definite pencil

    [-(hbar^2/2) B^-1 A + diag(m V_eff)] phi = E diag(m) phi,

and the vector ``u = sqrt(m) phi`` that diagonalises its symmetric form is
psi itself, so the returned states are orthonormal in the plain inner
product.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .core import UNITS, PotentialGrid, Units
from .numerov import EigenPair, _normalise, lowest_states


@dataclass(frozen=True)
class VonRoosParams:
    alpha: float = 0.0
    beta: float = -1.0
    gamma: float = 0.0
    s_override: float | None = None

    def __post_init__(self):
        if abs(self.alpha + self.beta + self.gamma + 1.0) > 1e-12:
            raise ValueError("ordering parameters must satisfy alpha + beta + gamma = -1")

    @property
    def t_param(self) -> float:
        return self.alpha + self.gamma

    @property
    def s_param(self) -> float:
        if self.s_override is not None:
            return self.s_override
        return self.alpha * (self.gamma + 2) - self.gamma * (self.alpha + 2)


MASS_KINDS = ("constant", "smooth-step", "gaussian-bump", "tabulated")


@dataclass(frozen=True)
class MassProfile:
    """Mass ratio m(x) with its first two derivatives.

    Parameters by kind:

    * ``constant``: ``value``
    * ``smooth-step``: ``m_left``, ``m_right``, ``center``, ``width``
      (tanh step)
    * ``gaussian-bump``: ``base``, ``amplitude``, ``center``, ``sigma``
    * ``tabulated``: ``x`` and ``m`` sample lists; cubic-spline
      interpolation, derivatives by centred differences on the grid
    """

    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in MASS_KINDS:
            raise ValueError(f"unknown mass profile kind {self.kind!r}")

    def evaluate(self, x):
        x = np.asarray(x, dtype=float)
        p = self.params
        if self.kind == "constant":
            m = np.full_like(x, float(p["value"]))
            dm = np.zeros_like(x)
            d2m = np.zeros_like(x)
        elif self.kind == "smooth-step":
            delta = p["m_right"] - p["m_left"]
            u = (x - p["center"]) / p["width"]
            th = np.tanh(u)
            sech2 = 1.0 - th**2
            m = p["m_left"] + 0.5 * delta * (1.0 + th)
            dm = 0.5 * delta * sech2 / p["width"]
            d2m = -delta * sech2 * th / p["width"] ** 2
        elif self.kind == "gaussian-bump":
            d = x - p["center"]
            s2 = p["sigma"] ** 2
            g = p["amplitude"] * np.exp(-0.5 * d**2 / s2)
            m = p["base"] + g
            dm = -d / s2 * g
            d2m = (d**2 / s2**2 - 1.0 / s2) * g
        else:
            from scipy.interpolate import CubicSpline

            m = CubicSpline(np.asarray(p["x"], float), np.asarray(p["m"], float))(x)
            h = x[1] - x[0] if x.size > 1 else 1.0
            dm = np.gradient(m, h, edge_order=2)
            d2m = np.gradient(dm, h, edge_order=2)
        if np.any(m <= 0):
            raise ValueError("mass profile must stay positive")
        return m, dm, d2m

    def to_dict(self) -> dict:
        return {"kind": self.kind, **self.params}

    @classmethod
    def from_dict(cls, d: dict) -> "MassProfile":
        d = dict(d)
        return cls(d.pop("kind"), d)


def _mass_derivatives(grid: PotentialGrid):
    if grid.dm is not None and grid.d2m is not None:
        return grid.dm, grid.d2m
    dm = np.gradient(grid.m, grid.dx, edge_order=2)
    return dm, np.gradient(dm, grid.dx, edge_order=2)


def effective_potential(grid: PotentialGrid, params: VonRoosParams = VonRoosParams(),
                        units: Units = UNITS) -> np.ndarray:
    """V_eff on the grid samples; equals ``grid.v`` for a constant mass."""
    m = grid.m
    if np.any(m <= 0):
        raise ValueError("mass must be > 0 everywhere")
    dm, d2m = _mass_derivatives(grid)
    t, s = params.t_param, params.s_param
    bracket = (1.0 + t) * d2m / (2.0 * m) - (3.0 + 2.0 * s) / 4.0 * (dm / m) ** 2
    return grid.v - units.hbar2_over_2me / m * bracket


def solve_pdm(grid: PotentialGrid, params: VonRoosParams = VonRoosParams(), n_modes: int = 10,
              units: Units = UNITS) -> list[EigenPair]:
    """Lowest bound states for a position-dependent mass; returns psi, not phi."""
    ratio = grid.m[1:] / grid.m[:-1]
    if np.any(np.maximum(ratio, 1 / ratio) > 10):
        warnings.warn("mass changes by more than 10x across one step; profile under-resolved",
                      RuntimeWarning, stacklevel=2)
    w = effective_potential(grid, params, units)
    E, U, P = lowest_states(grid.dx, w, grid.m, n_modes, units)
    return [EigenPair(i + 1, float(E[i]), _normalise(U[:, i], grid.dx), grid.dx, int(P[i]))
            for i in range(E.size)]


def _fd4(psi, dx):
    """Fourth-order centred first and second derivatives at samples 2..N-3."""
    p = psi
    d1 = (-p[4:] + 8 * p[3:-1] - 8 * p[1:-3] + p[:-4]) / (12 * dx)
    d2 = (-p[4:] + 16 * p[3:-1] - 30 * p[2:-2] + 16 * p[1:-3] - p[:-4]) / (12 * dx**2)
    return d1, d2


def residual_check(pair: EigenPair, grid: PotentialGrid, params: VonRoosParams = VonRoosParams(),
                   units: Units = UNITS) -> float:
    """Max-norm residual of the untransformed equation, in eV.

    The equation is multiplied by hbar^2/2m so each term is an energy times
    psi, and the result is divided by max|psi|.  Derivatives of psi use
    fourth-order centred differences; the two samples next to each wall are
    skipped.
    """
    psi = pair.psi
    dm, d2m = _mass_derivatives(grid)
    m = grid.m
    d1, d2 = _fd4(psi, grid.dx)
    sl = slice(2, -2)
    t, s = params.t_param, params.s_param
    mi, dmi, d2mi = m[sl], dm[sl], d2m[sl]
    order = 0.5 * (t * d2mi / mi - s * (dmi / mi) ** 2)
    c = units.hbar2_over_2me / mi
    res = c * (d2 - dmi / mi * d1 + order * psi[sl]) + (pair.energy - grid.v[sl]) * psi[sl]
    return float(np.max(np.abs(res)) / np.max(np.abs(psi)))


def residual_threshold(energy: float) -> float:
    return 1e-5 * max(1.0, abs(energy))


def localized_pair(p1: EigenPair, p2: EigenPair):
    """Split a near-degenerate even/odd doublet into left- and right-localised states.

    Returns ``(left, right)`` sample arrays, each normalised.
    """
    a = (p1.psi + p2.psi) / np.sqrt(2)
    b = (p1.psi - p2.psi) / np.sqrt(2)
    half = a.size // 2
    if np.sum(a[:half] ** 2) >= np.sum(b[:half] ** 2):
        return a, b
    return b, a
