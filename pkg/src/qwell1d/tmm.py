"""Transfer-matrix scattering for arbitrary piecewise-constant stacks.

Layers are composed left to right in the state basis ``(psi, psi'/m)``,
in which each slab is the matrix

    [[cos(k w),          m sin(k w) / k],
     [-k sin(k w) / m,   cos(k w)      ]]

with unit determinant.  Continuity of ``psi`` and ``psi'/m`` at every
interface is then just the identity, and the band edge k = 0 is regular.
Evanescent slabs are stored divided by ``exp(|Im k| w)``; the accumulated
log-scale is restored only in the transmitted amplitude, so thick barriers
underflow to T = 0 instead of overflowing.

Amplitudes follow the left-edge convention of :mod:`qwell1d.analytic`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .analytic import SweepTable, ScatteringResult
from .core import UNITS, EnergyGrid, Layer, LayeredStructure, Units, wavenumber

_SERIES_CUTOFF = 1e-6
_SINGULAR = 1e-300


class NumericalOverflow(ArithmeticError):
    """Composition became singular (deep tunnelling beyond float range)."""


@dataclass(frozen=True)
class TransferMatrix:
    """Maps plane-wave amplitudes ``(A, B)`` on the right of a section to the
    amplitudes on its left, for ``psi = A exp(i k x') + B exp(-i k x')`` with
    ``x'`` measured from the section edge on each side.
    """

    m11: complex
    m12: complex
    m21: complex
    m22: complex

    def as_array(self) -> np.ndarray:
        return np.array([[self.m11, self.m12], [self.m21, self.m22]])

    @classmethod
    def from_array(cls, a) -> "TransferMatrix":
        return cls(complex(a[0, 0]), complex(a[0, 1]), complex(a[1, 0]), complex(a[1, 1]))

    def __matmul__(self, other: "TransferMatrix") -> "TransferMatrix":
        return TransferMatrix.from_array(self.as_array() @ other.as_array())

    @property
    def det(self) -> complex:
        return self.m11 * self.m22 - self.m12 * self.m21


def _slab(k, w, m):
    """Scaled slab propagator in the (psi, psi'/m) basis, vectorised over k.

    Returns ``(P, log_scale)`` with the true propagator ``exp(log_scale) * P``.
    """
    k = np.asarray(k, dtype=complex)
    g = np.abs(k.imag) * w
    ep = np.exp(1j * k * w - g)
    em = np.exp(-1j * k * w - g)
    cos = 0.5 * (ep + em)
    kw = k * w
    small = np.abs(kw) < _SERIES_CUTOFF
    safe_k = np.where(small, 1.0, k)
    sin_over_k = np.where(small, w * (1 - kw**2 / 6) * np.exp(-g), (ep - em) / (2j * safe_k))
    k_sin = k**2 * sin_over_k
    P = np.empty(k.shape + (2, 2), dtype=complex)
    P[..., 0, 0] = cos
    P[..., 0, 1] = m * sin_over_k
    P[..., 1, 0] = -k_sin / m
    P[..., 1, 1] = cos
    return P, g


def _edge_basis(k, m):
    """Columns: (psi, psi'/m) of exp(+ikx) and exp(-ikx) at x' = 0."""
    k = np.asarray(k, dtype=complex)
    q = 1j * k / m
    D = np.empty(k.shape + (2, 2), dtype=complex)
    D[..., 0, 0] = 1
    D[..., 0, 1] = 1
    D[..., 1, 0] = q
    D[..., 1, 1] = -q
    return D


def layer_matrix(E, layer: Layer, left_k, right_k, left_mass=None, right_mass=None,
                 units: Units = UNITS) -> TransferMatrix:
    """Transfer matrix of one layer between two media.

    ``left_k`` and ``right_k`` are the wavenumbers of the media on either
    side (masses default to the layer's own).  Interface matching uses
    continuity of ``psi`` and ``psi'/m``.  The result maps right-side
    amplitudes (referenced at the layer's right edge) to left-side
    amplitudes (referenced at its left edge).  Not scaled: very thick
    evanescent layers overflow here, use :func:`scatter` for those.
    """
    left_mass = layer.mass_ratio if left_mass is None else left_mass
    right_mass = layer.mass_ratio if right_mass is None else right_mass
    k = wavenumber(E, layer.height, layer.mass_ratio, units)
    P, g = _slab(k, layer.width, layer.mass_ratio)
    P = P * np.exp(g)
    D_left = _edge_basis(left_k, left_mass)
    D_right = _edge_basis(right_k, right_mass)
    M = np.linalg.solve(D_left, np.linalg.solve(P, D_right))
    return TransferMatrix.from_array(M)


def _compose(structure: LayeredStructure, E, units: Units):
    """Total scaled propagator from the left edge to the right edge."""
    E = np.atleast_1d(np.asarray(E, dtype=float))
    M = np.broadcast_to(np.eye(2, dtype=complex), E.shape + (2, 2)).copy()
    log_scale = np.zeros(E.shape)
    for layer in structure.layers:
        k = wavenumber(E, layer.height, layer.mass_ratio, units)
        P, g = _slab(k, layer.width, layer.mass_ratio)
        M = P @ M
        log_scale += g
        # renormalise to keep entries O(1)
        norm = np.max(np.abs(M), axis=(-2, -1))
        norm = np.where(norm > 0, norm, 1.0)
        M /= norm[..., None, None]
        log_scale += np.log(norm)
    return E, M, log_scale


def _amplitudes(structure: LayeredStructure, E, units: Units = UNITS):
    """Vectorised (t, r) for incidence from the left; raises on overflow."""
    E, M, log_scale = _compose(structure, E, units)
    kl = wavenumber(E, structure.lead_potential, structure.lead_mass_ratio, units)
    kr = kl
    mass = structure.lead_mass_ratio
    qi = np.asarray(kl / mass)
    qo = np.asarray(kr / mass)
    m11, m12, m21, m22 = M[..., 0, 0], M[..., 0, 1], M[..., 1, 0], M[..., 1, 1]
    den = 1j * qo * m11 + qo * qi * m12 - m21 + 1j * qi * m22
    num = -1j * qo * m11 + qo * qi * m12 + m21 + 1j * qi * m22
    if np.any(np.abs(den) < _SINGULAR) or not np.all(np.isfinite(den)):
        raise NumericalOverflow("transfer-matrix composition is singular")
    r = num / den
    # det of the unscaled propagator is 1, so t_edge = 2 i qi / den_unscaled
    t_edge = 2j * qi * np.exp(-log_scale) / den
    t = t_edge * np.exp(-1j * kr * structure.total_width)
    return t, r


def structure_matrix(structure: LayeredStructure, E, units: Units = UNITS) -> TransferMatrix:
    """Amplitude-basis transfer matrix of a whole stack between its leads."""
    E_arr, M, log_scale = _compose(structure, E, units)
    k = wavenumber(E_arr, structure.lead_potential, structure.lead_mass_ratio, units)
    D = _edge_basis(k, structure.lead_mass_ratio)[0]
    full = M[0] * np.exp(log_scale[0])
    return TransferMatrix.from_array(np.linalg.solve(D, np.linalg.solve(full, D)))


def scatter(structure: LayeredStructure, E: float, units: Units = UNITS) -> ScatteringResult:
    """Scattering amplitudes of a layered stack at one energy (left incidence)."""
    if not E > structure.lead_potential:
        raise ValueError("energy must exceed the lead potential")
    t, r = _amplitudes(structure, E, units)
    t, r = complex(t[0]), complex(r[0])
    # identical leads on both sides, so T = |t|^2 without a flux ratio
    return ScatteringResult(float(E), t, r, abs(t) ** 2, abs(r) ** 2,
                            float(np.angle(t)), float(np.angle(r)))


def sweep_tmm(structure: LayeredStructure, grid: EnergyGrid | np.ndarray,
              units: Units = UNITS) -> SweepTable:
    """:func:`scatter` over an energy grid; failed rows become NaN."""
    energies = grid.values() if isinstance(grid, EnergyGrid) else np.asarray(grid, dtype=float)
    E = np.sort(energies, kind="stable")
    t = np.full(E.shape, np.nan + 0j)
    r = np.full(E.shape, np.nan + 0j)
    errors = {}
    good = E > structure.lead_potential
    for i in np.flatnonzero(~good):
        errors[int(i)] = "energy must exceed the lead potential"
    idx = np.flatnonzero(good)
    if idx.size:
        try:
            with np.errstate(all="ignore"):
                t[idx], r[idx] = _amplitudes(structure, E[idx], units)
        except NumericalOverflow:
            # retry row by row so only the offending energies are marked
            for i in idx:
                try:
                    t[i], r[i] = (a[0] for a in _amplitudes(structure, E[i], units))
                except NumericalOverflow as exc:
                    errors[int(i)] = str(exc)
    bad = good & ~(np.isfinite(t) & np.isfinite(r))
    for i in np.flatnonzero(bad):
        errors.setdefault(int(i), "non-finite amplitude")
        t[i] = r[i] = np.nan
    return SweepTable(E, t, r, errors)
