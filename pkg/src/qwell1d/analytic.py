"""Closed-form scattering for the single barrier, the double barrier (one
well) and the triple barrier with equal lateral barriers (two wells).

All functions take the lead potential as zero and evaluate every formula
with the complex wavenumber from :func:`qwell1d.core.wavenumber`, so one code
path serves both the propagating (E > V) and the evanescent (E < V) regime.

Phase convention
----------------
``t`` is the amplitude of ``exp(i k x)`` on the right of the structure with
``x`` measured from the structure's left edge, and ``r`` is the amplitude of
``exp(-i k x)`` on the left, referenced at the same edge.  This is the
convention carried by the ``exp(-i k1 a)`` factor of the textbook
single-barrier amplitude and the one used by :mod:`qwell1d.tmm`.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .core import UNITS, EnergyGrid, LayeredStructure, Units, wavenumber

_SERIES_CUTOFF = 1e-6


@dataclass(frozen=True)
class ScatteringResult:
    E: float
    t: complex
    r: complex
    T: float
    R: float
    theta_T: float
    theta_R: float


def _sin_over_k(k, w):
    """sin(k w) / k, finite at k = 0."""
    k = np.asarray(k, dtype=complex)
    kw = k * w
    small = np.abs(kw) < _SERIES_CUTOFF
    safe_k = np.where(small, 1.0, k)
    out = np.where(small, w * (1.0 - kw**2 / 6.0), np.sin(kw) / safe_k)
    return out


def barrier_amplitudes(E, V, w, mass_ratio, units: Units = UNITS):
    """Return ``(t, r, t_rev)`` for one rectangular barrier of height V, width w.

    ``t`` and ``r`` are the textbook single-barrier amplitudes.  ``t_rev`` has
    the sign of the ``i (k1^2 + k2^2)`` term flipped in the denominator; for
    a real potential it equals ``conj(t_local) * exp(-i k1 w)``.

    The expressions are divided through by k2 so that the band edge
    E = V is handled by the series of sin(k2 w)/k2.  A zero width gives
    ``t = 1, r = 0``.
    """
    E = np.asarray(E, dtype=float)
    k1 = wavenumber(E, 0.0, mass_ratio, units)
    k2 = wavenumber(E, V, mass_ratio, units)
    s = _sin_over_k(k2, w)
    c = np.cos(k2 * w)
    k1sq, k2sq = k1**2, k2**2
    phase = np.exp(-1j * k1 * w)
    t = 2 * k1 * phase / (2 * k1 * c - 1j * (k1sq + k2sq) * s)
    r = (k1sq - k2sq) * s / ((k1sq + k2sq) * s + 2j * k1 * c)
    t_rev = 2 * k1 * phase / (2 * k1 * c + 1j * (k1sq + k2sq) * s)
    return t, r, t_rev


def _result(E, t, r) -> ScatteringResult:
    t, r = complex(t), complex(r)
    return ScatteringResult(float(E), t, r, abs(t) ** 2, abs(r) ** 2,
                            float(np.angle(t)), float(np.angle(r)))


def _check_energy(E):
    if np.ndim(E) != 0:
        raise TypeError("scalar energy expected; use sweep() for grids")
    if not E > 0:
        raise ValueError("energy must be > 0 (no propagating mode in the leads)")


def _single_barrier(E, V0, a, mass_ratio, units=UNITS):
    t, r, _ = barrier_amplitudes(E, V0, a, mass_ratio, units)
    return t, r


def single_barrier(E, V0, a, mass_ratio=0.067, units: Units = UNITS) -> ScatteringResult:
    """Transmission and reflection of one rectangular barrier on [0, a]."""
    if not a > 0:
        raise ValueError("barrier width must be > 0")
    _check_energy(E)
    t, r = _single_barrier(E, V0, a, mass_ratio, units)
    return _result(E, t, r)


def single_barrier_T_closed(E, V0, a, mass_ratio=0.067, units: Units = UNITS):
    """T from the real-valued formula 4E(E-V0) / (4E(E-V0) + V0^2 sin^2(k2 a)).

    Both terms are divided by k2^2 so that E = V0 stays finite.
    """
    E = np.asarray(E, dtype=float)
    k2 = wavenumber(E, V0, mass_ratio, units)
    s = _sin_over_k(k2, a)
    de = units.kinetic(mass_ratio)  # (E - V0) = de * k2^2
    num = 4 * E * de
    T = num / (num + V0**2 * s**2)
    return np.real(T)


def single_barrier_R_closed(E, V0, a, mass_ratio=0.067, units: Units = UNITS):
    E = np.asarray(E, dtype=float)
    k2 = wavenumber(E, V0, mass_ratio, units)
    s = _sin_over_k(k2, a)
    num = V0**2 * s**2
    return np.real(num / (4 * E * units.kinetic(mass_ratio) + num))


def single_barrier_phases_tanh(E, V0, a, mass_ratio=0.067, units: Units = UNITS):
    """Transmission and reflection angles from the tanh forms (E < V0 only).

    The tanh form of the reflection angle is offset by pi from ``arg(r)`` of
    :func:`single_barrier` (an overall sign convention on r); ``theta_T``
    agrees with ``arg(t)`` modulo 2 pi.
    """
    if np.any(np.asarray(E) >= V0):
        raise ValueError("tanh forms apply below the barrier top only")
    k1 = np.real(wavenumber(E, 0.0, mass_ratio, units))
    kappa = np.imag(wavenumber(E, V0, mass_ratio, units))
    g = (k1**2 - kappa**2) / (2 * k1 * kappa) * np.tanh(kappa * a)
    theta_T = -k1 * a - np.arctan(-g)
    theta_R = np.pi / 2 + np.arctan(g)
    return theta_T, theta_R


def _sqw_db(E, V1_left, a, L, V_right, b, mass_ratio, units=UNITS):
    k1 = wavenumber(E, 0.0, mass_ratio, units)
    t1, r1, _ = barrier_amplitudes(E, V1_left, a, mass_ratio, units)
    t2, r2, _ = barrier_amplitudes(E, V_right, b, mass_ratio, units)
    loop = 1 - r1 * r2 * np.exp(2j * k1 * L)
    t_far = t1 * t2 * np.exp(1j * k1 * L) / loop
    # t_far references the outgoing wave one well-width further along;
    # strip that free-propagation phase to stay on the left-edge convention
    t = t_far * np.exp(-1j * k1 * L)
    t1_local = t1 * np.exp(1j * k1 * a)
    r = r1 + t1_local**2 * r2 * np.exp(2j * k1 * L) / loop
    return t, r


def sqw_db(E, V1_left, a, L, V_right, b, mass_ratio=0.067, units: Units = UNITS) -> ScatteringResult:
    """Barrier(V1_left, a) | well of width L | barrier(V_right, b).

    ``b = 0`` removes the second barrier and leaves the single barrier.
    """
    if not a > 0 or b < 0:
        raise ValueError("need a > 0 and b >= 0")
    if L < 0:
        raise ValueError("well width must be >= 0")
    _check_energy(E)
    return _result(E, *_sqw_db(E, V1_left, a, L, V_right, b, mass_ratio, units))


def sqw_db_T_identical(E, V1, a, L, mass_ratio=0.067, units: Units = UNITS):
    """T of two identical barriers from T1, R1 and the reflection phase.

    T = 1 / (1 + 4 (R1 / T1^2) sin^2(k1 L + theta_R)).
    """
    E = np.asarray(E, dtype=float)
    k1 = np.real(wavenumber(E, 0.0, mass_ratio, units))
    t1, r1, _ = barrier_amplitudes(E, V1, a, mass_ratio, units)
    T1 = np.abs(t1) ** 2
    R1 = np.abs(r1) ** 2
    theta = np.angle(r1)
    return 1.0 / (1.0 + 4.0 * (R1 / T1**2) * np.sin(k1 * L + theta) ** 2)


def _dqwtb(E, V1, a, L1, V2, b, L2, mass_ratio, units=UNITS, sign=+1):
    k1 = wavenumber(E, 0.0, mass_ratio, units)
    t1, r1, _ = barrier_amplitudes(E, V1, a, mass_ratio, units)
    t2, r2, t1p = barrier_amplitudes(E, V2, b, mass_ratio, units)
    S = L1 + L2
    # Denominator grouped as  [2 r1 r2 cos(k1 (L2 - L1)) e^{i k1 S}] - 1
    #                         + (t2 / t1') r1^2 e^{2 i k1 S}.
    # t2 and t1' must carry the same exp(-i k1 b) factor so that their ratio
    # is the pure phase t_local / conj(t_local).
    den = (2 * r1 * r2 * np.cos(k1 * (L2 - L1)) * np.exp(1j * k1 * S)
           - 1 + sign * (t2 / t1p) * r1**2 * np.exp(2j * k1 * S))
    # t1^2 t2 / den is the left-edge amplitude times -1
    t = -t1**2 * t2 / den

    # Reflection: fold barrier 2 + well L2 + barrier 3 into one scatterer,
    # then close the cavity of width L1 against barrier 1.
    t1_local = t1 * np.exp(1j * k1 * a)
    t2_local = t2 * np.exp(1j * k1 * b)
    e2 = np.exp(2j * k1 * L2)
    r_right = r2 + t2_local**2 * r1 * e2 / (1 - r2 * r1 * e2)
    e1 = np.exp(2j * k1 * L1)
    r = r1 + t1_local**2 * r_right * e1 / (1 - r1 * r_right * e1)
    return t, r


def dqwtb(E, V1, a, L1, V2, b, L2, mass_ratio=0.067, units: Units = UNITS) -> ScatteringResult:
    """Two wells between three barriers, lateral barriers equal (V1, a).

    Layout: barrier(V1, a) | well L1 | barrier(V2, b) | well L2 | barrier(V1, a).
    """
    if not a > 0 or b < 0:
        raise ValueError("need a > 0 and b >= 0")
    if L1 < 0 or L2 < 0:
        raise ValueError("well widths must be >= 0")
    _check_energy(E)
    return _result(E, *_dqwtb(E, V1, a, L1, V2, b, L2, mass_ratio, units))


def dqwtb_params(structure: LayeredStructure) -> dict:
    """Extract closed-form parameters from a five-layer stack.

    Raises ValueError for stacks the closed form does not cover (unequal
    lateral barriers, non-zero wells, mixed masses); use :mod:`qwell1d.tmm`
    for those.
    """
    layers = structure.layers
    if len(layers) != 5:
        raise ValueError("the closed form needs exactly five layers")
    left, w1, mid, w2, right = layers
    if (left.height, left.width) != (right.height, right.width):
        raise ValueError("lateral barriers differ; use the transfer-matrix solver")
    if w1.height != structure.lead_potential or w2.height != structure.lead_potential:
        raise ValueError("wells must sit at the lead potential")
    if structure.lead_potential != 0.0:
        raise ValueError("closed forms assume zero lead potential")
    masses = {l.mass_ratio for l in layers} | {structure.lead_mass_ratio}
    if len(masses) != 1:
        raise ValueError("closed forms assume one uniform mass")
    return dict(V1=left.height, a=left.width, L1=w1.width, V2=mid.height,
                b=mid.width, L2=w2.width, mass_ratio=left.mass_ratio)


_KINDS = {
    "single_barrier": (_single_barrier, ("V0", "a")),
    "sqw_db": (_sqw_db, ("V1_left", "a", "L", "V_right", "b")),
    "dqwtb": (_dqwtb, ("V1", "a", "L1", "V2", "b", "L2")),
}

CSV_COLUMNS = ("E_eV", "T", "R", "theta_T_rad", "theta_R_rad", "re_t", "im_t", "re_r", "im_r")


@dataclass
class SweepTable:
    """Scattering results over an energy grid, one row per energy.

    Rows that could not be evaluated hold NaN and an entry in ``errors``.
    """

    E: np.ndarray
    t: np.ndarray
    r: np.ndarray
    errors: dict = field(default_factory=dict)

    @property
    def T(self):
        return np.abs(self.t) ** 2

    @property
    def R(self):
        return np.abs(self.r) ** 2

    @property
    def theta_T(self):
        return np.angle(self.t)

    @property
    def theta_R(self):
        return np.angle(self.r)

    @property
    def ok(self):
        return np.isfinite(self.t) & np.isfinite(self.r)

    def __len__(self):
        return self.E.size

    def row(self, i) -> ScatteringResult:
        return ScatteringResult(float(self.E[i]), complex(self.t[i]), complex(self.r[i]),
                                float(self.T[i]), float(self.R[i]),
                                float(self.theta_T[i]), float(self.theta_R[i]))

    def rows(self):
        return [self.row(i) for i in range(len(self))]

    def columns(self) -> dict:
        return {
            "E_eV": self.E, "T": self.T, "R": self.R,
            "theta_T_rad": self.theta_T, "theta_R_rad": self.theta_R,
            "re_t": self.t.real, "im_t": self.t.imag,
            "re_r": self.r.real, "im_r": self.r.imag,
        }

    def to_csv(self, path):
        write_csv(path, self.columns())


def fmt(value) -> str:
    """Fixed CSV float format: 10 significant digits."""
    value = float(value)
    if math.isnan(value):
        return "nan"
    return format(value, ".10g")


def write_csv(path, columns: dict):
    names = list(columns)
    data = [np.asarray(columns[n]) for n in names]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(names)
        for i in range(len(data[0])):
            writer.writerow([fmt(col[i]) if col.dtype.kind == "f" else str(col[i]) for col in data])


def table_from_function(func, energies) -> SweepTable:
    """Evaluate a vectorised ``func(E) -> (t, r)`` and mark failed rows."""
    E = np.asarray(energies, dtype=float)
    order = np.argsort(E, kind="stable")
    E = E[order]
    t = np.full(E.shape, np.nan + 0j)
    r = np.full(E.shape, np.nan + 0j)
    errors = {}
    good = E > 0
    for i in np.flatnonzero(~good):
        errors[int(i)] = "energy must be > 0"
    if np.any(good):
        with np.errstate(all="ignore"):
            tg, rg = func(E[good])
        t[good] = tg
        r[good] = rg
    for i in np.flatnonzero(good & ~(np.isfinite(t) & np.isfinite(r))):
        errors[int(i)] = "non-finite amplitude"
        t[i] = r[i] = np.nan
    return SweepTable(E, t, r, errors)


def sweep(kind: str, params: dict, grid: EnergyGrid | np.ndarray,
          units: Units = UNITS) -> SweepTable:
    """Evaluate one closed form over an energy grid.

    ``kind`` is ``"single_barrier"``, ``"sqw_db"`` or ``"dqwtb"``; ``params``
    holds the keyword arguments of the matching function (``mass_ratio``
    optional).
    """
    if kind not in _KINDS:
        raise ValueError(f"unknown closed form {kind!r}")
    func, names = _KINDS[kind]
    missing = [n for n in names if n not in params]
    if missing:
        raise ValueError(f"{kind} needs parameters {missing}")
    mass = params.get("mass_ratio", 0.067)
    args = [params[n] for n in names]
    energies = grid.values() if isinstance(grid, EnergyGrid) else grid
    return table_from_function(lambda E: func(E, *args, mass, units), energies)


def find_peaks(table: SweepTable, min_height: float = 0.0):
    """Strict local maxima of T, refined by a parabola through three samples.

    Returns a list of ``(E, T)`` tuples in ascending energy.
    """
    E = table.E
    T = table.T
    peaks = []
    for i in range(1, len(E) - 1):
        a, b, c = T[i - 1], T[i], T[i + 1]
        if not (np.isfinite(a) and np.isfinite(b) and np.isfinite(c)):
            continue
        if b > a and b > c and b >= min_height:
            coeffs = np.polyfit(E[i - 1:i + 2] - E[i], [a, b, c], 2)
            if coeffs[0] < 0:
                xv = -coeffs[1] / (2 * coeffs[0])
                peaks.append((float(E[i] + xv), float(np.polyval(coeffs, xv))))
            else:
                peaks.append((float(E[i]), float(b)))
    return peaks
