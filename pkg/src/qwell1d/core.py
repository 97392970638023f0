"""Shared units, geometry types and mesh construction.

Every solver in the package works in eV for energies, nm for lengths and
dimensionless mass ratios m/m_e.  The only physical constant needed is the
kinetic prefactor hbar^2 / (2 m_e) expressed in eV nm^2.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np
from scipy import constants as _const

# hbar^2 / (2 m_e) in eV nm^2, from CODATA values shipped with scipy.
HBAR2_OVER_2ME = _const.hbar**2 / (2.0 * _const.m_e) / _const.e * 1e18


@dataclass(frozen=True)
class Units:
    """Kinetic prefactor used by every solver."""

    hbar2_over_2me: float = HBAR2_OVER_2ME

    def __post_init__(self):
        if not self.hbar2_over_2me > 0:
            raise ValueError("hbar2_over_2me must be positive")

    def kinetic(self, mass_ratio):
        """hbar^2 / (2 m) in eV nm^2 for a mass given as m/m_e."""
        return self.hbar2_over_2me / mass_ratio


UNITS = Units()


@dataclass(frozen=True)
class Layer:
    """Constant-potential slab: width in nm, height in eV."""

    width: float
    height: float
    mass_ratio: float = 0.067

    def __post_init__(self):
        if not self.width > 0:
            raise ValueError(f"layer width must be > 0, got {self.width}")
        if not self.mass_ratio > 0:
            raise ValueError(f"mass_ratio must be > 0, got {self.mass_ratio}")


@dataclass(frozen=True)
class LayeredStructure:
    """Ordered stack of layers between two identical semi-infinite leads."""

    layers: tuple[Layer, ...]
    lead_potential: float = 0.0
    lead_mass_ratio: float = 0.067

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        if len(self.layers) == 0:
            raise ValueError("a structure needs at least one layer")
        if not self.lead_mass_ratio > 0:
            raise ValueError("lead_mass_ratio must be > 0")

    @property
    def total_width(self) -> float:
        return float(sum(layer.width for layer in self.layers))

    def interfaces(self) -> np.ndarray:
        """Positions of all layer boundaries, starting at 0."""
        return np.concatenate([[0.0], np.cumsum([l.width for l in self.layers])])

    def reversed(self) -> "LayeredStructure":
        return LayeredStructure(self.layers[::-1], self.lead_potential, self.lead_mass_ratio)

    @classmethod
    def from_pairs(cls, pairs: Sequence[tuple[float, float]], mass_ratio: float = 0.067,
                   lead_potential: float = 0.0) -> "LayeredStructure":
        """Build from ``[(width, height), ...]`` with one common mass."""
        layers = [Layer(float(w), float(h), mass_ratio) for w, h in pairs]
        return cls(tuple(layers), lead_potential, mass_ratio)

    @classmethod
    def dqwtb(cls, V1, a, L1, V2, b, L2, mass_ratio=0.067):
        """Barrier(V1, a) | well L1 | barrier(V2, b) | well L2 | barrier(V1, a).

        Zero-width entries are dropped, so ``b=0`` gives the double-barrier
        structure and ``L1=L2=0`` merges barriers.
        """
        pairs = [(a, V1), (L1, 0.0), (b, V2), (L2, 0.0), (a, V1)]
        return cls.from_pairs([p for p in pairs if p[0] > 0], mass_ratio)


@dataclass(frozen=True)
class EnergyGrid:
    e_min: float
    e_max: float
    n_points: int

    def __post_init__(self):
        if not self.e_min < self.e_max:
            raise ValueError("e_min must be < e_max")
        if self.n_points < 2:
            raise ValueError("an energy grid needs at least 2 points")

    def values(self) -> np.ndarray:
        return np.linspace(self.e_min, self.e_max, int(self.n_points))


@dataclass(frozen=True, eq=False)
class PotentialGrid:
    """Potential and mass sampled on the interior points of an infinite well.

    Sample ``i`` sits at ``x0 + i*dx``.  The walls (psi = 0) are at
    ``x0 - dx`` and ``x0 + N*dx``.  ``dm`` and ``d2m`` hold the first and
    second mass derivatives when the mass profile supplies them.
    """

    x0: float
    dx: float
    v: np.ndarray
    m: np.ndarray
    dm: np.ndarray | None = None
    d2m: np.ndarray | None = None
    regions: tuple = field(default=())

    def __post_init__(self):
        v = np.asarray(self.v, dtype=float)
        m = np.asarray(self.m, dtype=float)
        if m.ndim == 0:
            m = np.full_like(v, float(m))
        if not self.dx > 0:
            raise ValueError("dx must be > 0")
        if v.ndim != 1 or v.size < 3:
            raise ValueError("a grid needs at least 3 interior samples")
        if m.shape != v.shape:
            raise ValueError("mass and potential samples differ in length")
        if np.any(m <= 0):
            raise ValueError("mass_ratio samples must all be > 0")
        for name, arr in (("v", v), ("m", m)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        for name in ("dm", "d2m"):
            arr = getattr(self, name)
            if arr is not None:
                arr = np.asarray(arr, dtype=float)
                if arr.shape != v.shape:
                    raise ValueError(f"{name} length mismatch")
                arr.setflags(write=False)
                object.__setattr__(self, name, arr)

    @property
    def n(self) -> int:
        return self.v.size

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(self.n)

    @property
    def width(self) -> float:
        """Distance between the two walls."""
        return (self.n + 1) * self.dx

    @property
    def constant_mass(self) -> bool:
        return bool(np.all(self.m == self.m[0]))

    def is_mirror_symmetric(self, rtol: float = 1e-10) -> bool:
        scale_v = max(1.0, float(np.max(np.abs(self.v))))
        if np.max(np.abs(self.v - self.v[::-1])) > rtol * scale_v:
            return False
        return np.max(np.abs(self.m - self.m[::-1])) <= rtol * float(np.max(self.m))


def wavenumber(E, V, mass_ratio, units: Units = UNITS):
    """Complex wavenumber sqrt(m (E - V) / (hbar^2 / 2 m_e)) in 1/nm.

    The branch has non-negative real and imaginary parts: real above the
    band edge, positive imaginary below it.  Works elementwise on arrays.
    """
    arg = np.asarray(mass_ratio * (np.asarray(E, dtype=float) - V) / units.hbar2_over_2me)
    k = np.sqrt(arg.astype(complex))
    return k[()] if k.ndim == 0 else k


PotentialSpec = Union[LayeredStructure, Callable[[np.ndarray], np.ndarray], None]


def sample_layers(x, structure: LayeredStructure, offset: float, tol: float = 1e-9):
    """Sample a layered profile at positions ``x``.

    A point strictly inside a layer takes its height.  A point sitting on an
    interface takes the mean of the two sides, which keeps mirror-symmetric
    stacks symmetric on the grid.  Outside the stack the lead potential
    applies.
    """
    x = np.asarray(x, dtype=float)
    edges = offset + structure.interfaces()
    heights = np.array([l.height for l in structure.layers])
    masses = np.array([l.mass_ratio for l in structure.layers])
    outside_v, outside_m = structure.lead_potential, structure.lead_mass_ratio

    def values(per_layer, outside):
        padded = np.concatenate([[outside], per_layer, [outside]])
        # index of the region containing each point (0 = left of the stack)
        idx = np.searchsorted(edges, x, side="right")
        out = padded[idx]
        on_edge = np.min(np.abs(x[:, None] - edges[None, :]), axis=1) <= tol
        if np.any(on_edge):
            j = np.argmin(np.abs(x[on_edge, None] - edges[None, :]), axis=1)
            out[on_edge] = 0.5 * (padded[j] + padded[j + 1])
        return out

    return values(heights, outside_v), values(masses, outside_m)


def build_grid(domain_width: float, dx: float, potential: PotentialSpec = None,
               mass=0.067, offset: float | None = None) -> PotentialGrid:
    """Sample a potential and a mass profile inside an infinite well.

    Parameters
    ----------
    domain_width : float
        Wall-to-wall width in nm.
    dx : float
        Mesh step in nm.  It must divide ``domain_width`` to within half a
        step; the realised width is ``(N + 1) * dx``.
    potential : LayeredStructure, callable or None
        A layered stack (placed at ``offset``, centred when ``offset`` is
        None), or a function of position in nm returning eV, or None for an
        empty well.
    mass : float or mass profile
        Constant mass ratio, or an object with ``evaluate(x) -> (m, dm, d2m)``.
    """
    if not domain_width > 0:
        raise ValueError("domain_width must be > 0")
    if not dx > 0:
        raise ValueError("dx must be > 0")
    steps = domain_width / dx
    if abs(steps - round(steps)) > 0.5:
        raise ValueError("dx does not divide the domain width")
    n = int(round(steps)) - 1
    if n < 3:
        raise ValueError(f"grid has {n} interior points, need at least 3")
    x = dx * np.arange(1, n + 1)

    regions: tuple = ()
    if potential is None:
        v = np.zeros(n)
    elif isinstance(potential, LayeredStructure):
        if offset is None:
            offset = 0.5 * (domain_width - potential.total_width)
        v, _ = sample_layers(x, potential, offset)
        edges = np.concatenate([[0.0], offset + potential.interfaces(), [domain_width]])
        regions = tuple(zip(edges[:-1], edges[1:]))
    elif callable(potential):
        v = np.asarray(potential(x), dtype=float)
    else:
        raise TypeError("potential must be a LayeredStructure, a callable or None")

    dm = d2m = None
    if hasattr(mass, "evaluate"):
        m, dm, d2m = mass.evaluate(x)
    else:
        m = np.full(n, float(mass))
        dm = np.zeros(n)
        d2m = np.zeros(n)
    return PotentialGrid(x0=dx, dx=dx, v=v, m=m, dm=dm, d2m=d2m, regions=regions)
