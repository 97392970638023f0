"""Bound states in an infinite well by the matrix Numerov method.

The discretised Schrodinger equation reads

    [-(hbar^2 / 2m) B^-1 A + V] psi = E psi

with the three-point second difference ``A = (1, -2, 1) / dx^2`` and the
Numerov weight ``B = (1, 10, 1) / 12``, truncated at the walls (psi = 0
one step outside the first and last sample).  A and B are polynomials in
the same shift matrix, so ``B^-1 A`` is symmetric and the Hamiltonian is a
symmetric operator; it is never formed explicitly for large grids.  The
lowest states are found by shift-invert Lanczos, where each application of
``(H - sigma)^-1`` is one sparse tridiagonal solve.

Mirror-symmetric grids are split into even and odd sectors, which gives
eigenfunctions of exact parity even inside numerically degenerate doublets.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .core import UNITS, PotentialGrid, Units

log = logging.getLogger(__name__)

_DENSE_LIMIT = 200
_TIE = 1e-9


class EigensolverError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class NumerovSystem:
    A: sp.csr_matrix
    B: sp.csr_matrix
    Vdiag: np.ndarray
    mass_ratio: float
    grid: PotentialGrid

    @property
    def n(self) -> int:
        return self.Vdiag.size


@dataclass(frozen=True, eq=False)
class EigenPair:
    """One bound state; ``psi`` is normalised so that sum(psi^2) dx = 1."""

    index: int
    energy: float
    psi: np.ndarray
    dx: float
    parity: int = 0  # +1 even, -1 odd, 0 when the grid has no mirror symmetry

    @property
    def density(self) -> np.ndarray:
        return self.psi**2


def second_difference(n: int, dx: float) -> sp.csr_matrix:
    ones = np.ones(n - 1)
    return sp.diags([ones, -2 * np.ones(n), ones], [-1, 0, 1], format="csr") / dx**2


def numerov_weight(n: int) -> sp.csr_matrix:
    ones = np.ones(n - 1)
    return sp.diags([ones, 10 * np.ones(n), ones], [-1, 0, 1], format="csr") / 12.0


def _weight_banded(n: int) -> np.ndarray:
    ab = np.empty((3, n))
    ab[0] = ab[2] = 1.0 / 12
    ab[1] = 10.0 / 12
    return ab


def assemble(grid: PotentialGrid) -> NumerovSystem:
    """Stencil matrices and potential for a constant-mass grid."""
    if not grid.constant_mass:
        raise ValueError("position-dependent mass: use qwell1d.pdm.solve_pdm")
    n = grid.n
    return NumerovSystem(second_difference(n, grid.dx), numerov_weight(n),
                         np.array(grid.v), float(grid.m[0]), grid)


def apply_hamiltonian(u, dx, w, m, units: Units = UNITS):
    """Apply ``m^-1/2 (-c B^-1 A) m^-1/2 + diag(w)`` to ``u``.

    With constant m this is the Numerov Hamiltonian itself.
    """
    u = np.asarray(u, dtype=float)
    n = u.shape[0]
    sqrt_m = np.sqrt(m)
    y = u / sqrt_m if u.ndim == 1 else u / sqrt_m[:, None]
    Ay = second_difference(n, dx) @ y
    kin = -units.hbar2_over_2me * sla.solve_banded((1, 1), _weight_banded(n), Ay)
    kin = kin / sqrt_m if u.ndim == 1 else kin / sqrt_m[:, None]
    return kin + (w * u if u.ndim == 1 else w[:, None] * u)


def _sector_basis(n: int, parity: int) -> sp.csr_matrix:
    """Orthonormal basis (n x n_sector) of even (+1) or odd (-1) vectors."""
    half = n // 2
    rows, cols, vals = [], [], []
    s = 1 / np.sqrt(2)
    for i in range(half):
        rows += [i, n - 1 - i]
        cols += [i, i]
        vals += [s, parity * s]
    ncol = half
    if n % 2 == 1 and parity == 1:
        rows.append(half)
        cols.append(half)
        vals.append(1.0)
        ncol += 1
    return sp.csr_matrix((vals, (rows, cols)), shape=(n, ncol))


def _dense_states(dx, w, m, basis, k, units):
    n = w.size
    A = second_difference(n, dx).toarray()
    K = sla.solve_banded((1, 1), _weight_banded(n), A)
    K = 0.5 * (K + K.T)
    sqrt_m = np.sqrt(m)
    H = -units.hbar2_over_2me * K / np.outer(sqrt_m, sqrt_m) + np.diag(w)
    if basis is not None:
        H = np.asarray(basis.T @ np.asarray(H @ basis))
    k = min(k, H.shape[0])
    E, U = sla.eigh(H, subset_by_index=[0, k - 1])
    return E, U


def _lanczos_states(dx, w, m, basis, k, units):
    n = w.size
    c = units.hbar2_over_2me
    sigma = float(np.min(w)) - 0.01 * max(1.0, abs(float(np.min(w))))
    A = second_difference(n, dx)
    B = numerov_weight(n)
    shifted = (-c * A + B @ sp.diags(m * (w - sigma))).tocsc()
    lu = spla.splu(shifted)
    sqrt_m = np.sqrt(m)

    def op(u):
        return sqrt_m * lu.solve(B @ (sqrt_m * u))

    if basis is None:
        dim = n
        matvec = op
    else:
        dim = basis.shape[1]
        basisT = basis.T.tocsr()

        def matvec(y):
            return basisT @ op(basis @ y)

    linop = spla.LinearOperator((dim, dim), matvec=matvec, dtype=float)
    v0 = np.random.default_rng(12345).standard_normal(dim)
    ncv = min(dim, max(2 * k + 1, k + 20))
    try:
        theta, U = spla.eigsh(linop, k=k, which="LA", v0=v0, ncv=ncv, tol=0)
    except spla.ArpackNoConvergence as exc:
        raise EigensolverError(
            f"eigensolver did not converge at mode {len(exc.eigenvalues) + 1}") from exc
    E = sigma + 1.0 / theta
    order = np.argsort(E)
    return E[order], U[:, order]


def lowest_states(dx, w, m, n_modes, units: Units = UNITS, symmetric=None):
    """Lowest eigenpairs of ``m^-1/2 (-c B^-1 A) m^-1/2 + diag(w)``.

    Returns ``(energies, vectors, parities)``; vectors are columns, not yet
    normalised.  ``w`` is the potential (eV) and ``m`` the mass ratio on
    the grid.
    """
    w = np.asarray(w, dtype=float)
    m = np.broadcast_to(np.asarray(m, dtype=float), w.shape).copy()
    n = w.size
    if not 1 <= n_modes <= n:
        raise ValueError(f"n_modes must be in [1, {n}]")
    if symmetric is None:
        scale = max(1.0, float(np.max(np.abs(w))))
        symmetric = (np.max(np.abs(w - w[::-1])) <= 1e-10 * scale
                     and np.max(np.abs(m - m[::-1])) <= 1e-10 * float(np.max(m)))
    if symmetric:
        w = 0.5 * (w + w[::-1])
        m = 0.5 * (m + m[::-1])
        sectors = [(1, _sector_basis(n, 1)), (-1, _sector_basis(n, -1))]
    else:
        sectors = [(0, None)]

    energies, vectors, parities = [], [], []
    for parity, basis in sectors:
        dim = n if basis is None else basis.shape[1]
        k = min(n_modes, dim)
        if k == 0:
            continue
        if dim <= _DENSE_LIMIT or k >= dim - 1:
            E, U = _dense_states(dx, w, m, basis, k, units)
        else:
            E, U = _lanczos_states(dx, w, m, basis, k, units)
        full = U if basis is None else basis @ U
        energies.append(E)
        vectors.append(full)
        parities.append(np.full(E.size, parity))
    E = np.concatenate(energies)
    U = np.hstack(vectors)
    P = np.concatenate(parities)

    order = list(np.argsort(E, kind="stable"))
    # within a numerical tie, even before odd
    for i in range(len(order) - 1):
        a, b = order[i], order[i + 1]
        if abs(E[a] - E[b]) < _TIE * max(1.0, abs(E[a])) and P[a] < P[b]:
            order[i], order[i + 1] = b, a
    order = np.array(order[:n_modes])
    return E[order], U[:, order], P[order]


def _normalise(u, dx):
    u = u / np.sqrt(np.sum(u**2) * dx)
    big = np.flatnonzero(np.abs(u) > 1e-6 * np.max(np.abs(u)))
    if u[big[0]] < 0:
        u = -u
    return u


def solve(system: NumerovSystem, n_modes: int, units: Units = UNITS) -> list[EigenPair]:
    """Lowest ``n_modes`` bound states, ascending in energy, index from 1."""
    grid = system.grid
    E, U, P = lowest_states(grid.dx, system.Vdiag, np.full(system.n, system.mass_ratio),
                            n_modes, units)
    return [EigenPair(i + 1, float(E[i]), _normalise(U[:, i], grid.dx), grid.dx, int(P[i]))
            for i in range(E.size)]


def solve_grid(grid: PotentialGrid, n_modes: int, units: Units = UNITS) -> list[EigenPair]:
    return solve(assemble(grid), n_modes, units)


def residual(pair: EigenPair, system: NumerovSystem, units: Units = UNITS) -> float:
    """Discrete-norm residual of the Numerov eigen-equation."""
    m = np.full(system.n, system.mass_ratio)
    Hpsi = apply_hamiltonian(pair.psi, system.grid.dx, system.Vdiag, m, units)
    return float(np.sqrt(np.sum((Hpsi - pair.energy * pair.psi) ** 2) * system.grid.dx))


def empty_well_energies(n_modes: int, width: float, mass_ratio: float, units: Units = UNITS):
    """n^2 hbar^2 pi^2 / (2 m L^2) for n = 1..n_modes."""
    n = np.arange(1, n_modes + 1)
    return units.kinetic(mass_ratio) * (n * np.pi / width) ** 2


def supergaussian_potential(heights, exponent: int, x, centers=(5.0, 10.0, 15.0),
                            strength: float = 3.0):
    """Sum of super-Gaussian barriers ``h_i exp(-strength (x - c_i)^exponent)``.

    ``x`` is in nm and enters the power unscaled.  Only even exponents are
    accepted (odd ones make the barriers one-sided).
    """
    exponent = int(exponent)
    if exponent < 2 or exponent % 2:
        raise ValueError("exponent must be an even integer >= 2")
    if len(heights) != len(centers):
        raise ValueError("one height per barrier centre")
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    with np.errstate(over="ignore"):
        for h, c in zip(heights, centers):
            out = out + h * np.exp(-strength * (x - c) ** exponent)
    return out


@dataclass(frozen=True)
class RegionProbability:
    start: float
    end: float
    probability: float

    @property
    def label(self) -> str:
        return f"P_{self.start:g}-{self.end:g}nm"

    @property
    def density(self) -> float:
        return self.probability / (self.end - self.start)


def confinement_report(pair: EigenPair, grid: PotentialGrid, regions=None,
                       tol: float = 1e-9) -> list[RegionProbability]:
    """Probability carried by each region, sum(psi^2) dx over its samples.

    ``regions`` is a sequence of ``(start, end)`` positions in nm covering
    the well; by default the layer interfaces stored on the grid.  A sample
    lying on a shared boundary is split evenly between both regions.
    """
    if regions is None:
        regions = grid.regions or ((0.0, grid.width),)
    x = grid.x
    rho = pair.psi**2 * grid.dx
    out = []
    for start, end in regions:
        inside = (x > start + tol) & (x < end - tol)
        on_edge = (np.abs(x - start) <= tol) | (np.abs(x - end) <= tol)
        p = rho[inside].sum() + 0.5 * rho[on_edge].sum()
        out.append(RegionProbability(float(start), float(end), float(p)))
    return out
