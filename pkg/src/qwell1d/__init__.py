"""One-dimensional heterostructure quantum wells.

Scattering (closed forms and transfer matrices) and bound states (matrix
Numerov, with optional position-dependent effective mass) for layered
potentials.  The command-line entry point is ``qwell1d``.
"""

from .analytic import SweepTable, dqwtb, single_barrier, sqw_db, sweep
from .core import UNITS, EnergyGrid, Layer, LayeredStructure, PotentialGrid, Units, build_grid, wavenumber
from .numerov import EigenPair, confinement_report, solve_grid
from .pdm import MassProfile, VonRoosParams, residual_check, solve_pdm
from .tmm import scatter, sweep_tmm

__version__ = "0.1.0"

__all__ = [
    "UNITS", "Units", "Layer", "LayeredStructure", "EnergyGrid", "PotentialGrid", "build_grid",
    "wavenumber", "single_barrier", "sqw_db", "dqwtb", "sweep", "SweepTable", "scatter",
    "sweep_tmm", "EigenPair", "solve_grid", "confinement_report", "MassProfile", "VonRoosParams",
    "solve_pdm", "residual_check", "__version__",
]
