"""Spectral solutions of semi-infinite, modified and doubly-infinite Volterra lattices."""

from ._errors import (
    BlowUpError,
    ConditioningError,
    ConvergenceError,
    NumericalError,
    PoleError,
    PositivityError,
    PrecisionError,
    TruncationError,
    ValidationError,
    VslError,
)
from .diagnostics import diagnose, hundertmark_simon_check, log_hamiltonian, py_sum
from .dynamics import LatticeState, bracket_flow, conserved_report, integrate, volterra_rhs
from .estimators import DirectSpectrum, LatticeIntegrator, ModifiedVolterraSolver, SpectralVolterraSolver
from .hankel import JacobiCoefficients, delcond_ratios, hankel_determinants, jacobi_from_moments
from .infinite import ZLatticeState, evolution_rhs_check, weyl_matrix
from .io import load_measure
from .jacobi import finite_spectral_measure, truncate, weyl_cf, weyl_stieltjes
from .measure import EvenMeasure, WeightSpec, evolve, moments, moments_at_time, normalize, szego_integral
from .modvolterra import lift, reduce, xcond_estimate
from .pipeline import SolveRequest, correspond, cross_validate, modified_solve, spectral_solve
from .szego import geronimus_map, map_to_circle, verblunsky

__version__ = "0.1.0"

__all__ = [
    "BlowUpError",
    "ConditioningError",
    "ConvergenceError",
    "DirectSpectrum",
    "EvenMeasure",
    "JacobiCoefficients",
    "LatticeIntegrator",
    "LatticeState",
    "ModifiedVolterraSolver",
    "NumericalError",
    "PoleError",
    "PositivityError",
    "PrecisionError",
    "SolveRequest",
    "SpectralVolterraSolver",
    "TruncationError",
    "ValidationError",
    "VslError",
    "WeightSpec",
    "ZLatticeState",
    "bracket_flow",
    "conserved_report",
    "correspond",
    "cross_validate",
    "delcond_ratios",
    "diagnose",
    "evolution_rhs_check",
    "evolve",
    "finite_spectral_measure",
    "geronimus_map",
    "hankel_determinants",
    "hundertmark_simon_check",
    "integrate",
    "jacobi_from_moments",
    "lift",
    "load_measure",
    "log_hamiltonian",
    "map_to_circle",
    "modified_solve",
    "moments",
    "moments_at_time",
    "normalize",
    "py_sum",
    "reduce",
    "spectral_solve",
    "szego_integral",
    "truncate",
    "verblunsky",
    "volterra_rhs",
    "weyl_cf",
    "weyl_matrix",
    "weyl_stieltjes",
    "xcond_estimate",
]
