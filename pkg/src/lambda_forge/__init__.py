"""Perturbed L-functions: planting zeros off the critical axis and removing them again.

Set LAMBDA_FORGE_NO_NUMBA=1 before import to run the pure-numpy kernels.
"""
__version__ = "0.1.0"

from ._accel import USE_NUMBA
from .complexfn import (
    DirichletCharacter,
    EvalParams,
    FunctionalEquation,
    QFactor,
    dirichlet_l,
    fe_residual,
    gamma,
    hurwitz_zeta,
    lambda_eval,
    loggamma,
    zeta,
)
from .dirichletfit import AdmissibleCompact, DirichletPolynomial, fit, halfplane_deviation
from .interpolation import DiscRegion, InterpolationSet, PlantedZeroSet, constrained_one_approximant
from .perturb import LFunctionHandle, build_nu, perturb, product_decomposition, restore
from .symmetry import Polynomial, four_fold, orbit
from .zeros import RectRegion, WeilPolynomial, critical_scan, weil_check, winding_count
