"""Gaussian scale mixtures and their best L2 normal approximations."""

from .approx1d import Approx1DResult, distance_at, objective_derivative, scaling_check, solve_t0
from .approxnd import (
    ApproxNDResult,
    congruence_check,
    distance_nd,
    l2_membership_nd,
    matrix_resolvent,
    solve_t0_nd,
    solve_t0_scalar_nd,
)
from .density import (
    GsmDensity,
    characteristic,
    density,
    gaussian_moment_integrals,
    l2_membership,
    log_density_convexity_check,
)
from .estimator import BestNormalApproximation
from .exceptions import (
    BadBracket,
    BadMeasure,
    Divergent,
    DomainError,
    GsmError,
    McAccuracy,
    NoConvergence,
    NonConvergent,
    NonFinite,
    NotL2,
    NotPD,
    Unsupported,
)
from .matrix_mixing import DiscreteMatrix, InverseWishart, MixingMeasureND, ScalarMatrix
from .mixing import (
    Discrete,
    Exponential,
    GenericDensity,
    InverseGamma,
    KolmogorovSmirnov,
    MixingMeasure1D,
    Uniform,
    point_mass,
)
from .numerics import McSpec, QuadratureSpec, RootBracket

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
