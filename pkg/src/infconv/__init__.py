"""Numerical toolkit for infimum convolution with quadratic cost on Gaussian space.

Grid transforms (Moreau envelope, Legendre and polar transforms, functional
Steiner symmetrization), Gaussian quadrature, Hermite expansions, the class
F(C, eps), and a harness that turns the related inequalities into reports.
"""
from __future__ import annotations

from ._backend import NAME as BACKEND
from .errors import (ClassMembershipError, ConfigError, GridInvariantError, HypothesisViolation,
                     InfconvError, ParityError, UsageError)
from .families import FunctionFamily, parse_family
from .gauss import expect_closed, expect_grid, gauss_hermite_rule
from .grid import GridFunction, GridSpec, default_grid, even_defect, make_grid, sample
from .suite import default_config, run_suite
from .transforms import (H, inf_conv_quadratic, legendre, moreau, polar, symmetrize,
                         symmetrize_partial)
from .verify import VerificationReport

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "ClassMembershipError", "ConfigError", "FunctionFamily", "GridFunction",
    "GridInvariantError", "GridSpec", "H", "HypothesisViolation", "InfconvError", "ParityError",
    "UsageError", "VerificationReport", "default_config", "default_grid", "even_defect",
    "expect_closed", "expect_grid", "gauss_hermite_rule", "inf_conv_quadratic", "legendre",
    "make_grid", "moreau", "parse_family", "polar", "run_suite", "sample", "symmetrize",
    "symmetrize_partial",
]
