"""
Vavilov-Cherenkov emission by plane-wave and twisted (Bessel) electrons.

Evolved electron-photon states in the helicity and Bessel-mode bases,
photon polarization observables, the equivalent-photon variant and a
three-scalar toy model used as a structural oracle.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ConvergenceError,
    DomainError,
    KinematicallyForbidden,
    NoCherenkovEmission,
    OutsideOverlap,
    VCTwistError,
)
from .kinematics import ALPHA, M_E, MediumModel, cherenkov_angle, cherenkov_cos_angle  # noqa: E402

__all__ = [
    "__version__",
    "ALPHA",
    "M_E",
    "MediumModel",
    "cherenkov_angle",
    "cherenkov_cos_angle",
    "ConvergenceError",
    "DomainError",
    "KinematicallyForbidden",
    "NoCherenkovEmission",
    "OutsideOverlap",
    "VCTwistError",
]
