"""Exception types shared across the package."""


class VCTwistError(Exception):
    """Base class for all package errors."""


class DomainError(VCTwistError, ValueError):
    """An argument lies outside the domain of an operation."""


class NoCherenkovEmission(DomainError):
    """The Cherenkov condition fails (cos of the emission angle outside (0, 1))."""

    def __init__(self, message, value=None):
        super().__init__(message)
        self.value = value


class OutsideOverlap(DomainError):
    """A photon polar angle falls outside the twisted-electron cone overlap."""


class KinematicallyForbidden(DomainError):
    """Requested final-state kinematics are not reachable."""


class ConvergenceError(VCTwistError, RuntimeError):
    """A numerical procedure did not reach its tolerance within its budget."""
