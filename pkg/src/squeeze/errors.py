"""Exception hierarchy shared across the package.

The CLI maps these onto process exit codes: configuration and input
problems exit 2, numerical solver failures exit 3, certificate
failures exit 4.
"""

from __future__ import annotations


class SqueezeError(Exception):
    """Base class for all package errors."""


class ConfigError(SqueezeError):
    """Invalid configuration, flags, or input file contents."""


class DomainError(ConfigError):
    """Invalid domain geometry (overlaps, degenerate pieces, bad JSON)."""


class SolverError(SqueezeError):
    """A numerical routine failed to produce an accepted result."""


class ResidualError(SolverError):
    """Boundary residual above the acceptance tolerance."""


class IllConditionedError(SolverError):
    """System condition estimate over threshold or crowded geometry."""


class NoWitnessError(SolverError):
    """No admissible witness subdomain found for a loop estimate."""


class TopologyError(SolverError):
    """Level-set topology could not be resolved on the grid."""


class CertificateError(SqueezeError):
    """A certified bound check failed."""
