"""Spectral-theory workbench.

Closed-form spectra of classical domains, finite-difference operators with
independent eigensolvers, Weyl-law and Polya/Li-Yau checks, variational
principles, reaction-diffusion and thin-film stability studies, and the
spectral calculus of the reflectionless ``-2 sech^2`` well.
"""

from spectra_lab.errors import (
    ConvergenceError,
    DomainError,
    InconsistentVerdict,
    ShootingError,
    SpectraError,
    TruncationError,
)

__version__ = "0.1.0"

__all__ = [
    "ConvergenceError",
    "DomainError",
    "InconsistentVerdict",
    "ShootingError",
    "SpectraError",
    "TruncationError",
    "__version__",
]
