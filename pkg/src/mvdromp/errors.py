"""Exception hierarchy shared across the package."""

import numpy as np


class MvdrOmpError(Exception):
    """Base class for all package errors."""


class DomainError(MvdrOmpError, ValueError):
    """An argument lies outside the domain of the operation."""


class ContractViolation(MvdrOmpError, ValueError):
    """An input breaks a structural precondition (e.g. Hermitian symmetry)."""


class ConfigurationError(MvdrOmpError, ValueError):
    """Invalid grid, schedule, scenario or config file content."""


class CapacityError(MvdrOmpError, ValueError):
    """A combinatorial search would exceed its size guard."""


class DegenerateBasisError(MvdrOmpError, np.linalg.LinAlgError):
    """Selected atoms are (numerically) linearly dependent."""
