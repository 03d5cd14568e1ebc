"""Pointwise algebra of MA-positivity for vector-bundle Monge-Ampere curvature."""

from .errors import CapacityError, InputError, InvariantViolation, PreconditionError
from .forms import (Curvature, EndForm, commutator_identity_check, curvature_power,
                    vbma_residual, wedge)

__version__ = "0.1.0"

__all__ = [
    "CapacityError", "Curvature", "EndForm", "InputError", "InvariantViolation",
    "PreconditionError", "commutator_identity_check", "curvature_power",
    "vbma_residual", "wedge",
]
