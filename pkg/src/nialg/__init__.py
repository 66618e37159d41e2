"""nialg: exact computer algebra for varieties of nonassociative algebras."""

from .magma import ONE_OP, POLARIZED, MonomialTable, OpSpec, Signature
from .variety import Context, VarietyPresentation

__version__ = "0.1.0"

__all__ = [
    "Context",
    "MonomialTable",
    "ONE_OP",
    "OpSpec",
    "POLARIZED",
    "Signature",
    "VarietyPresentation",
    "__version__",
]
