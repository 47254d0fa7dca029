"""Exact finite-field computations for divided power algebras over the Com and Lie operads."""

from .errors import DivPowerError
from .field import FieldSpec

__all__ = ["DivPowerError", "FieldSpec"]
__version__ = "0.1.0"
