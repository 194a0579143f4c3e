"""Tensor decision diagrams with XP-operator edge maps."""

from .dd import DDManager, LimTDDHandle
from .dense import DenseTensor
from .xp import LimWeight, XPOperator

__all__ = ["DDManager", "LimTDDHandle", "DenseTensor", "LimWeight",
           "XPOperator"]
__version__ = "0.1.0"
