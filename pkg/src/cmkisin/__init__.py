"""Exact computations with mod-p Kisin modules of CM p-divisible groups."""

from .algebra import INF, FieldSpec, PrecisionExhausted, TruncSeries, make_field
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "INF", "FieldSpec", "PrecisionExhausted", "TruncSeries", "make_field"]
