"""Exceptional zeros of Pellarin L-series, B_N polynomials and Bernoulli-Carlitz numbers."""

from .gfq import FieldSpec, FqElement, field_construct, field_from_q, enumerate_monic

__all__ = ["FieldSpec", "FqElement", "field_construct", "field_from_q", "enumerate_monic"]
__version__ = "0.1.0"
