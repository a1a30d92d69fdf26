"""Exact Wick-contraction algebra for the two-scalar, MSR and Dirac models."""

from .functional import Functional, Term, canonicalize
from .models import Kind, Model
from .products import (anti_time_ordered_product, make_generator, make_monomial, pointwise_product,
                       star_product, time_ordered_product, unit, vacuum_expectation)

__all__ = [
    "Functional", "Term", "canonicalize", "Kind", "Model", "anti_time_ordered_product",
    "make_generator", "make_monomial", "pointwise_product", "star_product",
    "time_ordered_product", "unit", "vacuum_expectation",
]
