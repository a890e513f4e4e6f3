"""Zeta-regularized weighted traces of banded operators on the circle, the cocycles
built from them, and the left-invariant geometry of loop groups."""

from .lie_core import LieAlgebraData, LoopElement, ad_operator, killing_inner, loop_bracket, su2, symplectic_form
from .mode_ops import BlockBandOperator, DiagonalWeight, compose, commutator, mode_settings
from .reg_traces import RegularizedValue, residue, weighted_trace
from .symbol_calc import ClassicalSymbol1D

__all__ = [
    "BlockBandOperator", "ClassicalSymbol1D", "DiagonalWeight", "LieAlgebraData", "LoopElement",
    "RegularizedValue", "ad_operator", "commutator", "compose", "killing_inner", "loop_bracket",
    "mode_settings", "residue", "su2", "symplectic_form", "weighted_trace",
]
