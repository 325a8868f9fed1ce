"""Moment-matching order reduction of bilinear systems over regular word selections."""

from .automata import Ndfa, chain_automaton, co_reachable, max_uniform_depth, switching_automaton
from .dynamics import fliess_truncated, iterated_integrals, simulate
from .errors import BilinredError
from .reduction import (reach_space_auto, reduce_by_observability, reduce_by_reachability,
                        unobs_space_auto, verify_partial_realization)
from .signals import PiecewiseSignal, consistent_input, parse_expression
from .system import BilinearSystem, series_coefficient, word_matrix

__version__ = "0.1.0"

__all__ = [
    "BilinearSystem", "BilinredError", "Ndfa", "PiecewiseSignal", "chain_automaton",
    "co_reachable", "consistent_input", "fliess_truncated", "iterated_integrals",
    "max_uniform_depth", "parse_expression", "reach_space_auto", "reduce_by_observability",
    "reduce_by_reachability", "series_coefficient", "simulate", "switching_automaton",
    "unobs_space_auto", "verify_partial_realization", "word_matrix",
]
