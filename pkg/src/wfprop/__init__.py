"""Dominator-based approximation of well-founded justification and domination.

Ground normal logic programs, completion nogoods, unfounded-set propagation,
support flowgraphs with dominator trees, a brute-force oracle, a small
backtracking solver and reachability domain-consistency checks.
"""

from .flowgraph import build_flowgraph, compute_dominators, dominator_consequences, dominator_propagate
from .program import Program, build_program, classify, parse_program
from .propagation import Assignment, F, T, completion_nogoods, unit_propagate
from .solver import SolverConfig, SolverStats, propagate_fixpoint, solve
from .unfounded import forward_loop, greatest_unfounded_subset

__all__ = [
    "Assignment", "F", "Program", "SolverConfig", "SolverStats", "T", "build_flowgraph", "build_program",
    "classify", "completion_nogoods", "compute_dominators", "dominator_consequences", "dominator_propagate",
    "forward_loop", "greatest_unfounded_subset", "parse_program", "propagate_fixpoint", "solve", "unit_propagate",
]
__version__ = "0.1.0"
