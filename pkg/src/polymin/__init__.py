"""Polynomial optimization via tightened moment relaxations.

The pipeline: synthesize multiplier expressions for the constraint tuple
(:mod:`polymin.lme`), append the induced critical-point conditions to the
moment relaxation (:mod:`polymin.moments`), solve the semidefinite program
(:mod:`polymin.sdp`), then certify and extract minimizers
(:mod:`polymin.certify`). :mod:`polymin.cli` wires these into a command
line tool and :mod:`polymin.benchmarks` carries the reference problems.
"""

from .lme import ConstraintTuple, Problem
from .poly import Polynomial, PolyMatrix, Tms, variables

__version__ = "0.1.0"

__all__ = [
    "ConstraintTuple",
    "Polynomial",
    "PolyMatrix",
    "Problem",
    "Tms",
    "variables",
    "__version__",
]
