"""Placement delivery arrays and private coded distributed computing."""

from .construct import (
    build_regular_pda,
    construct_one,
    construct_two,
    decompose_extended,
    extend_pda,
    row_pda,
)
from .loads import (
    LoadPoint,
    compare_theorems,
    optimal_nonprivate_load,
    pda_nonprivate_load,
    theorem1_loads,
    theorem2_point,
    theorem3_point,
    tradeoff_sweep,
)
from .pda import (
    STAR,
    ExtendedPdaMeta,
    Pda,
    delete_columns,
    multiplicity_profile,
    regularity,
    shift_integers,
    transpose,
    validate_pda,
)
from .sim import SimConfig, oracle_compute, run_simulation

__all__ = [
    "STAR", "Pda", "ExtendedPdaMeta", "validate_pda", "regularity", "multiplicity_profile", "shift_integers",
    "transpose", "delete_columns",
    "build_regular_pda", "row_pda", "extend_pda", "decompose_extended", "construct_one", "construct_two",
    "LoadPoint", "optimal_nonprivate_load", "pda_nonprivate_load", "theorem1_loads", "theorem2_point",
    "theorem3_point", "compare_theorems", "tradeoff_sweep",
    "SimConfig", "run_simulation", "oracle_compute",
]
