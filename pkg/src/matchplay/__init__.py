"""Matchplay tournaments with fixed pairwise win probabilities.

Exact and simulated win vectors, executable symmetry / honesty / fairness /
futility checks, and the polytope of win vectors spanned by digraph corners.
"""

from .core import (
    P_STAR,
    DistinctnessError,
    DoublyMonotonicWitness,
    MatchMatrix,
    MatrixError,
    Permutation,
    TournamentMap,
    WinVector,
    buff_to,
    epsilon_of,
    is_doubly_monotonic,
    is_strictly_doubly_monotonic,
    nerf_to,
    permute_matrix,
    validate_match_matrix,
)
from .engine import (
    Block,
    Chance,
    EvalReport,
    Match,
    Round,
    RoundsTournament,
    SimReport,
    Tournament,
    Winner,
    conditional_pair,
    exact_rounds_win_vector,
    exact_win_vector,
    induced_map,
    mixture,
    sequentialize,
    simulate,
)
from .lp import LinearProgram, LPResult, lp_solve

__all__ = [
    "P_STAR", "DistinctnessError", "DoublyMonotonicWitness", "MatchMatrix", "MatrixError",
    "Permutation", "TournamentMap", "WinVector", "buff_to", "epsilon_of", "is_doubly_monotonic",
    "is_strictly_doubly_monotonic", "nerf_to", "permute_matrix", "validate_match_matrix", "Block",
    "Chance", "EvalReport", "Match", "Round", "RoundsTournament", "SimReport", "Tournament",
    "Winner", "conditional_pair", "exact_rounds_win_vector", "exact_win_vector", "induced_map",
    "mixture", "sequentialize", "simulate", "LinearProgram", "LPResult", "lp_solve",
]

__version__ = "0.1.0"
