"""Fair simulation for Büchi tree automata and probabilistic Büchi word automata."""

from .game import ParityGame, even_wins_simulation, solve_parity
from .lattice import MU, NU, Equation, EquationalSystem, solve
from .matrixsim import (
    ApproxSequences,
    MatrixWitness,
    accepting_closure,
    search_sequences,
    verify_matrix_fair_sim,
)
from .nbta import Nbta, check_fair_simulation, largest_fair_simulation
from .pbwa import Pbwa, acceptance_vector, cylinder_prob, nodiv

__all__ = [
    "ApproxSequences",
    "Equation",
    "EquationalSystem",
    "MU",
    "MatrixWitness",
    "NU",
    "Nbta",
    "ParityGame",
    "Pbwa",
    "acceptance_vector",
    "accepting_closure",
    "check_fair_simulation",
    "cylinder_prob",
    "even_wins_simulation",
    "largest_fair_simulation",
    "nodiv",
    "search_sequences",
    "solve",
    "solve_parity",
    "verify_matrix_fair_sim",
]
