"""Agent-driven evolutionary molecular design.

Molecules are edited through a small valence-checked toolbox by an agent
(a scripted policy offline, or a remote chat model), and the edits drive a
Pareto genetic algorithm (:class:`ParetoGA`) or MAP-Elites islands
(:class:`IslandMapElites`).
"""

from .evolve import IncompleteSeedingError, ParetoGA, SeedShortfallError
from .metrics import ButinaClustering, evaluate_run, hypervolume
from .molgraph import Molecule, parse_smiles
from .objectives import Evaluator, RemoteAffinityOracle, SurrogateAffinityOracle
from .qd import IslandMapElites

__version__ = "0.1.0"

__all__ = [
    "ButinaClustering",
    "Evaluator",
    "IncompleteSeedingError",
    "IslandMapElites",
    "Molecule",
    "ParetoGA",
    "RemoteAffinityOracle",
    "SeedShortfallError",
    "SurrogateAffinityOracle",
    "evaluate_run",
    "hypervolume",
    "parse_smiles",
]
