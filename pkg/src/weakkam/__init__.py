"""Semi-discrete weak KAM toolkit.

Computes critical values, Peierls barriers, Aubry sets, static classes, and
Mather measures for convex Hamiltonians on a periodic grid, and solves the
sign-varying discounted equation whose maximal solution selects a particular
critical solution as the discount vanishes.
"""

from .atlas import (Tolerances, WeakKamAtlas, aubry_nodes, barrier_lipschitz,
                    build_atlas, critical_value, peierls_barrier, static_classes)
from .discount import (DiscountProblem, DiscountSolution, OrbitOccupation,
                       SolverError, calibrated_orbit, discounted_bellman_step,
                       lambda_sweep, solve_max_solution)
from .grid import (ActionKernel, ConfigurationError, HamiltonianSpec,
                   PeriodicGrid, build_action_kernel, legendre_numeric,
                   legendre_transform)
from .measures import (ConditionReport, MatherMeasure, enumerate_cycle_measures,
                       mather_mean_action, selection_constant, tight_subgraph,
                       verify_condition_a)
from .tropical import (ShortestPathTable, TropicalError, all_pairs_shortest,
                       karp_min_mean_cycle, mp_identity, mp_multiply, mp_power,
                       reduce_kernel)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
