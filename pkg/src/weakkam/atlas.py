"""Critical value, Peierls barrier, Aubry set, and static classes.

The atlas bundles everything derived from the reduced shortest-path closure:
the critical value c0, the Aubry node set (near-zero-cost closed paths), its
partition into static classes, the Peierls barrier table, and the elementary
solution attached to each class.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import ActionKernel, ConfigurationError, build_action_kernel
from .tropical import (ShortestPathTable, all_pairs_shortest,
                       karp_min_mean_cycle, reduce_kernel)


class AtlasError(ValueError):
    """Structural failure while assembling the atlas."""


@dataclass(frozen=True)
class Tolerances:
    """Discretization tolerances for the Aubry/class structure.

    aubry bounds the closed-path cost below which a node counts as Aubry,
    cls separates static classes, fixed bounds the Bellman defect of
    elementary solutions, tight selects minimizing-cycle edges.
    """

    aubry: float
    cls: float
    fixed: float
    tight: float = None
    neg: float = 1e-7

    def __post_init__(self):
        if self.tight is None:
            object.__setattr__(self, "tight", self.aubry)

    @classmethod
    def for_grid(cls, grid, dt):
        # The self-loop cost of a smooth Lagrangian with a nondegenerate
        # minimum scales like dt * dx^2 near the minimizing node and is
        # larger by a factor >= 4 one node away, so a dx^2 * dt window
        # isolates the Aubry nodes at every resolution.
        aubry = 100.0 * grid.dx ** 2 * dt
        return cls(aubry=aubry, cls=20.0 * (grid.dx + dt), fixed=10.0 * (grid.dx + dt))


@dataclass(frozen=True)
class WeakKamAtlas:
    """Weak KAM structure of one discretized Hamiltonian."""

    grid: object
    spec: object
    kernel: ActionKernel
    c0: float
    reduced: np.ndarray          # cost + c0 * dt
    paths: ShortestPathTable
    aubry: np.ndarray            # sorted node indices
    classes: tuple               # tuple of sorted node-index arrays
    basepoints: tuple            # smallest node index per class
    barrier: np.ndarray          # h_inf[y][x]
    lipschitz_kappa: float
    tol: Tolerances

    def class_of(self, node):
        """Index of the static class containing a node (None if not Aubry)."""
        for i, cl in enumerate(self.classes):
            if node in cl:
                return i
        return None

    def elementary_solution(self, i):
        """u(x) = h_inf[x_i][x] for the class-i basepoint x_i."""
        if not (0 <= i < len(self.classes)):
            raise AtlasError(f"class index {i} out of range (have {len(self.classes)})")
        return self.barrier[self.basepoints[i]].copy()


def critical_value(kernel):
    """c0 = -(minimum mean cycle of the raw kernel) / dt."""
    mean, _ = karp_min_mean_cycle(kernel.cost)
    return -mean / kernel.dt


def aubry_nodes(paths, tol_aubry):
    """Nodes whose cheapest >= 1 edge closed path costs at most tol_aubry."""
    diag = np.diagonal(paths.Dplus)
    return np.flatnonzero(np.isfinite(diag) & (diag <= tol_aubry))


def peierls_barrier(D, aubry):
    """h_inf[x][y] = min over Aubry nodes z of D[x][z] + D[z][y].

    Routing through the Aubry set realizes the large-time limit of the
    minimal action on the reduced graph: optimal long paths park on a
    zero-cost cycle, which exists exactly at Aubry nodes.
    """
    if len(aubry) == 0:
        raise AtlasError("no Aubry nodes at tolerance (raise tol_aubry)")
    via = D[:, aubry][:, :, None] + D[aubry, :][None, :, :]
    return via.min(axis=1)


def static_classes(aubry, barrier, tol_class):
    """Partition Aubry nodes by vanishing symmetrized barrier.

    Joins x, y when h_inf[x][y] + h_inf[y][x] <= tol_class; returns
    (classes, basepoints) with classes sorted by their smallest node index.
    """
    nodes = list(aubry)
    parent = {x: x for x in nodes}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for ai, x in enumerate(nodes):
        for y in nodes[ai + 1:]:
            if barrier[x, y] + barrier[y, x] <= tol_class:
                rx, ry = find(x), find(y)
                if rx != ry:
                    parent[max(rx, ry)] = min(rx, ry)
    groups = {}
    for x in nodes:
        groups.setdefault(find(x), []).append(x)
    classes = sorted((sorted(g) for g in groups.values()), key=lambda g: g[0])
    basepoints = tuple(g[0] for g in classes)
    return tuple(np.array(g, dtype=int) for g in classes), basepoints


def barrier_lipschitz(barrier, grid):
    """Largest nearest-neighbor slope of the barrier in either argument."""
    d0 = np.abs(barrier - np.roll(barrier, -1, axis=0))
    d1 = np.abs(barrier - np.roll(barrier, -1, axis=1))
    return float(max(d0.max(), d1.max()) / grid.dx)


def build_atlas(grid, spec, dt=None, tol=None, kernel=None):
    """Assemble the full weak KAM atlas for one Hamiltonian.

    dt defaults to dx; tolerances default to Tolerances.for_grid.
    """
    if dt is None:
        dt = grid.dx
    if kernel is None:
        kernel = build_action_kernel(grid, spec, dt)
    if tol is None:
        tol = Tolerances.for_grid(grid, dt)
    c0 = critical_value(kernel)
    reduced = reduce_kernel(kernel, c0)
    paths = all_pairs_shortest(reduced, tol_neg=tol.neg)
    aubry = aubry_nodes(paths, tol.aubry)
    barrier = peierls_barrier(paths.D, aubry)
    classes, basepoints = static_classes(aubry, barrier, tol.cls)
    kappa = barrier_lipschitz(barrier, grid)
    reduced = reduced.copy()
    barrier = barrier.copy()
    reduced.setflags(write=False)
    barrier.setflags(write=False)
    aubry.setflags(write=False)
    return WeakKamAtlas(
        grid=grid, spec=spec, kernel=kernel, c0=c0, reduced=reduced,
        paths=paths, aubry=aubry, classes=classes, basepoints=basepoints,
        barrier=barrier, lipschitz_kappa=kappa, tol=tol,
    )
