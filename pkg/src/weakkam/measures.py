"""Discrete Mather measures, the sign condition on a, and the selection constant.

Mather measures are occupation measures of zero-reduced-cost simple cycles in
the tight subgraph over the Aubry set.  The selection constant C is the
minimum of a linear-fractional functional over those measures within the
selected class; extreme points of the closed-measure polytope are cycle
measures, so enumerating simple cycles suffices.
"""

from __future__ import annotations

from dataclasses import dataclass

import networkx as nx
import numpy as np


class MeasureError(ValueError):
    """Failure while enumerating or evaluating Mather measures."""


@dataclass(frozen=True)
class MatherMeasure:
    """Occupation measure of one simple cycle.

    weights is a full node-indexed vector, mass 1/len(cycle) per cycle node.
    """

    cycle: tuple
    weights: np.ndarray
    class_id: int

    @classmethod
    def from_cycle(cls, cycle, n, class_id):
        w = np.zeros(n)
        for node in cycle:
            w[node] += 1.0 / len(cycle)
        w.setflags(write=False)
        return cls(cycle=tuple(int(v) for v in cycle), weights=w, class_id=class_id)


def tight_subgraph(atlas):
    """Edges (y, x) within the Aubry set lying on a near-zero-cost cycle.

    Edge test: reduced one-step cost plus the cheapest return path is at most
    tol_tight.  Returns a boolean n x n adjacency mask.
    """
    n = atlas.grid.n
    mask = np.zeros((n, n), dtype=bool)
    A = atlas.aubry
    if len(A) == 0:
        return mask
    sub = atlas.reduced[np.ix_(A, A)] + atlas.paths.D[np.ix_(A, A)].T
    hit = sub <= atlas.tol.tight
    mask[np.ix_(A, A)] = hit
    return mask


def enumerate_cycle_measures(atlas, tight, class_id, cap=10000):
    """All simple cycles in one class's tight subgraph, as cycle measures."""
    if not (0 <= class_id < len(atlas.classes)):
        raise MeasureError(f"class index {class_id} out of range")
    nodes = atlas.classes[class_id]
    if len(nodes) == 0:
        raise MeasureError(f"class {class_id} is empty")
    G = nx.DiGraph()
    G.add_nodes_from(int(v) for v in nodes)
    sub = tight[np.ix_(nodes, nodes)]
    ys, xs = np.nonzero(sub)
    for y, x in zip(ys, xs):
        G.add_edge(int(nodes[y]), int(nodes[x]))
    measures = []
    for cycle in nx.simple_cycles(G):
        measures.append(MatherMeasure.from_cycle(cycle, atlas.grid.n, class_id))
        if len(measures) > cap:
            raise MeasureError(
                "cycle explosion; raise tol separation or refine grid"
            )
    return measures


@dataclass(frozen=True)
class ConditionReport:
    """Result of checking the sign condition on a over the class partition."""

    passed: bool
    epsilon: float
    offending: tuple  # (node, a value) pairs violating the sign pattern

    def __bool__(self):
        return self.passed


def verify_condition_a(a, classes, i0):
    """Check a > 0 on class i0 and a < 0 on every other class.

    epsilon is the realized margin min(min_{i0} a, min_{other} -a); the
    report lists every Aubry node on the wrong side of zero for its class.
    """
    a = np.asarray(a, dtype=float)
    if not (0 <= i0 < len(classes)):
        raise MeasureError(f"selected class {i0} out of range (have {len(classes)})")
    offending = []
    margins = []
    for i, cl in enumerate(classes):
        vals = a[cl]
        if i == i0:
            margins.append(float(vals.min()))
            for node, v in zip(cl, vals):
                if v <= 0.0:
                    offending.append((int(node), float(v)))
        else:
            margins.append(float(-vals.max()))
            for node, v in zip(cl, vals):
                if v >= 0.0:
                    offending.append((int(node), float(v)))
    epsilon = min(margins) if margins else 0.0
    passed = len(offending) == 0 and epsilon > 0.0 and len(classes) >= 2
    if len(classes) < 2:
        # a single class cannot carry the required sign change
        passed = False
    return ConditionReport(passed=passed, epsilon=epsilon, offending=tuple(offending))


def selection_constant(measures, a, A, barrier, x0):
    """C = min over measures of (sum mu * a * h_inf[., x0] + A) / (sum mu * a).

    The minimum over cycle measures equals the infimum over the measure
    polytope because the objective is linear-fractional with positive
    denominator.
    """
    if not measures:
        raise MeasureError("no Mather measures enumerated in the selected class")
    a = np.asarray(a, dtype=float)
    best = np.inf
    for mu in measures:
        denom = float(mu.weights @ a)
        if denom <= 0.0:
            raise MeasureError(
                f"condition (a) violated on support: sum mu*a = {denom}"
            )
        numer = float(mu.weights @ (a * barrier[:, x0])) + A
        best = min(best, numer / denom)
    return best


def mather_mean_action(measure, kernel):
    """Cycle-average raw action per unit time."""
    cyc = measure.cycle
    m = len(cyc)
    total = sum(kernel.cost[cyc[i], cyc[(i + 1) % m]] for i in range(m))
    return total / (m * kernel.dt)


def default_margin_constant(a, v0, margin=1.0):
    """A = ||a||_inf * ||v0||_inf + margin."""
    return float(np.max(np.abs(a)) * np.max(np.abs(v0)) + margin)
