import math

import numpy as np
import pytest

from weakkam import (DiscountProblem, HamiltonianSpec, PeriodicGrid,
                     solve_max_solution)
from weakkam.atlas import build_atlas
from weakkam.measures import (MatherMeasure, MeasureError,
                              default_margin_constant, enumerate_cycle_measures,
                              mather_mean_action, selection_constant,
                              tight_subgraph, verify_condition_a)


@pytest.fixture(scope="module")
def tight1(atlas1):
    return tight_subgraph(atlas1)


def test_tight_subgraph_flat_potential_self_loops():
    g = PeriodicGrid(n=32)
    spec = HamiltonianSpec(kind="example2", grid=g,
                           potential_fn=lambda x: np.zeros_like(np.asarray(x, float)),
                           v_max=6.0)
    atlas = build_atlas(g, spec)
    tight = tight_subgraph(atlas)
    assert np.all(np.diagonal(tight))


def test_tight_subgraph_critical_self_loops(atlas1, tight1):
    g = atlas1.grid
    assert tight1[g.node_at(0.0), g.node_at(0.0)]
    assert tight1[atlas1.basepoints[1], atlas1.basepoints[1]] or \
        tight1[g.node_at(0.5), g.node_at(0.5)]


def test_tight_subgraph_no_cross_class_edges(atlas1, tight1):
    c0, c1 = atlas1.classes
    assert not tight1[np.ix_(c0, c1)].any()
    assert not tight1[np.ix_(c1, c0)].any()


def test_enumerate_single_node_class():
    g = PeriodicGrid(n=256)
    spec = HamiltonianSpec(kind="example1", grid=g)
    atlas = build_atlas(g, spec)
    tight = tight_subgraph(atlas)
    measures = enumerate_cycle_measures(atlas, tight, 0)
    diracs = [m for m in measures if len(m.cycle) == 1]
    assert any(m.cycle == (0,) for m in diracs)
    for m in measures:
        assert m.weights.sum() == pytest.approx(1.0, abs=1e-12)
        assert set(np.flatnonzero(m.weights)) <= set(int(v) for v in atlas.classes[0])


def test_enumerated_measures_mean_action(atlas1, tight1):
    for cid in range(len(atlas1.classes)):
        for m in enumerate_cycle_measures(atlas1, tight1, cid):
            val = mather_mean_action(m, atlas1.kernel)
            assert abs(val - (-atlas1.c0)) <= atlas1.tol.tight / atlas1.kernel.dt


def test_condition_a_pass_and_fail(atlas1, cos_a):
    rep = verify_condition_a(cos_a, atlas1.classes, 0)
    assert rep.passed
    assert rep.epsilon == pytest.approx(1.0, abs=0.01)
    rep_flip = verify_condition_a(-cos_a, atlas1.classes, 1)
    assert rep_flip.passed
    rep_bad = verify_condition_a(np.ones(atlas1.grid.n), atlas1.classes, 0)
    assert not rep_bad.passed
    assert len(rep_bad.offending) > 0


def test_condition_a_single_class_refused():
    g = PeriodicGrid(n=32)
    spec = HamiltonianSpec(kind="example2", grid=g,
                           potential_fn=lambda x: np.zeros_like(np.asarray(x, float)),
                           v_max=6.0)
    atlas = build_atlas(g, spec)
    rep = verify_condition_a(np.cos(2 * np.pi * g.positions), atlas.classes, 0)
    assert not rep.passed


def test_selection_constant_dirac_formula(atlas1, cos_a):
    n = atlas1.grid.n
    x0 = 0
    dirac = MatherMeasure.from_cycle([x0], n, 0)
    A = 1.0
    C = selection_constant([dirac], cos_a, A, atlas1.barrier, x0)
    assert C == pytest.approx(A / cos_a[x0], abs=1e-12)
    # homogeneity in a for Dirac measures
    C3 = selection_constant([dirac], 3.0 * cos_a, A, atlas1.barrier, x0)
    assert C3 == pytest.approx(C / 3.0, abs=1e-12)


def test_selection_constant_example1(atlas1, tight1, cos_a):
    measures = enumerate_cycle_measures(atlas1, tight1, 0)
    C = selection_constant(measures, cos_a, 1.0, atlas1.barrier, 0)
    assert C == pytest.approx(1.0, abs=1e-6)


def test_selection_constant_denominator_guard(atlas1):
    dirac = MatherMeasure.from_cycle([0], atlas1.grid.n, 0)
    with pytest.raises(MeasureError, match="condition"):
        selection_constant([dirac], -np.ones(atlas1.grid.n), 1.0,
                           atlas1.barrier, 0)


def test_closedness_surrogate(atlas1, tight1):
    g = atlas1.grid
    x = g.positions
    tests = [np.sin(2 * np.pi * x), np.cos(4 * np.pi * x), x * 0 + 1.0,
             np.exp(np.sin(2 * np.pi * x)), np.cos(2 * np.pi * x) ** 2]
    for cid in range(len(atlas1.classes)):
        for m in enumerate_cycle_measures(atlas1, tight1, cid):
            cyc = np.array(m.cycle)
            nxt = np.roll(cyc, -1)
            for f in tests:
                # sum the two orbit traversals separately so the identical
                # multisets cancel exactly in floating point
                assert math.fsum(f[nxt]) - math.fsum(f[cyc]) == 0.0


def test_selection_constant_basepoint_invariance(atlas1, cos_a):
    # h_inf[x0][.] + C(x0) is independent of the basepoint choice in class 0
    tight = tight_subgraph(atlas1)
    measures = enumerate_cycle_measures(atlas1, tight, 0)
    cl = atlas1.classes[0]
    x0, x0p = int(cl[0]), int(cl[-1])
    C = selection_constant(measures, cos_a, 1.0, atlas1.barrier, x0)
    Cp = selection_constant(measures, cos_a, 1.0, atlas1.barrier, x0p)
    lhs = atlas1.barrier[x0] + C
    rhs = atlas1.barrier[x0p] + Cp
    assert np.max(np.abs(lhs - rhs)) <= 10 * atlas1.tol.cls


def test_discrete_leqa_bound(atlas1, tight1, cos_a):
    # with the converged solution at the smallest lambda, every enumerated
    # measure satisfies sum mu * a * u <= A + 0.05
    g = atlas1.grid
    v0r = atlas1.elementary_solution(0)
    v0 = v0r - 0.5 * (v0r.max() + v0r.min())
    A = default_margin_constant(cos_a, v0)
    P = DiscountProblem(lam=1e-3, a=cos_a, A=A, reduced=atlas1.reduced,
                        dt=g.dx, grid=g)
    sol = solve_max_solution(P, v0)
    for cid in range(len(atlas1.classes)):
        for m in enumerate_cycle_measures(atlas1, tight1, cid):
            assert float(m.weights @ (cos_a * sol.u)) <= A + 0.05
