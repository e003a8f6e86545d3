import numpy as np
import pytest

from weakkam import (HamiltonianSpec, PeriodicGrid, TropicalError,
                     all_pairs_shortest, build_action_kernel,
                     karp_min_mean_cycle, mp_identity, mp_multiply, mp_power,
                     reduce_kernel)
from weakkam.oracles import brute_min_mean_cycle, random_cyclic_matrix
from weakkam.tropical import cycle_mean

INF = np.inf


def test_mp_multiply_unit_law():
    rng = np.random.default_rng(1)
    A = random_cyclic_matrix(rng, 5)
    I = mp_identity(5)
    assert np.array_equal(mp_multiply(A, I), A)
    assert np.array_equal(mp_multiply(I, A), A)


def test_mp_multiply_hand_example():
    A = np.array([[0.0, 1.0], [INF, 0.0]])
    B = np.array([[0.0, INF], [2.0, 0.0]])
    C = mp_multiply(A, B)
    assert np.array_equal(C, np.array([[0.0, 1.0], [2.0, 0.0]]))


def test_mp_multiply_identity_squared():
    I = mp_identity(4)
    assert np.array_equal(mp_multiply(I, I), I)


def test_mp_multiply_rejects_bad_entries():
    with pytest.raises(TropicalError):
        mp_multiply(np.array([[0.0, -INF], [0.0, 0.0]]), mp_identity(2))
    with pytest.raises(TropicalError):
        mp_multiply(np.full((2, 3), 0.0), np.full((3, 3), 0.0))


def test_mp_laws_random_exact():
    rng = np.random.default_rng(7)
    for _ in range(100):
        A = random_cyclic_matrix(rng, 5)
        B = random_cyclic_matrix(rng, 5)
        C = random_cyclic_matrix(rng, 5)
        assert np.array_equal(mp_multiply(mp_multiply(A, B), C),
                              mp_multiply(A, mp_multiply(B, C)))


def test_mp_power_basics():
    rng = np.random.default_rng(3)
    K = random_cyclic_matrix(rng, 5)
    assert np.array_equal(mp_power(K, 1), K)
    assert np.array_equal(mp_power(K, 2), mp_multiply(K, K))
    assert np.array_equal(mp_power(K, 5),
                          mp_multiply(mp_power(K, 3), mp_power(K, 2)))


def test_mp_power_cycle_graph():
    K = np.full((3, 3), INF)
    K[0, 1] = K[1, 2] = K[2, 0] = 1.0
    P3 = mp_power(K, 3)
    assert np.array_equal(np.diagonal(P3), np.full(3, 3.0))


def test_karp_all_zero_self_loops():
    K = np.full((4, 4), INF)
    np.fill_diagonal(K, 0.0)
    mean, cycle = karp_min_mean_cycle(K)
    assert mean == 0.0
    assert cycle_mean(K, cycle) == 0.0


def test_karp_hand_example():
    K = np.full((3, 3), INF)
    K[0, 1] = 1.0
    K[1, 0] = 1.0
    K[2, 2] = 5.0
    mean, cycle = karp_min_mean_cycle(K)
    assert mean == 1.0
    assert sorted(cycle) == [0, 1]


def test_karp_no_cycle_error():
    K = np.full((3, 3), INF)
    K[0, 1] = 1.0
    K[1, 2] = 1.0
    with pytest.raises(TropicalError, match="cyclic"):
        karp_min_mean_cycle(K)


def test_karp_vs_brute_force_exact():
    rng = np.random.default_rng(0)
    for _ in range(120):
        n = int(rng.integers(2, 7))
        K = random_cyclic_matrix(rng, n)
        mean, cycle = karp_min_mean_cycle(K)
        assert mean == brute_min_mean_cycle(K)
        assert cycle_mean(K, cycle) == mean


def test_reduce_kernel_identity_at_zero():
    g = PeriodicGrid(n=16)
    spec = HamiltonianSpec(kind="example2", grid=g, v_max=6.0)
    K = build_action_kernel(g, spec, g.dx)
    assert np.array_equal(reduce_kernel(K, 0.0), K.cost)


def test_reduce_kernel_recenters_mean():
    g = PeriodicGrid(n=16)
    spec = HamiltonianSpec(kind="example1", grid=g, v_max=6.0)
    K = build_action_kernel(g, spec, g.dx)
    mean, _ = karp_min_mean_cycle(K.cost)
    c0 = -mean / K.dt
    Kt = reduce_kernel(K, c0)
    mean2, _ = karp_min_mean_cycle(Kt)
    assert abs(mean2) <= 1e-9


def test_reduce_kernel_flat_potential_diag_zero():
    g = PeriodicGrid(n=16)
    spec = HamiltonianSpec(kind="example2", grid=g,
                           potential_fn=lambda x: np.zeros_like(np.asarray(x, float)),
                           v_max=6.0)
    K = build_action_kernel(g, spec, g.dx)
    mean, _ = karp_min_mean_cycle(K.cost)
    assert mean == 0.0
    Kt = reduce_kernel(K, -mean / K.dt)
    assert np.all(np.diagonal(Kt) == 0.0)


def test_apsp_unit_matrix():
    # diagonal entries of the edge matrix are genuine self-loop edges, so
    # the one-or-more-edge table keeps them: Dplus = I (x) D = I
    I = mp_identity(3)
    T = all_pairs_shortest(I, verify=False)
    assert np.array_equal(T.D, I)
    assert np.array_equal(T.Dplus, I)


def test_apsp_no_self_loops_infinite_dplus_diag():
    K = np.full((3, 3), INF)
    K[0, 1] = 1.0
    K[1, 2] = 1.0
    T = all_pairs_shortest(K, verify=False)
    assert np.all(np.isinf(np.diagonal(T.Dplus)))


def test_apsp_two_node_cycle():
    K = np.full((2, 2), INF)
    K[0, 1] = 0.0
    K[1, 0] = 0.0
    T = all_pairs_shortest(K, verify=False)
    assert T.Dplus[0, 0] == 0.0  # closed path 0 -> 1 -> 0
    assert T.path(0, 1) == [0, 1]


def test_apsp_triangle_inequality_and_predecessors():
    rng = np.random.default_rng(11)
    K = random_cyclic_matrix(rng, 8)
    T = all_pairs_shortest(K)
    n = 8
    D = T.D
    for i in range(n):
        for j in range(n):
            assert np.all(D[i, j] <= D[i, :] + D[:, j] + 1e-12)
            p = T.path(i, j)
            if p is None:
                assert not np.isfinite(D[i, j])
                continue
            cost = sum(K[p[k], p[k + 1]] for k in range(len(p) - 1))
            assert cost == pytest.approx(D[i, j], abs=1e-12)


def test_apsp_negative_cycle_error():
    K = np.full((2, 2), INF)
    K[0, 1] = -1.0
    K[1, 0] = 0.0
    with pytest.raises(TropicalError, match="critical value"):
        all_pairs_shortest(K)
