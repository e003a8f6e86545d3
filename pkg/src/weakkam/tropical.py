"""Min-plus (tropical) matrix algebra over the reduced action kernel.

Provides min-plus products and powers, Karp's minimum mean cycle, and an
all-pairs shortest-path closure with predecessor extraction.  Matrices are
dense numpy arrays with +inf for missing edges; -inf and NaN are rejected.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class TropicalError(ValueError):
    """Structural failure in a min-plus computation."""


def _validate(M, name="matrix"):
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise TropicalError(f"{name} must be square, got shape {M.shape}")
    if np.isnan(M).any():
        raise TropicalError(f"{name} contains NaN")
    if np.isneginf(M).any():
        raise TropicalError(f"{name} contains -inf")
    return M


def mp_identity(n):
    """Min-plus unit: 0 on the diagonal, +inf elsewhere."""
    I = np.full((n, n), np.inf)
    np.fill_diagonal(I, 0.0)
    return I


def mp_multiply(A, B):
    """C[i][j] = min_k A[i][k] + B[k][j], with +inf absorbing."""
    A = _validate(A, "left factor")
    B = _validate(B, "right factor")
    if A.shape != B.shape:
        raise TropicalError(f"order mismatch: {A.shape} vs {B.shape}")
    n = A.shape[0]
    C = np.full((n, n), np.inf)
    for k in range(n):
        np.minimum(C, A[:, k][:, None] + B[k, :][None, :], out=C)
    return C


def mp_power(K, m):
    """m-fold min-plus power by binary exponentiation."""
    K = _validate(K)
    if m < 1:
        raise TropicalError(f"power must be >= 1, got {m}")
    result = None
    base = K
    while m > 0:
        if m & 1:
            result = base.copy() if result is None else mp_multiply(result, base)
        m >>= 1
        if m > 0:
            base = mp_multiply(base, base)
    return result


def karp_min_mean_cycle(K):
    """Minimum mean cycle of a directed weighted graph (Karp's recurrence).

    Returns (mean, witness_cycle) where the witness is a node list of one
    minimizing simple cycle, recovered by backtracking the recurrence's
    parent pointers.  Requires at least one finite-cost cycle.
    """
    K = _validate(K)
    n = K.shape[0]
    D = np.full((n + 1, n), np.inf)
    parent = np.full((n + 1, n), -1, dtype=int)
    D[0] = 0.0
    for k in range(1, n + 1):
        M = D[k - 1][:, None] + K
        D[k] = M.min(axis=0)
        parent[k] = M.argmin(axis=0)
    finite = np.isfinite(D[n])
    if not finite.any():
        raise TropicalError("kernel not strongly cyclic: no finite cycle found")
    with np.errstate(invalid="ignore"):
        ratios = (D[n][None, :] - D[:n]) / (n - np.arange(n))[:, None]
    ratios = np.where(np.isfinite(D[:n]), ratios, -np.inf)
    per_node = ratios.max(axis=0)
    per_node = np.where(finite, per_node, np.inf)
    v_star = int(per_node.argmin())
    mean = float(per_node[v_star])
    # walk the n-step parent chain from v_star; any repeated node closes a
    # cycle lying on an optimal walk
    walk = [v_star]
    cur = v_star
    for k in range(n, 0, -1):
        cur = int(parent[k][cur])
        walk.append(cur)
    walk.reverse()  # now in forward (time-increasing) order
    seen = {}
    cycle = None
    for pos, node in enumerate(walk):
        if node in seen:
            cycle = walk[seen[node]:pos]
            break
        seen[node] = pos
    if cycle is None:  # cannot happen: walk has n+1 entries over n nodes
        raise TropicalError("failed to extract witness cycle")
    return mean, cycle


def cycle_mean(K, cycle):
    """Average edge cost of a node cycle in K."""
    K = np.asarray(K, dtype=float)
    m = len(cycle)
    total = sum(K[cycle[i], cycle[(i + 1) % m]] for i in range(m))
    return total / m


def reduce_kernel(kernel, c0):
    """Shift the action kernel by c0 * dt so min mean cycle cost is ~0."""
    return kernel.cost + c0 * kernel.dt


@dataclass(frozen=True)
class ShortestPathTable:
    """All-pairs shortest paths over a reduced kernel.

    D[i][j] is the minimal total cost over paths with >= 0 edges (so the
    diagonal is 0); Dplus requires >= 1 edge.  pred[i][j] is the predecessor
    of j on a minimal i->j path, first_hop[i][j] the first intermediate node
    of a minimal >= 1 edge path.
    """

    D: np.ndarray
    Dplus: np.ndarray
    pred: np.ndarray
    first_hop: np.ndarray

    def path(self, i, j):
        """Node list of a minimal i -> j path (None if unreachable)."""
        if i == j:
            return [i]
        if self.pred[i, j] < 0:
            return None
        nodes = [j]
        cur = j
        while cur != i:
            cur = int(self.pred[i, cur])
            nodes.append(cur)
            if len(nodes) > self.D.shape[0] + 1:
                raise TropicalError("predecessor chain does not terminate")
        nodes.reverse()
        return nodes


def all_pairs_shortest(Kt, tol_neg=1e-7, verify=True):
    """Floyd-Warshall closure of the reduced kernel.

    Requires the minimum mean cycle of Kt to be >= -tol_neg; small negative
    diagonal residue from floating-point reduction is clamped to zero.
    """
    Kt = _validate(Kt, "reduced kernel")
    n = Kt.shape[0]
    if verify:
        mean, _ = karp_min_mean_cycle(Kt)
        if mean < -tol_neg:
            raise TropicalError(
                f"c0 underestimates critical value: min mean cycle {mean} < -{tol_neg}"
            )
    D = Kt.copy()
    pred = np.where(np.isfinite(Kt), np.arange(n)[:, None], -1).astype(int)
    np.fill_diagonal(D, 0.0)
    np.fill_diagonal(pred, np.arange(n))
    for k in range(n):
        via = D[:, k][:, None] + D[k, :][None, :]
        better = via < D
        D = np.where(better, via, D)
        pred = np.where(better, pred[k][None, :], pred)
    diag = np.diagonal(D).copy()
    bad = diag < -tol_neg
    if bad.any():
        raise TropicalError(
            f"c0 underestimates critical value: D[i][i] down to {diag.min()}"
        )
    D = D.copy()
    np.fill_diagonal(D, np.maximum(diag, 0.0))
    # Dplus = Kt (x) D with first-hop argmin broken to the smallest index
    Dplus = np.full((n, n), np.inf)
    first_hop = np.full((n, n), -1, dtype=int)
    for k in range(n):
        cand = Kt[:, k][:, None] + D[k, :][None, :]
        better = cand < Dplus
        Dplus = np.where(better, cand, Dplus)
        first_hop = np.where(better, k, first_hop)
    dplus_diag = np.diagonal(Dplus).copy()
    if np.isfinite(dplus_diag).any() and dplus_diag[np.isfinite(dplus_diag)].min() < -tol_neg:
        raise TropicalError("c0 underestimates critical value: negative closed path")
    Dplus = Dplus.copy()
    clamped = np.where(np.isfinite(dplus_diag), np.maximum(dplus_diag, 0.0), dplus_diag)
    np.fill_diagonal(Dplus, clamped)
    D.setflags(write=False)
    Dplus.setflags(write=False)
    pred.setflags(write=False)
    first_hop.setflags(write=False)
    return ShortestPathTable(D=D, Dplus=Dplus, pred=pred, first_hop=first_hop)
