"""Maximal solution of the sign-varying discounted Bellman equation.

The one-step operator resolves the discount implicitly at the arrival node:

    u'(x) = (min_y (u(y) + Kt[y][x]) + dt*A*lambda) / (1 + lambda*dt*a(x)),

which is unconditionally stable for lambda*dt*||a||_inf < 1 and monotone.
Iterating from a discrete subsolution climbs to the maximal fixed point, but
the asymptotic contraction rate is only ~lambda*dt per sweep, far too slow at
small lambda.  The solver therefore alternates short bursts of plain value
iteration with frozen-policy dyadic advances: for the current greedy policy
the m-step update is affine, u -> G*u(pi) + c, and pointer doubling composes
it for m = 2^j in O(n log m).  For proper policies (every policy cycle
contracting) the doubled map converges to the exact policy value; transient
policies with expanding cycles are advanced only while iterates stay inside a
safety bound, after which the min in the one-step operator discards the
overshoot.  Convergence is certified only by the one-step residual.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np


class SolverError(RuntimeError):
    """Discounted iteration failed to converge."""

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


@dataclass(frozen=True)
class DiscountProblem:
    """One instance of the discounted equation on the reduced kernel."""

    lam: float
    a: np.ndarray
    A: float
    reduced: np.ndarray   # Kt[y][x], reduced one-step action
    dt: float
    grid: object

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        object.__setattr__(self, "a", a)
        if not (self.lam > 0.0):
            raise ValueError(f"discount rate must be positive, got {self.lam}")
        if self.lam * self.dt * np.max(np.abs(a)) >= 1.0:
            raise ValueError(
                "lambda*dt*||a||_inf must be < 1 for a positive denominator"
            )

    def check_margin(self, v0):
        """Require A > ||a||_inf * ||v0||_inf (exact monotone start)."""
        bound = float(np.max(np.abs(self.a)) * np.max(np.abs(v0)))
        if not (self.A > bound):
            raise ValueError(
                f"A = {self.A} must exceed ||a||_inf*||v0||_inf = {bound}"
            )


@dataclass
class DiscountSolution:
    """Converged fixed point with its certificate and backpointers."""

    u: np.ndarray
    residual: float
    iterations: int
    backpointer: np.ndarray
    lam: float


def discounted_bellman_step(u, P):
    """One implicit-discount Bellman sweep.

    Returns (u_new, backpointer); the argmin over predecessors is broken to
    the smallest node index.
    """
    tot = np.asarray(u, dtype=float)[:, None] + P.reduced
    m = tot.min(axis=0)
    bp = tot.argmin(axis=0)
    u_new = (m + P.dt * P.A * P.lam) / (1.0 + P.lam * P.dt * P.a)
    return u_new, bp


def _policy_affine(P, sigma):
    """One-step affine map of the frozen policy: u -> g*u[sigma] + c."""
    n = P.reduced.shape[0]
    g = 1.0 / (1.0 + P.lam * P.dt * P.a)
    edge = P.reduced[sigma, np.arange(n)]
    c = g * (edge + P.dt * P.A * P.lam)
    return sigma.copy(), g.copy(), c


def _dyadic_advance(u, P, sigma, bound, max_doublings=60):
    """Largest dyadic frozen-policy advance keeping iterates within bound.

    Pointer doubling squares the affine map (pi, G, C); the candidate after
    2^j steps is G*u[pi] + C.  Returns the last candidate whose sup norm does
    not exceed bound (or the one-step image if even that is out of bounds).
    """
    pi, G, C = _policy_affine(P, sigma)
    best = G * u[pi] + C
    if np.max(np.abs(best)) > bound:
        return best  # caller's next plain sweeps will trim the overshoot
    for _ in range(max_doublings):
        Gmax = np.max(G)
        if not np.isfinite(Gmax) or Gmax > 1e100:
            break
        G2 = G * G[pi]
        C2 = G * C[pi] + C
        pi2 = pi[pi]
        cand = G2 * u[pi2] + C2
        if not np.all(np.isfinite(cand)) or np.max(np.abs(cand)) > bound:
            break
        if np.max(np.abs(cand - best)) == 0.0:
            best = cand
            break
        pi, G, C, best = pi2, G2, C2, cand
    return best


def solve_max_solution(P, v0, tol_fix=1e-10, max_iters=200000, subsol_tol=None,
                       accelerate=True, enforce_margin=True, bound=None):
    """Iterate the discounted Bellman operator from a subsolution to its
    fixed point.

    v0 must satisfy v0(x) <= min_y (v0(y) + Kt[y][x]) + subsol_tol.  With
    A > ||a||_inf*||v0||_inf the plain iterates are pointwise nondecreasing;
    accelerated advances may locally overshoot on expanding policy cycles but
    the result is accepted only when the one-step residual is at most
    tol_fix, which certifies the fixed point regardless of the route taken.
    """
    v0 = np.asarray(v0, dtype=float)
    n = v0.shape[0]
    if subsol_tol is None:
        subsol_tol = 10.0 * (P.grid.dx + P.dt)
    one_step = (v0[:, None] + P.reduced).min(axis=0)
    defect = float(np.max(v0 - one_step))
    if defect > subsol_tol:
        raise ValueError(
            f"v0 is not a discrete subsolution: defect {defect} > {subsol_tol}"
        )
    if enforce_margin:
        P.check_margin(v0)
        monotone = True
    else:
        monotone = P.A > float(np.max(np.abs(P.a)) * np.max(np.abs(v0)))
    if bound is None:
        bound = float(np.max(np.abs(v0)) + 100.0 * (1.0 + abs(P.A)))

    u = v0.copy()
    iters = 0
    accelerated = False
    burst = 20
    while iters < max_iters:
        for _ in range(burst):
            u_new, bp = discounted_bellman_step(u, P)
            iters += 1
            if monotone and not accelerated:
                assert np.min(u_new - u) >= -1e-12, "monotone iteration violated"
            res = float(np.max(np.abs(u_new - u)))
            u = u_new
            if res <= tol_fix:
                u_fin, bp_fin = discounted_bellman_step(u, P)
                res_fin = float(np.max(np.abs(u_fin - u)))
                return DiscountSolution(u=u_fin, residual=res_fin,
                                        iterations=iters + 1,
                                        backpointer=bp_fin, lam=P.lam)
        if accelerate:
            u = _dyadic_advance(u, P, bp, bound)
            accelerated = True
            iters += 1
    u_new, _ = discounted_bellman_step(u, P)
    raise SolverError(
        f"no convergence after {iters} iterations "
        f"(last residual {float(np.max(np.abs(u_new - u)))}); "
        "lambda may be too small for this dt",
        residual=float(np.max(np.abs(u_new - u))), iterations=iters,
    )


@dataclass(frozen=True)
class OrbitOccupation:
    """Backpointer orbit of a converged solution with occupation measures.

    window_measure averages the trailing half of the orbit; the discounted
    measure weights step j by exp(-lam*dt*sum of a over the first j nodes)
    and normalizes.
    """

    orbit: np.ndarray
    window_measure: np.ndarray
    discounted_measure: np.ndarray


def calibrated_orbit(solution, P, z, steps):
    """Follow backpointers from z and build its occupation measures."""
    if steps < 1:
        raise ValueError("orbit needs at least one step")
    n = P.reduced.shape[0]
    bp = solution.backpointer
    orbit = np.empty(steps + 1, dtype=int)
    orbit[0] = z
    for j in range(steps):
        orbit[j + 1] = bp[orbit[j]]
    window = orbit[(steps + 1) // 2:]
    wm = np.bincount(window, minlength=n).astype(float)
    wm /= wm.sum()
    prefix = np.concatenate(([0.0], np.cumsum(P.a[orbit[:-1]])))
    weights = np.exp(-P.lam * P.dt * prefix)
    dm = np.bincount(orbit, weights=weights, minlength=n)
    dm /= dm.sum()
    wm.setflags(write=False)
    dm.setflags(write=False)
    return OrbitOccupation(orbit=orbit, window_measure=wm, discounted_measure=dm)


def lambda_sweep(reduced, dt, grid, a, A, schedule, v0, target, tol_fix=1e-10,
                 max_iters=200000, workers=1):
    """Solve the discounted problem along a decreasing lambda schedule.

    Returns a list of dicts (lambda, sup_error, residual, iterations,
    solution) in schedule order.  sup_error compares u_lambda with the
    predicted vanishing-discount limit.
    """
    schedule = [float(l) for l in schedule]
    if any(b >= a_ for a_, b in zip(schedule, schedule[1:])):
        raise ValueError("lambda schedule must be strictly decreasing")
    target = np.asarray(target, dtype=float)

    def solve_one(lam):
        P = DiscountProblem(lam=lam, a=a, A=A, reduced=reduced, dt=dt, grid=grid)
        sol = solve_max_solution(P, v0, tol_fix=tol_fix, max_iters=max_iters)
        return {
            "lambda": lam,
            "sup_error": float(np.max(np.abs(sol.u - target))),
            "residual": sol.residual,
            "iterations": sol.iterations,
            "solution": sol,
        }

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(solve_one, schedule))
    else:
        rows = [solve_one(lam) for lam in schedule]
    return rows
