"""Periodic grid, Hamiltonian presets, and the one-step action kernel.

The configuration space is a circle of given circumference discretized by n
equispaced nodes.  A Hamiltonian preset supplies H(x, p) and its Legendre dual
L(x, v); the action kernel tabulates the one-step minimal action
dt * L(midpoint, displacement/dt) over the reachable stencil.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * math.pi


class ConfigurationError(ValueError):
    """A structural parameter violates its admissible range."""


@dataclass(frozen=True)
class PeriodicGrid:
    """Uniform discretization of a circle.

    Nodes are indexed 0..n-1 at positions i * dx with dx = circumference / n.
    """

    n: int
    circumference: float = 1.0

    def __post_init__(self):
        if self.n < 4:
            raise ConfigurationError(f"grid needs n >= 4, got n = {self.n}")
        if not (self.circumference > 0.0 and math.isfinite(self.circumference)):
            raise ConfigurationError(
                f"circumference must be positive and finite, got {self.circumference}"
            )

    @property
    def dx(self):
        return self.circumference / self.n

    @property
    def positions(self):
        return np.arange(self.n) * self.dx

    def position(self, i):
        return (i % self.n) * self.dx

    def displacement(self, i, j):
        """Signed geodesic offset from node i to node j.

        Lies in (-circumference/2, circumference/2]; the antipodal tie takes
        the positive sign.
        """
        c = self.circumference
        d = (self.position(j) - self.position(i)) % c
        if d > c / 2.0:
            d -= c
        return d

    def node_at(self, x):
        """Index of the grid node nearest to position x (periodic)."""
        return int(round(x / self.dx)) % self.n


def _vectorize(fn):
    """Return fn if it already maps arrays to arrays, else a vectorized wrapper."""
    if fn is None:
        return None
    try:
        out = fn(np.zeros(3))
        if np.shape(out) == (3,):
            return fn
    except Exception:
        pass
    return np.vectorize(fn, otypes=[float])


def _default_potential_example1(circumference):
    w = TWO_PI / circumference
    return (lambda x: 0.5 * (1.0 - np.cos(w * np.asarray(x, dtype=float))),
            lambda x: 0.5 * w * np.sin(w * np.asarray(x, dtype=float)))


def _default_potential_example2(circumference):
    w = TWO_PI / circumference
    return lambda x: np.sin(w * np.asarray(x, dtype=float)) ** 2


@dataclass
class HamiltonianSpec:
    """A Hamiltonian/Lagrangian pair on a periodic grid.

    kind 'example1' is H(x, p) = p * (p - U'(x)) with L(x, v) = (v + U'(x))^2 / 4.
    kind 'example2' is H(x, p) = p^2 - U(x) with L(x, v) = v^2 / 4 + U(x),
    U >= 0 with min U = 0.  kind 'custom' supplies L directly.
    """

    kind: str
    grid: PeriodicGrid
    potential: np.ndarray = None          # per-node samples of U
    potential_fn: object = None           # vectorized closed-form U, optional
    dpotential: np.ndarray = None         # per-node samples of U' (example1)
    dpotential_fn: object = None
    lagrangian_fn: object = None          # custom L(x, v), vectorized in x
    v_max: float = None
    p_max: float = None

    def __post_init__(self):
        if self.kind not in ("example1", "example2", "custom"):
            raise ConfigurationError(f"unknown Hamiltonian kind {self.kind!r}")
        g = self.grid
        if self.kind == "example1":
            if self.potential_fn is None and self.potential is None:
                ufn, dufn = _default_potential_example1(g.circumference)
                self.potential_fn, self.dpotential_fn = ufn, dufn
            self.potential_fn = _vectorize(self.potential_fn)
            self.dpotential_fn = _vectorize(self.dpotential_fn)
            if self.dpotential_fn is None and self.dpotential is None:
                raise ConfigurationError("example1 needs U' samples or evaluator")
            if self.potential is None:
                self.potential = np.asarray(self.potential_fn(g.positions), dtype=float)
            if self.dpotential is None:
                self.dpotential = np.asarray(self.dpotential_fn(g.positions), dtype=float)
            if self.v_max is None:
                self.v_max = 4.0 * (1.0 + float(np.max(np.abs(self.dpotential))))
        elif self.kind == "example2":
            if self.potential_fn is None and self.potential is None:
                self.potential_fn = _default_potential_example2(g.circumference)
            self.potential_fn = _vectorize(self.potential_fn)
            if self.potential is None:
                self.potential = np.asarray(self.potential_fn(g.positions), dtype=float)
            self.potential = np.asarray(self.potential, dtype=float)
            if np.min(self.potential) < -1e-12:
                raise ConfigurationError("example2 requires U >= 0")
            if self.v_max is None:
                self.v_max = 4.0 * (1.0 + float(np.max(np.sqrt(np.maximum(self.potential, 0.0)))))
        else:
            if self.lagrangian_fn is None:
                raise ConfigurationError("custom kind requires a Lagrangian evaluator")
            raw = self.lagrangian_fn
            try:
                out = raw(np.zeros(3), 0.0)
                vector_ok = np.shape(out) == (3,)
            except Exception:
                vector_ok = False
            if not vector_ok:
                self.lagrangian_fn = np.vectorize(raw, otypes=[float])
            if self.v_max is None:
                raise ConfigurationError("custom kind requires an explicit v_max")
            if self.potential is None:
                self.potential = np.zeros(g.n)
        if not (self.v_max > 0):
            raise ConfigurationError(f"v_max must be positive, got {self.v_max}")
        if self.p_max is None:
            self.p_max = 8.0 * (1.0 + self.v_max)
        if not (self.p_max > 0):
            raise ConfigurationError(f"p_max must be positive, got {self.p_max}")
        if self.kind == "custom":
            self._check_convexity()
        else:
            self._check_legendre_pair()

    # -- evaluators ---------------------------------------------------------

    def potential_at(self, x):
        """U evaluated at arbitrary positions (closed form when available)."""
        if self.potential_fn is not None:
            return np.asarray(self.potential_fn(x), dtype=float)
        # fall back to periodic linear interpolation of the samples
        g = self.grid
        xs = np.asarray(x, dtype=float) % g.circumference
        xp = np.append(g.positions, g.circumference)
        fp = np.append(self.potential, self.potential[0])
        return np.interp(xs, xp, fp)

    def dpotential_at(self, x):
        if self.dpotential_fn is not None:
            return np.asarray(self.dpotential_fn(x), dtype=float)
        g = self.grid
        xs = np.asarray(x, dtype=float) % g.circumference
        xp = np.append(g.positions, g.circumference)
        fp = np.append(self.dpotential, self.dpotential[0])
        return np.interp(xs, xp, fp)

    def lagrangian(self, x, v):
        """L(x, v), vectorized over x (v scalar or broadcastable)."""
        if self.kind == "example1":
            return (np.asarray(v, dtype=float) + self.dpotential_at(x)) ** 2 / 4.0
        if self.kind == "example2":
            return np.asarray(v, dtype=float) ** 2 / 4.0 + self.potential_at(x)
        return np.asarray(self.lagrangian_fn(np.asarray(x, dtype=float), v), dtype=float)

    def hamiltonian(self, x, p):
        """H(x, p) for preset kinds."""
        if self.kind == "example1":
            return np.asarray(p, dtype=float) * (np.asarray(p, dtype=float) - self.dpotential_at(x))
        if self.kind == "example2":
            return np.asarray(p, dtype=float) ** 2 - self.potential_at(x)
        raise ConfigurationError("custom kind has no Hamiltonian evaluator")

    # -- construction checks ------------------------------------------------

    def _check_legendre_pair(self):
        xs = self.grid.positions[:: max(1, self.grid.n // 4)][:4]
        vs = np.linspace(-self.v_max, self.v_max, 5)
        for x in xs:
            for v in vs:
                closed = float(self.lagrangian(x, v))
                numeric = legendre_numeric(self, x, v)
                if abs(closed - numeric) > 1e-3:
                    raise ConfigurationError(
                        f"Legendre pair mismatch at x={x}, v={v}: "
                        f"closed {closed} vs numeric {numeric}"
                    )

    def _check_convexity(self):
        vs = np.linspace(-self.v_max, self.v_max, 33)
        xs = self.grid.positions[:: max(1, self.grid.n // 8)]
        for x in xs:
            vals = np.array([float(self.lagrangian(x, v)) for v in vs])
            second = vals[:-2] - 2.0 * vals[1:-1] + vals[2:]
            if np.min(second) < -1e-9:
                raise ConfigurationError(
                    f"custom Lagrangian not convex in v near x={x}"
                )


def legendre_numeric(spec, x, v, samples=2049):
    """sup_p (p*v - H(x,p)) over p in [-p_max, p_max] on a uniform grid.

    The top three samples are refined by parabolic interpolation, which is
    exact for Hamiltonians quadratic in p.  A maximizer on the boundary of
    the momentum window means the window is too small.
    """
    ps = np.linspace(-spec.p_max, spec.p_max, samples)
    vals = ps * v - spec.hamiltonian(x, ps)
    k = int(np.argmax(vals))
    if k == 0 or k == samples - 1:
        raise ConfigurationError(
            "momentum window too small: Legendre maximizer at |p| = p_max"
        )
    y0, y1, y2 = vals[k - 1], vals[k], vals[k + 1]
    denom = y0 - 2.0 * y1 + y2
    if denom < 0.0:
        # vertex of the interpolating parabola through the top three samples
        refined = y1 - (y2 - y0) ** 2 / (8.0 * denom)
        return float(max(y1, refined))
    return float(y1)


def legendre_transform(spec, x, v):
    """L(x, v) via the closed form for presets, the evaluator for custom."""
    if abs(v) > spec.v_max:
        raise ConfigurationError(f"|v| = {abs(v)} exceeds v_max = {spec.v_max}")
    return float(spec.lagrangian(x, v))


@dataclass(frozen=True)
class ActionKernel:
    """One-step minimal action table.

    cost[y][x] = dt * L(midpoint(y,x), displacement(y,x)/dt) when the hop is
    within the velocity bound, +inf otherwise.  Immutable after construction.
    """

    grid: PeriodicGrid
    spec: HamiltonianSpec
    dt: float
    cost: np.ndarray
    reach: np.ndarray
    halfwidth: int

    def __post_init__(self):
        self.cost.setflags(write=False)
        self.reach.setflags(write=False)


def build_action_kernel(grid, spec, dt):
    """Tabulate the one-step action over the reachable stencil.

    The stencil half-width is w = floor(v_max * dt / dx).  Requires
    2*dx <= v_max*dt (at least two nodes each side) and
    v_max*dt <= circumference/2 (unambiguous geodesic displacement).
    """
    if not (dt > 0.0 and math.isfinite(dt)):
        raise ConfigurationError(f"dt must be positive, got {dt}")
    reach_len = spec.v_max * dt
    if reach_len < 2.0 * grid.dx:
        raise ConfigurationError(
            f"stencil too narrow: v_max*dt = {reach_len} < 2*dx = {2 * grid.dx}"
        )
    if reach_len > grid.circumference / 2.0:
        raise ConfigurationError(
            f"stencil too wide: v_max*dt = {reach_len} > "
            f"circumference/2 = {grid.circumference / 2.0}"
        )
    n = grid.n
    w = int(math.floor(reach_len / grid.dx))
    cost = np.full((n, n), np.inf)
    idx = np.arange(n)
    pos = grid.positions
    # offset 0: rest at the node itself
    cost[idx, idx] = dt * spec.lagrangian(pos, 0.0)
    for k in range(1, w + 1):
        v = k * grid.dx / dt
        mid = (pos + 0.5 * k * grid.dx) % grid.circumference
        fwd = dt * spec.lagrangian(mid, v)
        bwd = dt * spec.lagrangian(mid, -v)
        tgt = (idx + k) % n
        # both directions share the same midpoint samples, so kernels of
        # velocity-even Lagrangians come out exactly symmetric
        cost[idx, tgt] = fwd
        cost[tgt, idx] = bwd
    reach = np.isfinite(cost)
    return ActionKernel(grid=grid, spec=spec, dt=dt, cost=cost, reach=reach, halfwidth=w)
