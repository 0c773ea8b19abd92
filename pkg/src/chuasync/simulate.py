"""Network, error-dynamics and comparison-system integration with fixed-step RK4."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from ._accel import jit
from .coupling import KIND_CUSTOM, SectorCoupling, tilde_k
from .errors import DegenerateWindow, DimensionMismatch, NonFiniteState, ValidationError
from .model import ChuaParams, chua_nonlinearity
from .topology import Topology, non_pivot_nodes, residual_coefficients

DIVERGENCE_GUARD = 1e12


@jit
def coupling_kernel(kind, cp, d):
    if kind == 0:
        return cp[0] * d
    elif kind == 1:
        return cp[0] * d + np.arctan(d)
    return cp[0] * np.minimum(np.maximum(d, -cp[1]), cp[1])


@jit
def network_rhs_kernel(X, adj, alpha, beta, gamma, a, b, kind, cp):
    x1 = X[:, 0]
    x2 = X[:, 1]
    x3 = X[:, 2]
    d = x1[:, None] - x1[None, :]
    u = -(adj * coupling_kernel(kind, cp, d)).sum(axis=1)
    f = b * x1 + 0.5 * (a - b) * (np.abs(x1 + 1.0) - np.abs(x1 - 1.0))
    out = np.empty_like(X)
    out[:, 0] = alpha * (-x1 + x2 - f) + u
    out[:, 1] = x1 - x2 + x3
    out[:, 2] = -beta * x2 - gamma * x3
    return out


@jit
def rk4_network_kernel(X0, adj, alpha, beta, gamma, a, b, kind, cp, dt, n_steps, stride, guard):
    """Integrate the coupled network; returns ``(saved_states, failed_step)`` with ``failed_step == -1`` on success."""
    n_saved = n_steps // stride + 1
    out = np.empty((n_saved, X0.shape[0], 3))
    out[0] = X0
    X = X0.copy()
    h2 = 0.5 * dt
    h6 = dt / 6.0
    for s in range(1, n_steps + 1):
        k1 = network_rhs_kernel(X, adj, alpha, beta, gamma, a, b, kind, cp)
        k2 = network_rhs_kernel(X + h2 * k1, adj, alpha, beta, gamma, a, b, kind, cp)
        k3 = network_rhs_kernel(X + h2 * k2, adj, alpha, beta, gamma, a, b, kind, cp)
        k4 = network_rhs_kernel(X + dt * k3, adj, alpha, beta, gamma, a, b, kind, cp)
        X = X + h6 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        # negated comparison also trips on NaN
        if not np.abs(X).max() <= guard:
            return out[: (s - 1) // stride + 1], s
        if s % stride == 0:
            out[s // stride] = X
    return out, -1


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Saved states on a uniform grid; ``dt`` is the integration step."""

    times: np.ndarray
    states: np.ndarray
    dt: float

    @property
    def stride(self) -> int:
        if self.times.size < 2:
            return 1
        return int(round((self.times[1] - self.times[0]) / self.dt))


@dataclass(frozen=True, eq=False)
class ErrorSeries:
    times: np.ndarray
    norms: np.ndarray  # (samples, n-1)
    nodes: np.ndarray
    pivot: int

    @property
    def envelope(self) -> np.ndarray:
        return self.norms.max(axis=1) if self.norms.shape[1] else np.zeros(self.times.size)


def _steps(dt, t_end, stride):
    if not (dt > 0 and t_end >= dt):
        raise ValidationError(f"need dt > 0 and t_end >= dt, got dt={dt}, t_end={t_end}")
    n_steps = int(round(t_end / dt))
    if abs(n_steps * dt - t_end) > 1e-9 * max(1.0, t_end):
        raise ValidationError(f"t_end={t_end} is not a multiple of dt={dt}")
    if stride < 1 or n_steps % stride:
        raise ValidationError(f"stride {stride} must divide the step count {n_steps}")
    return n_steps


def integrate(rhs: Callable, initial, dt, t_end, stride=1, guard=DIVERGENCE_GUARD) -> Trajectory:
    """Classical RK4 with fixed step for an autonomous field ``rhs(state) -> derivative``."""
    n_steps = _steps(dt, t_end, stride)
    x = np.array(initial, dtype=float)
    out = np.empty((n_steps // stride + 1,) + x.shape)
    out[0] = x
    for s in range(1, n_steps + 1):
        k1 = rhs(x)
        k2 = rhs(x + 0.5 * dt * k1)
        k3 = rhs(x + 0.5 * dt * k2)
        k4 = rhs(x + dt * k3)
        x = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.abs(x).max(initial=0.0) <= guard:
            raise NonFiniteState(f"state left |x| <= {guard:g} at t = {s * dt:g}", time=s * dt)
        if s % stride == 0:
            out[s // stride] = x
    return Trajectory(np.arange(out.shape[0]) * (stride * dt), out, float(dt))


def _check_states(s, t):
    s = np.asarray(s, dtype=float)
    if s.shape != (t.n, 3):
        raise DimensionMismatch(f"expected states of shape ({t.n}, 3), got {s.shape}")
    return s


def network_rhs(s, p: ChuaParams, t: Topology, c: SectorCoupling) -> np.ndarray:
    """Coupled network field; node ``i`` receives ``-sum_j adj[i, j] k(x1_i - x1_j)`` on its first coordinate."""
    s = _check_states(s, t)
    x1, x2, x3 = s.T
    u = -(t.adjacency * c(x1[:, None] - x1[None, :])).sum(axis=1)
    out = np.empty_like(s)
    out[:, 0] = p.alpha * (-x1 + x2 - chua_nonlinearity(x1, p)) + u
    out[:, 1] = x1 - x2 + x3
    out[:, 2] = -p.beta * x2 - p.gamma * x3
    return out


def initial_states(n, seed=0, spread=1.0, identical=False):
    """Fixed-seed uniform initial states on ``[-spread, spread]^3`` per node."""
    rng = np.random.default_rng(seed)
    if identical:
        return np.tile(rng.uniform(-spread, spread, 3), (n, 1))
    return rng.uniform(-spread, spread, (n, 3))


def simulate_network(p, t, c, initial, dt=1e-3, t_end=10.0, stride=1, guard=DIVERGENCE_GUARD,
                     compiled=True) -> Trajectory:
    """Integrate the coupled network from ``initial`` (shape ``(n, 3)``).

    Built-in couplings go through the compiled kernel unless ``compiled`` is
    False; custom couplings always use the generic integrator.
    """
    x0 = _check_states(initial, t).copy()
    kind, cp = c.kernel_args()
    if not compiled or kind == KIND_CUSTOM:
        return integrate(lambda x: network_rhs(x, p, t, c), x0, dt, t_end, stride, guard)
    n_steps = _steps(dt, t_end, stride)
    adj = t.adjacency.astype(float)
    out, failed = rk4_network_kernel(x0, adj, p.alpha, p.beta, p.gamma, p.a, p.b, kind, cp,
                                     float(dt), n_steps, int(stride), float(guard))
    if failed >= 0:
        raise NonFiniteState(f"state left |x| <= {guard:g} at t = {failed * dt:g}", time=failed * dt)
    return Trajectory(np.arange(out.shape[0]) * (stride * dt), out, float(dt))


def _embed(errors, t, pivot):
    idx = non_pivot_nodes(t, pivot)
    errors = np.asarray(errors, dtype=float)
    if errors.shape != (idx.size, 3):
        raise DimensionMismatch(f"expected errors of shape ({idx.size}, 3), got {errors.shape}")
    full = np.zeros((t.n, 3))
    full[idx] = errors
    return full, idx


def error_rhs(errors, z1, p: ChuaParams, t: Topology, c: SectorCoupling, pivot=0) -> np.ndarray:
    """Synchronization error field relative to ``pivot``.

    ``errors[r] = (e, eta_1, eta_2)`` for the r-th non-pivot node; ``z1`` is the
    pivot's first coordinate.
    """
    full, idx = _embed(errors, t, pivot)
    e = full[:, 0]
    adj = t.adjacency
    f_tilde = chua_nonlinearity(z1 + e, p) - chua_nonlinearity(z1, p)
    coupling = (adj * c(e[:, None] - e[None, :])).sum(axis=1) - (adj[pivot][None, :] * c(-e)[None, :]).sum(axis=1)
    out = np.empty_like(full)
    out[:, 0] = -p.alpha * e - p.alpha * f_tilde + p.alpha * full[:, 1] - coupling
    out[:, 1] = e - full[:, 1] + full[:, 2]
    out[:, 2] = -p.beta * full[:, 1] - p.gamma * full[:, 2]
    return out[idx]


def error_rhs_residual_form(errors, z1, p, t, c, pivot=0) -> np.ndarray:
    """Same field as ``error_rhs``, with the first row regrouped around ``k2``, ``k~`` and residual coefficients."""
    full, idx = _embed(errors, t, pivot)
    e = full[:, 0]
    adj = t.adjacency
    deg = adj.sum(axis=1)
    resid = residual_coefficients(t, pivot).values
    f_tilde = chua_nonlinearity(z1 + e, p) - chua_nonlinearity(z1, p)
    diff = e[:, None] - e[None, :]
    inner = adj * (tilde_k(c, diff) + tilde_k(c, e)[None, :]) + resid * c(e)[None, :]
    out = np.empty_like(full)
    out[:, 0] = (-p.alpha * e - deg * c.k2 * e - p.alpha * f_tilde + p.alpha * full[:, 1]
                 - inner.sum(axis=1))
    out[:, 1] = e - full[:, 1] + full[:, 2]
    out[:, 2] = -p.beta * full[:, 1] - p.gamma * full[:, 2]
    return out[idx]


def error_series(traj: Trajectory, pivot=0) -> ErrorSeries:
    n = traj.states.shape[1]
    if not 0 <= pivot < n:
        from .errors import IndexOutOfRange
        raise IndexOutOfRange(f"pivot {pivot} out of range for n={n}")
    idx = np.array([i for i in range(n) if i != pivot], dtype=np.int64)
    diff = traj.states[:, idx, :] - traj.states[:, pivot:pivot + 1, :]
    return ErrorSeries(traj.times, np.linalg.norm(diff, axis=2), idx, pivot)


def fit_decay_rate(es: ErrorSeries, window, floor=1e-13) -> float:
    """Least-squares slope of ``log(max_j ||e_j||)`` against time over ``window = (t0, t1)``."""
    t0, t1 = window
    sel = (es.times >= t0) & (es.times <= t1)
    if sel.sum() < 2:
        raise DegenerateWindow(f"window [{t0}, {t1}] holds fewer than two samples")
    env = es.envelope[sel]
    if not (env > floor).all():
        raise DegenerateWindow(f"error envelope drops below {floor:g} inside [{t0}, {t1}]")
    slope, _ = np.polyfit(es.times[sel], np.log(env), 1)
    return float(slope)


def auto_window(es: ErrorSeries, floor=1e-13, skip=0.2):
    """Window after the first ``skip`` fraction of the run up to the last sample above ``100 * floor``."""
    start = es.times[0] + skip * (es.times[-1] - es.times[0])
    above = np.nonzero(es.envelope > 100 * floor)[0]
    end = es.times[above[-1]] if above.size else es.times[0]
    return float(start), float(end)


def comparison_initial(traj: Trajectory, pivot=0) -> np.ndarray:
    """``[|e_i(0)|..., ||eta_i(0)||...]`` over the non-pivot nodes."""
    x0 = traj.states[0]
    idx = np.array([i for i in range(x0.shape[0]) if i != pivot], dtype=np.int64)
    err = x0[idx] - x0[pivot]
    return np.concatenate([np.abs(err[:, 0]), np.linalg.norm(err[:, 1:], axis=1)])


def rk4_propagator(m, dt):
    """One RK4 step of ``z' = M z`` as a matrix."""
    m = np.asarray(m, dtype=float)
    hm = dt * m
    eye = np.eye(m.shape[0])
    hm2 = hm @ hm
    return eye + hm + hm2 / 2.0 + hm2 @ hm / 6.0 + hm2 @ hm2 / 24.0


def comparison_trajectory(m, z0, dt, n_saved, stride=1) -> np.ndarray:
    """RK4 solution of ``z' = M z`` sampled every ``stride`` steps; shape ``(n_saved, dim)``."""
    step = np.linalg.matrix_power(rk4_propagator(m, dt), stride)
    out = np.empty((n_saved, step.shape[0]))
    out[0] = z0
    for i in range(1, n_saved):
        out[i] = step @ out[i - 1]
    return out


def dominance_check(traj: Trajectory, m, pivot=0, dt=None, relative=False) -> float:
    """Largest excess of the true error bounds over the comparison solution.

    Returns ``max_{t,i} max(|e_i| - sigma_i, ||eta_i|| - chi_i)``. Non-positive
    means the comparison system dominates on the grid. With ``relative`` the
    result is divided by the largest initial bound.
    """
    m = np.asarray(m, dtype=float)
    n = traj.states.shape[1]
    if m.shape != (2 * (n - 1), 2 * (n - 1)):
        raise DimensionMismatch(f"matrix {m.shape} does not match {n} nodes")
    dt = traj.dt if dt is None else float(dt)
    stride = int(round((traj.times[1] - traj.times[0]) / dt)) if traj.times.size > 1 else 1
    z0 = comparison_initial(traj, pivot)
    z = comparison_trajectory(m, z0, dt, traj.times.size, stride)
    idx = np.array([i for i in range(n) if i != pivot], dtype=np.int64)
    err = traj.states[:, idx, :] - traj.states[:, pivot:pivot + 1, :]
    h = n - 1
    excess = np.maximum(np.abs(err[:, :, 0]) - z[:, :h], np.linalg.norm(err[:, :, 1:], axis=2) - z[:, h:])
    worst = float(excess.max())
    scale = float(z0.max()) if z0.size else 0.0
    if relative and scale > 0:
        worst /= scale
    return worst
