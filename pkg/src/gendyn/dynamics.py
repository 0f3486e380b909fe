"""Linear dynamics ``d theta / dt = -L theta`` on a generalized Laplacian.

Propagation uses fixed substeps with a truncated Taylor series per substep.
The substep count keeps ``||L||_1 * dt <= 1`` so each series converges with
no cancellation trouble, and the result is reproducible to the last bit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import _as_mask, cut_weight
from .operators import RANDOM_WALK, SYMMETRIC, OperatorSpec, _check_rho, apply, change_basis
from .partition import sweep_profile

__all__ = [
    "StateVector",
    "DynamicsError",
    "evolve",
    "trajectory",
    "stationary_distribution",
    "generalized_centrality",
    "conserved_projection",
    "RetentionReport",
    "retention_check",
    "MixingReport",
    "mixing_bound_check",
]

_SERIES_RTOL = 1e-17
_MAX_TERMS = 60
FD_STEP = 1e-4
RETENTION_MONO_TOL = 1e-9
RETENTION_DERIV_TOL = 1e-6
MIXING_SLACK = 1e-9


class DynamicsError(ArithmeticError):
    pass


@dataclass(frozen=True, eq=False)
class StateVector:
    """State values tagged with the basis ``rho`` they live in and a time."""

    values: np.ndarray
    rho: float
    t: float = 0.0

    def __post_init__(self):
        v = np.array(self.values, dtype=np.float64)
        if v.ndim != 1:
            raise ValueError("state vector must be one-dimensional")
        if not np.all(np.isfinite(v)):
            raise ValueError("state vector has non-finite entries")
        if self.t < 0:
            raise ValueError("time must be non-negative")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "rho", _check_rho(self.rho))

    def __len__(self):
        return self.values.size

    def to_basis(self, rho, op: OperatorSpec) -> "StateVector":
        return StateVector(change_basis(self.values, self.rho, rho, op), rho, self.t)


def _coerce(op: OperatorSpec, theta0) -> np.ndarray:
    if isinstance(theta0, StateVector):
        if theta0.rho != op.rho:
            raise ValueError(f"state is in basis rho={theta0.rho}, operator uses rho={op.rho}")
        x = theta0.values
    else:
        x = np.asarray(theta0, dtype=np.float64)
    if x.shape != (op.n,):
        raise ValueError(f"state has shape {x.shape}, expected ({op.n},)")
    return x


def _substep(op: OperatorSpec, x: np.ndarray, dt: float) -> np.ndarray:
    out = x.copy()
    term = x
    scale = np.abs(x).max()
    for k in range(1, _MAX_TERMS):
        term = apply(op, term) * (-dt / k)
        out += term
        if np.abs(term).max() <= _SERIES_RTOL * scale:
            break
    return out


def evolve(op: OperatorSpec, theta0, t: float, steps: int = 1) -> StateVector:
    """``exp(-t L) theta0`` in the basis of ``op``.

    ``steps`` is a lower bound on the number of substeps; more are taken
    when needed to keep ``||L||_1 dt <= 1``.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    if steps < 1:
        raise ValueError("steps must be >= 1")
    x = _coerce(op, theta0)
    t0 = theta0.t if isinstance(theta0, StateVector) else 0.0
    if t == 0:
        return StateVector(x, op.rho, t0)
    m = max(int(steps), int(math.ceil(op.norm1() * t)))
    dt = t / m
    with np.errstate(over="ignore", invalid="ignore"):
        for i in range(m):
            x = _substep(op, x, dt)
            if not np.all(np.isfinite(x)):
                raise DynamicsError(f"non-finite state at substep {i + 1} of {m}")
    return StateVector(x, op.rho, t0 + t)


def trajectory(op: OperatorSpec, theta0, times) -> list[StateVector]:
    """States at each of the (sorted, non-negative) ``times``, propagated incrementally."""
    times = np.asarray(times, dtype=np.float64)
    if times.ndim != 1 or np.any(np.diff(times) < 0) or (times.size and times[0] < 0):
        raise ValueError("times must be a non-decreasing sequence of non-negative values")
    state = StateVector(_coerce(op, theta0), op.rho, 0.0)
    out = []
    for t in times:
        state = evolve(op, state, float(t) - state.t)
        out.append(StateVector(state.values, op.rho, float(t)))
    return out


def _u1(op: OperatorSpec) -> np.ndarray:
    c = op.centrality
    return c ** (0.5 + op.rho) / math.sqrt(c.sum())


def _v1(op: OperatorSpec) -> np.ndarray:
    c = op.centrality
    return c ** (0.5 - op.rho) / math.sqrt(c.sum())


def conserved_projection(op: OperatorSpec, theta) -> float:
    """``u1 . theta``: the quantity the dynamics leave unchanged."""
    return float(_u1(op) @ _coerce(op, theta))


def stationary_distribution(op: OperatorSpec, theta0=None) -> StateVector:
    """Limit of the dynamics in the operator's basis.

    Without ``theta0`` the limit is normalised so that the random-walk form
    is a probability vector: ``c**(1/2 - rho) / sum(c)``.  With ``theta0``
    it is the actual limit ``v1 (u1 . theta0)``.
    """
    from .graph import GraphError
    from scipy.sparse.csgraph import connected_components

    if connected_components(op.W, directed=False)[0] != 1:
        raise GraphError("stationary distribution needs a connected operator")
    c = op.centrality
    if theta0 is None:
        vals = c ** (0.5 - op.rho) / c.sum()
    else:
        vals = _v1(op) * conserved_projection(op, theta0)
    return StateVector(vals, op.rho, 0.0)


def generalized_centrality(op: OperatorSpec) -> np.ndarray:
    """``c_i = d_W,i tau_i``; independent of ``rho``."""
    return np.array(op.centrality)


@dataclass(frozen=True)
class RetentionReport:
    t: tuple[float, ...]
    retention: tuple[float, ...]
    derivative: tuple[float, ...]
    conductance: float
    monotone: bool
    derivative_ok: bool

    @property
    def passed(self) -> bool:
        return self.monotone and self.derivative_ok

    def rows(self) -> list[dict]:
        """One ``{t, lhs, rhs, pass}`` record per grid point (``lhs = |dTheta/dt|``)."""
        out = []
        for k, t in enumerate(self.t):
            lhs = abs(self.derivative[k])
            mono = k == 0 or self.retention[k] <= self.retention[k - 1] + RETENTION_MONO_TOL
            ok = lhs <= self.conductance + RETENTION_DERIV_TOL and mono
            out.append({"t": t, "lhs": lhs, "rhs": self.conductance, "pass": bool(ok)})
        return out


def _retention(op: OperatorSpec, mu: np.ndarray, mask: np.ndarray, t: float) -> float:
    return float(evolve(op, mu, t).values[mask].sum())


def retention_check(op: OperatorSpec, S, t_grid, fd_step: float = FD_STEP) -> RetentionReport:
    """Track the mass ``Theta(t)`` a random walk keeps inside ``S``.

    Starts from ``c chi_S / vol(S)`` in the random-walk basis.  Derivatives
    are central differences, second-order one-sided at ``t = 0``.
    """
    rw = op.with_rho(RANDOM_WALK)
    mask = _as_mask(S, op.n)
    if not mask.any() or mask.all():
        raise ValueError("S must be a non-empty proper subset")
    c = rw.centrality
    vs = float(c[mask].sum())
    if vs > rw.volume / 2 * (1 + 1e-12):
        raise ValueError(f"vol(S)={vs:.6g} exceeds half the total volume {rw.volume:.6g}")
    h = cut_weight(rw.W, mask) / vs
    mu = np.where(mask, c, 0.0) / vs
    grid = np.asarray(sorted(float(x) for x in t_grid))
    if grid.size == 0 or grid[0] < 0:
        raise ValueError("t_grid must be non-empty and non-negative")
    theta, deriv = [], []
    d = fd_step
    for t in grid:
        f0 = _retention(rw, mu, mask, t)
        theta.append(f0)
        if t >= d:
            deriv.append((_retention(rw, mu, mask, t + d) - _retention(rw, mu, mask, t - d)) / (2 * d))
        else:
            f1 = _retention(rw, mu, mask, t + d)
            f2 = _retention(rw, mu, mask, t + 2 * d)
            deriv.append((-3 * f0 + 4 * f1 - f2) / (2 * d))
    theta_a = np.array(theta)
    mono = bool(np.all(np.diff(theta_a) <= RETENTION_MONO_TOL))
    dok = bool(np.all(np.abs(deriv) <= h + RETENTION_DERIV_TOL))
    return RetentionReport(tuple(grid.tolist()), tuple(theta), tuple(float(x) for x in deriv),
                           float(h), mono, dok)


@dataclass(frozen=True)
class MixingReport:
    t: float
    u: int
    v: int
    lhs: float
    rhs: float
    h_u: float
    h_v: float

    @property
    def passed(self) -> bool:
        return self.lhs <= self.rhs + MIXING_SLACK

    @property
    def marginal(self) -> bool:
        """Within the reporting slack of the bound but not strictly inside it."""
        return self.rhs < self.lhs <= self.rhs + MIXING_SLACK

    def to_dict(self) -> dict:
        return {"t": self.t, "lhs": self.lhs, "rhs": self.rhs, "pass": self.passed,
                "u": self.u, "v": self.v, "h_u": self.h_u, "h_v": self.h_v,
                "marginal": self.marginal}


def _delta_state(op: OperatorSpec, w: int, t: float) -> np.ndarray:
    c = op.centrality
    x = np.zeros(op.n)
    x[w] = 1.0 / math.sqrt(c[w])
    return evolve(op, x, t).values


def mixing_bound_check(op: OperatorSpec, u: int, v: int, t: float) -> MixingReport:
    """Pointwise convergence of the symmetric-basis walk started at ``u``.

    Compares ``|theta_u(t)[v] - pi[v]|`` with
    ``(c_u c_v)^(-1/2) exp(-t (h_u^2 + h_v^2) / 4)`` where ``h_w`` is the best
    sweep conductance of ``theta_w(t)``, recomputed at this ``t``.
    """
    sym = op.with_rho(SYMMETRIC)
    n = sym.n
    for w in (u, v):
        if not 0 <= w < n:
            raise IndexError(f"vertex {w} out of range for n={n}")
    if t < 0:
        raise ValueError("t must be non-negative")
    c = sym.centrality
    pi = np.sqrt(c) / c.sum()
    theta_u = _delta_state(sym, u, t)
    theta_v = theta_u if v == u else _delta_state(sym, v, t)
    h_u = sweep_profile(sym, theta_u).h_min
    h_v = h_u if v == u else sweep_profile(sym, theta_v).h_min
    lhs = abs(theta_u[v] - pi[v])
    rhs = (c[u] * c[v]) ** -0.5 * math.exp(-t * (h_u ** 2 + h_v ** 2) / 4.0)
    return MixingReport(float(t), int(u), int(v), float(lhs), float(rhs), float(h_u), float(h_v))
