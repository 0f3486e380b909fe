"""Generalized conductance, sweep partitions and Cheeger certificates."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .graph import VertexSet, _as_mask, cut_weight
from .operators import OperatorSpec
from .spectra import EigenResult, SpectralError

__all__ = [
    "generalized_conductance",
    "SweepProfile",
    "Partition",
    "sweep_profile",
    "sweep_partition",
    "brute_force_conductance",
    "CheegerReport",
    "cheeger_check",
]

CHEEGER_SLACK = 1e-9
BRUTE_FORCE_MAX_N = 12
_TIE_RTOL = 1e-12
SWEEP_TIE_RTOL = 1e-9


def generalized_conductance(op: OperatorSpec, S) -> float:
    """``cut_W(S) / min(vol(S), vol(V \\ S))`` with ``vol`` weighted by ``d_W tau``."""
    mask = _as_mask(S, op.n)
    k = int(mask.sum())
    if k == 0 or k == op.n:
        raise ValueError("conductance needs a non-empty proper subset")
    c = op.centrality
    vs = float(c[mask].sum())
    vbar = float(c[~mask].sum())
    return cut_weight(op.W, mask) / min(vs, vbar)


@dataclass(frozen=True, eq=False)
class SweepProfile:
    """Conductance of every prefix of a sweep ordering.

    Entry ``i`` (0-based) describes the prefix ``order[: i + 1]``; prefixes run
    from one vertex up to ``n - 1`` vertices.
    """

    order: np.ndarray
    cut: np.ndarray
    vol_S: np.ndarray
    vol_Sbar: np.ndarray
    h: np.ndarray

    @property
    def best(self) -> int:
        """Index of the smallest conductance; ties (relative ``1e-12``) go to the shortest prefix."""
        m = self.h.min()
        return int(np.flatnonzero(self.h <= m * (1 + _TIE_RTOL))[0])

    @property
    def h_min(self) -> float:
        return float(self.h[self.best])

    def prefix(self, i: int) -> np.ndarray:
        return np.sort(self.order[: i + 1])

    def local_minima(self) -> np.ndarray:
        """Prefix indices whose conductance is no larger than both neighbours."""
        h = self.h
        m = len(h)
        if m == 1:
            return np.array([0])
        left = np.r_[np.inf, h[:-1]]
        right = np.r_[h[1:], np.inf]
        return np.flatnonzero((h <= left) & (h <= right))

    def rows(self, labels=None):
        for i in range(len(self.h)):
            v = self.order[i]
            yield (i + 1, labels[v] if labels is not None else int(v), float(self.cut[i]),
                   float(self.vol_S[i]), float(self.vol_Sbar[i]), float(self.h[i]))


@dataclass(frozen=True, eq=False)
class Partition:
    side: VertexSet
    conductance: float
    eigen: EigenResult | None = field(default=None, repr=False)
    bound: float | None = None


def sweep_profile(op: OperatorSpec, f) -> SweepProfile:
    """Sweep over ``g = f / sqrt(d_W tau)`` sorted in descending order.

    Values of ``g`` that agree to ``1e-9 * max|g|`` count as ties and are
    broken by ascending vertex index, so roundoff in an eigenvector with
    exactly tied entries cannot reorder the sweep.  Cuts are updated
    incrementally so the whole profile costs ``O(nnz(W) + n log n)``.
    """
    f = np.asarray(f, dtype=np.float64)
    n = op.n
    if f.shape != (n,):
        raise ValueError(f"vector has shape {f.shape}, expected ({n},)")
    if n < 2:
        raise ValueError("sweep needs at least two vertices")
    c = op.centrality
    g = f / np.sqrt(c)
    scale = np.abs(g).max()
    key = np.round(g / (SWEEP_TIE_RTOL * scale)) if scale > 0 else g
    order = np.lexsort((np.arange(n), -key))
    W = sp.csr_matrix(op.W)
    rank = np.empty(n, dtype=np.int64)
    rank[order] = np.arange(n)
    # adding vertex v changes the cut by d_W(v) - 2 * (weight to earlier vertices)
    rows = np.repeat(np.arange(n), np.diff(W.indptr))
    earlier = rank[W.indices] < rank[rows]
    back = np.bincount(rows[earlier], weights=W.data[earlier], minlength=n)
    delta = op.dW[order] - 2.0 * back[order]
    cut = np.cumsum(delta)[:-1]
    vol_S = np.cumsum(c[order])[:-1]
    total = float(c.sum())
    vol_Sbar = total - vol_S
    denom = np.minimum(vol_S, vol_Sbar)
    h = np.maximum(cut, 0.0) / denom
    return SweepProfile(order, cut, vol_S, vol_Sbar, h)


def sweep_partition(g, op: OperatorSpec, eig: EigenResult) -> tuple[Partition, SweepProfile]:
    """Best sweep cut of the eigenvector and its guaranteed bound.

    ``g`` is the graph ``op`` was built on (``None`` skips the size check).

    Raises :class:`SpectralError` if the conductance exceeds
    ``sqrt(2 RQ(f))``, which signals a bad eigenvector rather than a bad cut.
    """
    from .spectra import rayleigh_quotient

    if g is not None and g.n != op.n:
        raise ValueError(f"graph has {g.n} vertices, operator has {op.n}")
    # removing the kernel component shifts g by a constant: same order, valid bound
    v1 = op.kernel_vector()
    f = eig.eigenvector - v1 * (v1 @ eig.eigenvector)
    prof = sweep_profile(op, f)
    bound = math.sqrt(2.0 * max(rayleigh_quotient(op, f), 0.0))
    h = prof.h_min
    if h > bound + CHEEGER_SLACK:
        raise SpectralError(f"sweep conductance {h:.6g} exceeds guarantee {bound:.6g}")
    side = VertexSet(op.n, prof.prefix(prof.best))
    return Partition(side, h, eig, bound), prof


def brute_force_conductance(op: OperatorSpec, n_max: int = BRUTE_FORCE_MAX_N) -> tuple[float, VertexSet]:
    """Exact minimum conductance by enumeration (``n <= n_max``).

    Only subsets containing vertex 0 are scanned (conductance is symmetric
    under complement).  Near ties are resolved towards the lexicographically
    smallest sorted vertex list.
    """
    n = op.n
    if n > n_max:
        raise ValueError(f"brute force limited to n <= {n_max}, got {n}")
    if n < 2:
        raise ValueError("need at least two vertices")
    Wd = op.W.toarray()
    c = op.centrality
    masks = np.arange(1 << (n - 1), dtype=np.int64) * 2 + 1
    masks = masks[masks != (1 << n) - 1]
    bits = ((masks[:, None] >> np.arange(n)) & 1).astype(np.float64)
    cuts = np.einsum("ki,ij,kj->k", bits, Wd, 1.0 - bits)
    vs = bits @ c
    vol = c.sum()
    h = cuts / np.minimum(vs, vol - vs)
    phi = float(h.min())
    near = np.flatnonzero(h <= phi * (1 + _TIE_RTOL) + 1e-300)
    best = None
    for k in near:
        key = tuple(np.flatnonzero(bits[k]).tolist())
        if best is None or key < best:
            best = key
    return phi, VertexSet(n, best)


@dataclass(frozen=True)
class CheegerReport:
    """Checks of ``phi^2 / 2 <= lambda_2 <= 2 phi`` and the sweep guarantee."""

    lambda2: float
    h_sweep: float
    epsilon: float
    phi: float | None
    lower_ok: bool | None
    upper_ok: bool | None
    sweep_ok: bool
    sweep_upper_ok: bool
    sweep_bound: float
    tau_min: float
    timings: dict | None = None

    @property
    def passed(self) -> bool:
        checks = (self.sweep_ok, self.sweep_upper_ok, self.lower_ok, self.upper_ok)
        return all(c is not False for c in checks)

    def to_dict(self, include_timings: bool = False) -> dict:
        out = {
            "lambda2": self.lambda2,
            "epsilon": self.epsilon,
            "h_sweep": self.h_sweep,
            "sweep_bound": self.sweep_bound,
            "sweep_ok": self.sweep_ok,
            "sweep_upper_ok": self.sweep_upper_ok,
            "phi": self.phi,
            "lower_ok": self.lower_ok,
            "upper_ok": self.upper_ok,
            "tau_min": self.tau_min,
            "passed": self.passed,
        }
        if include_timings and self.timings is not None:
            out["timings"] = dict(self.timings)
        return out


def cheeger_check(lambda2: float, h_sweep: float, phi_exact: float | None = None,
                  epsilon: float = 0.0, tau_min: float = 1.0, slack: float = CHEEGER_SLACK,
                  timings: dict | None = None) -> CheegerReport:
    """Assemble a certificate.

    The sweep guarantee ``h <= sqrt(2 (1 + eps) lambda_2)`` and
    ``lambda_2 <= 2 h`` are always checked.
    With an exact ``phi`` the two-sided inequality is checked too; the lower
    half relies on ``tau >= 1`` and is skipped (``None``) otherwise.
    """
    bound = math.sqrt(2.0 * (1.0 + epsilon) * lambda2)
    sweep_ok = h_sweep <= bound + slack
    sweep_upper_ok = lambda2 <= 2.0 * h_sweep + slack
    lower_ok = upper_ok = None
    if phi_exact is not None:
        upper_ok = lambda2 <= 2.0 * phi_exact + slack
        if tau_min >= 1.0:
            lower_ok = phi_exact ** 2 / 2.0 <= lambda2 + slack
    return CheegerReport(float(lambda2), float(h_sweep), float(epsilon), phi_exact,
                         lower_ok, upper_ok, bool(sweep_ok), bool(sweep_upper_ok), bound,
                         float(tau_min), timings)
