"""Generalized Laplacian operators.

An operator is the triple ``(rho, T, W)``::

    L = (T D_W)^(-1/2 - rho) (D_W - W) (D_W T)^(-1/2 + rho)

with ``W`` a symmetric non-negative interaction matrix, ``D_W`` its degree
matrix and ``T`` a diagonal matrix of vertex delays.  ``rho`` selects one of
three similar matrices: ``-1/2`` (random walk), ``0`` (symmetric) and ``+1/2``
(consensus).  Operators are applied lazily through ``W``; nothing is
densified except by :meth:`OperatorSpec.to_dense`.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .graph import Graph, GraphError, read_vertex_values

__all__ = [
    "RANDOM_WALK",
    "SYMMETRIC",
    "CONSENSUS",
    "SPECIAL_CASES",
    "OperatorError",
    "OperatorSpec",
    "OperatorConfig",
    "build_operator",
    "normalize_delays",
    "reweigh_bias",
    "degree_power_bias",
    "special_case",
    "apply",
    "change_basis",
    "operator_from_config",
]

RANDOM_WALK = -0.5
SYMMETRIC = 0.0
CONSENSUS = 0.5
_RHOS = (RANDOM_WALK, SYMMETRIC, CONSENSUS)

SPECIAL_CASES = (
    "normalized_laplacian",
    "scaled_laplacian",
    "replicator",
    "unbiased_laplacian",
)

DENSE_LIMIT = 200


class OperatorError(ValueError):
    pass


def _check_rho(rho) -> float:
    rho = float(rho)
    if rho not in _RHOS:
        raise OperatorError(f"rho must be one of {_RHOS}, got {rho}")
    return rho


def _readonly(x: np.ndarray) -> np.ndarray:
    x = np.array(x, dtype=np.float64)
    x.setflags(write=False)
    return x


@dataclass(frozen=True, eq=False)
class OperatorSpec:
    """A validated generalized Laplacian ``(rho, T, W)``.

    ``tau`` holds the diagonal of ``T`` and ``dW`` the row sums of ``W``.
    """

    rho: float
    W: sp.csr_matrix
    tau: np.ndarray
    dW: np.ndarray
    kind: str = "custom"
    labels: tuple[str, ...] | None = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return self.W.shape[0]

    @property
    def centrality(self) -> np.ndarray:
        """Generalized centrality ``d_W * tau`` (the generalized volume weights)."""
        return self.dW * self.tau

    @property
    def volume(self) -> float:
        return float(self.centrality.sum())

    def kernel_vector(self) -> np.ndarray:
        """Unit null vector of the symmetric form, ``sqrt(d_W tau)`` normalised."""
        v = np.sqrt(self.centrality)
        return v / np.linalg.norm(v)

    def with_rho(self, rho) -> "OperatorSpec":
        return replace(self, rho=_check_rho(rho))

    def scaled(self, gamma: float) -> "OperatorSpec":
        """Uniform delay scaling ``T -> gamma T`` (``gamma >= 1``)."""
        if gamma < 1:
            raise OperatorError("uniform scaling factor must be >= 1 to keep tau >= 1")
        return replace(self, tau=_readonly(self.tau * gamma))

    def matvec(self, x: np.ndarray) -> np.ndarray:
        return apply(self, x)

    def laplacian_matvec(self, y: np.ndarray) -> np.ndarray:
        """``(D_W - W) y`` for a vector or a block of column vectors."""
        if y.ndim == 1:
            return self.dW * y - self.W @ y
        return self.dW[:, None] * y - self.W @ y

    def norm1(self) -> float:
        """Induced 1-norm (max column absolute sum) in the current basis."""
        c = self.centrality
        left = c ** (-0.5 - self.rho)
        right = c ** (-0.5 + self.rho)
        cols = right * (self.dW * left + self.W.T @ left)
        return float(cols.max())

    def gershgorin_bound(self) -> float:
        """Upper bound on the spectral radius of the symmetric form."""
        s = 1.0 / np.sqrt(self.centrality)
        rows = 1.0 / self.tau + s * (self.W @ s)
        return float(rows.max())

    def to_dense(self) -> np.ndarray:
        """Dense matrix in the current basis (debug/oracle path, small n only)."""
        if self.n > DENSE_LIMIT:
            raise OperatorError(f"refusing to densify an operator with n={self.n} > {DENSE_LIMIT}")
        c = self.centrality
        L = np.diag(self.dW) - self.W.toarray()
        return (c ** (-0.5 - self.rho))[:, None] * L * (c ** (-0.5 + self.rho))[None, :]

    def as_linear_operator(self):
        from scipy.sparse.linalg import LinearOperator

        return LinearOperator((self.n, self.n), matvec=self.matvec, dtype=np.float64)


def _validate_W(W) -> sp.csr_matrix:
    W = sp.csr_matrix(W, dtype=np.float64, copy=True)
    n = W.shape[0]
    if W.shape != (n, n):
        raise OperatorError("interaction matrix must be square")
    W.eliminate_zeros()
    if W.nnz:
        if not np.isfinite(W.data).all():
            raise OperatorError("interaction matrix has non-finite entries")
        if (W.data < 0).any():
            raise OperatorError("interaction matrix has negative entries")
    if W.diagonal().any():
        raise OperatorError("interaction matrix must have a zero diagonal")
    asym = abs(W - W.T)
    if asym.nnz and asym.max() > 0:
        raise OperatorError("interaction matrix is not symmetric")
    W.sort_indices()
    return W


def build_operator(W, T=None, rho=SYMMETRIC, kind: str = "custom", labels=None) -> OperatorSpec:
    """Validate ``(W, T, rho)`` and derive the interaction degrees."""
    rho = _check_rho(rho)
    W = _validate_W(W)
    n = W.shape[0]
    tau = np.ones(n) if T is None else np.asarray(T, dtype=np.float64).ravel()
    if tau.shape != (n,):
        raise OperatorError(f"delay vector has length {tau.size}, expected {n}")
    if not np.isfinite(tau).all():
        raise OperatorError("delays must be finite")
    if (tau < 1).any():
        i = int(np.argmin(tau))
        raise OperatorError(
            f"delay tau[{i}]={tau[i]:g} < 1; the operator is not properly scaled "
            "(rescale with normalize_delays)"
        )
    dW = np.asarray(W.sum(axis=1)).ravel()
    if (dW <= 0).any():
        i = int(np.flatnonzero(dW <= 0)[0])
        name = labels[i] if labels is not None else i
        raise OperatorError(f"vertex {name!r} has zero interaction degree")
    for arr in (W.data, W.indices, W.indptr):
        arr.setflags(write=False)
    return OperatorSpec(
        rho=rho,
        W=W,
        tau=_readonly(tau),
        dW=_readonly(dW),
        kind=kind,
        labels=None if labels is None else tuple(labels),
    )


def normalize_delays(T_raw) -> np.ndarray:
    """Rescale positive delays so the smallest equals exactly 1."""
    t = np.asarray(T_raw, dtype=np.float64).ravel()
    if t.size == 0:
        raise OperatorError("empty delay vector")
    if not np.isfinite(t).all() or (t <= 0).any():
        raise OperatorError("delay factors must be finite and strictly positive")
    return t / t.min()


def reweigh_bias(A, b) -> sp.csr_matrix:
    """``W = B A B`` with ``B = diag(b)``; the sparsity pattern is unchanged."""
    A = sp.csr_matrix(A, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64).ravel()
    if b.shape != (A.shape[0],):
        raise OperatorError(f"bias vector has length {b.size}, expected {A.shape[0]}")
    if not np.isfinite(b).all() or (b <= 0).any():
        raise OperatorError("bias entries must be finite and strictly positive")
    W = A.copy()
    rows = np.repeat(np.arange(W.shape[0]), np.diff(W.indptr))
    W.data = b[rows] * W.data * b[W.indices]
    return W


def degree_power_bias(A, beta: float) -> np.ndarray:
    """Bias ``b_i = d_i ** beta`` giving transition weights ``P_ij ~ d_i^beta a_ij``."""
    d = np.asarray(sp.csr_matrix(A).sum(axis=1), dtype=np.float64).ravel()
    if beta == 0:
        return np.ones_like(d)
    if (d <= 0).any():
        i = int(np.flatnonzero(d <= 0)[0])
        raise OperatorError(f"vertex {i} has zero degree; degree bias undefined")
    return d ** float(beta)


def _require_connected(A: sp.csr_matrix):
    if A.shape[0] == 0:
        raise GraphError("empty graph")
    ncomp, _ = connected_components(A, directed=False)
    if ncomp != 1:
        raise GraphError(
            f"graph has {ncomp} connected components; restrict to the giant component first"
        )


def _adjacency(A) -> tuple[sp.csr_matrix, tuple[str, ...] | None]:
    if isinstance(A, Graph):
        return A.adjacency, A.labels
    return sp.csr_matrix(A, dtype=np.float64), None


def special_case(A, kind: str, clamp: float | None = None, tol: float = 1e-12):
    """Interaction matrix and delays ``(W, tau)`` for one of the named operators.

    ``clamp`` only affects the replicator: Perron-vector entries below the
    positivity floor are raised to ``clamp`` instead of raising an error.
    """
    A, _ = _adjacency(A)
    _require_connected(A)
    d = np.asarray(A.sum(axis=1)).ravel()
    if kind == "normalized_laplacian":
        return A.copy(), np.ones(A.shape[0])
    if kind == "scaled_laplacian":
        return A.copy(), d.max() / d
    if kind == "replicator":
        from .spectra import dominant_adjacency_eigenpair

        v = dominant_adjacency_eigenpair(A, tol=tol, clamp=clamp).eigenvector
        return reweigh_bias(A, v), np.ones(A.shape[0])
    if kind == "unbiased_laplacian":
        W = reweigh_bias(A, d ** -0.5)
        dW = np.asarray(W.sum(axis=1)).ravel()
        return W, dW.max() / dW
    raise OperatorError(f"unknown operator kind {kind!r}; expected one of {SPECIAL_CASES}")


def apply(op: OperatorSpec, x) -> np.ndarray:
    """``L x`` in the operator's basis, in ``O(nnz(W))``."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[0] != op.n:
        raise ValueError(f"vector has length {x.shape[0]}, operator has n={op.n}")
    c = op.centrality
    if x.ndim == 2:
        c = c[:, None]
    if op.rho == RANDOM_WALK:
        return op.laplacian_matvec(x / c)
    if op.rho == CONSENSUS:
        return op.laplacian_matvec(x) / c
    s = np.sqrt(c)
    return op.laplacian_matvec(x / s) / s


def change_basis(x, from_rho, to_rho, op: OperatorSpec) -> np.ndarray:
    """Map a state vector between the ``rho`` formulations of ``op``."""
    a, b = _check_rho(from_rho), _check_rho(to_rho)
    x = np.asarray(x, dtype=np.float64)
    if x.shape[0] != op.n:
        raise ValueError(f"vector has length {x.shape[0]}, operator has n={op.n}")
    if a == b:
        return x.copy()
    p = a - b
    c = op.centrality
    if p == -0.5 or p == 0.5:
        f = np.sqrt(c) if p > 0 else 1.0 / np.sqrt(c)
    else:
        f = c if p > 0 else 1.0 / c
    return f * x if x.ndim == 1 else f[:, None] * x


@dataclass(frozen=True)
class OperatorConfig:
    """JSON-serialisable operator recipe.

    ``kind`` is one of :data:`SPECIAL_CASES` or ``"biased"`` (degree-power
    reweighing ``b = d**beta`` with delays chosen by ``delays["mode"]``:
    ``identity``, ``inverse_degree`` or ``file``).
    """

    kind: str
    rho: float = RANDOM_WALK
    beta: float = 0.0
    delays: Mapping[str, str] | None = None
    name: str | None = None

    @property
    def label(self) -> str:
        if self.name:
            return self.name
        if self.kind == "biased":
            return f"biased_beta{self.beta:g}"
        return self.kind

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "beta": self.beta, "rho": self.rho}
        if self.delays is not None:
            out["delays"] = dict(self.delays)
        if self.name:
            out["name"] = self.name
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: Mapping) -> "OperatorConfig":
        unknown = set(d) - {"kind", "beta", "rho", "delays", "name"}
        if unknown:
            raise OperatorError(f"unknown operator config keys: {sorted(unknown)}")
        if "kind" not in d:
            raise OperatorError("operator config requires 'kind'")
        kind = str(d["kind"])
        if kind not in SPECIAL_CASES + ("biased",):
            raise OperatorError(f"unknown operator kind {kind!r}")
        beta = float(d.get("beta", 0.0))
        delays = d.get("delays")
        if delays is not None:
            mode = delays.get("mode", "identity")
            if mode not in ("identity", "inverse_degree", "file"):
                raise OperatorError(f"unknown delay mode {mode!r}")
            if mode == "file" and not delays.get("path"):
                raise OperatorError("delay mode 'file' requires 'path'")
        if kind in SPECIAL_CASES:
            if beta != 0.0:
                raise OperatorError(f"'beta' is fixed by the {kind} operator")
            if delays is not None and delays.get("mode", "identity") != "identity":
                raise OperatorError(f"delays are fixed by the {kind} operator")
        return cls(kind=kind, rho=_check_rho(d.get("rho", RANDOM_WALK)), beta=beta,
                   delays=None if delays is None else dict(delays), name=d.get("name"))

    @classmethod
    def from_json(cls, text: str) -> "OperatorConfig":
        return cls.from_dict(json.loads(text))


def load_delay_file(path, labels: Sequence[str]) -> np.ndarray:
    with open(path, encoding="utf-8") as fh:
        values = read_vertex_values(fh, cast=float)
    missing = [lab for lab in labels if lab not in values]
    if missing:
        raise OperatorError(f"delay file {path} lacks vertices {missing[:5]}")
    return normalize_delays([values[lab] for lab in labels])


def operator_from_config(g: Graph, cfg: OperatorConfig, clamp: float | None = None,
                         base_dir: str | Path | None = None) -> OperatorSpec:
    """Build the operator a config describes on graph ``g``."""
    if cfg.kind in SPECIAL_CASES:
        W, tau = special_case(g.adjacency, cfg.kind, clamp=clamp)
    else:
        _require_connected(g.adjacency)
        W = reweigh_bias(g.adjacency, degree_power_bias(g.adjacency, cfg.beta))
        mode = (cfg.delays or {}).get("mode", "identity")
        if mode == "identity":
            tau = np.ones(g.n)
        elif mode == "inverse_degree":
            tau = normalize_delays(1.0 / np.asarray(W.sum(axis=1)).ravel())
        else:
            path = Path(cfg.delays["path"])
            if base_dir is not None and not path.is_absolute():
                path = Path(base_dir) / path
            tau = load_delay_file(path, g.labels)
    return build_operator(W, tau, cfg.rho, kind=cfg.label, labels=g.labels)


def make_operator(g, kind: str, rho=SYMMETRIC, clamp: float | None = None) -> OperatorSpec:
    """Shortcut: one of the four special cases on a graph or adjacency matrix."""
    A, labels = _adjacency(g)
    W, tau = special_case(A, kind, clamp=clamp)
    return build_operator(W, tau, rho, kind=kind, labels=labels)
