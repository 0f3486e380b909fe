"""Weighted undirected graphs with cut and volume primitives.

Vertices carry arbitrary string identifiers and are mapped to dense indices
``0..n-1`` in order of first appearance.  The adjacency matrix is stored as a
read-only CSR matrix; graphs are never mutated after construction.
"""
from __future__ import annotations

import io
import re
from dataclasses import dataclass
from typing import Iterable, Sequence, TextIO

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

__all__ = [
    "Graph",
    "GraphError",
    "GraphFormatError",
    "VertexSet",
    "load_edge_list",
    "read_edge_list",
    "read_vertex_values",
    "cut_weight",
    "generalized_volume",
    "giant_component",
]

_SPLIT = re.compile(r"[\s,]+")


class GraphError(ValueError):
    """Invalid graph structure (self loops, negative weights, disconnection...)."""


class GraphFormatError(GraphError):
    """Unparsable edge-list input."""

    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


def _freeze(x: np.ndarray) -> np.ndarray:
    x.setflags(write=False)
    return x


def _freeze_csr(A: sp.csr_matrix) -> sp.csr_matrix:
    for arr in (A.data, A.indices, A.indptr):
        arr.setflags(write=False)
    return A


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable weighted undirected graph.

    Use :meth:`from_edges` or :func:`load_edge_list` rather than calling the
    constructor directly; they validate and canonicalise the adjacency.
    """

    labels: tuple[str, ...]
    adjacency: sp.csr_matrix
    degrees: np.ndarray

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def edge_count(self) -> int:
        return int(self.adjacency.nnz // 2)

    @property
    def total_weight(self) -> float:
        return float(self.adjacency.sum()) / 2.0

    def index(self, label: str) -> int:
        try:
            return self._index_map()[str(label)]
        except KeyError:
            raise KeyError(f"unknown vertex {label!r}") from None

    def _index_map(self) -> dict[str, int]:
        cache = self.__dict__.get("_idx")
        if cache is None:
            cache = {lab: i for i, lab in enumerate(self.labels)}
            object.__setattr__(self, "_idx", cache)
        return cache

    def edges(self) -> list[tuple[int, int, float]]:
        """Edges as ``(i, j, w)`` with ``i < j``, sorted."""
        U = sp.triu(self.adjacency, k=1).tocoo()
        order = np.lexsort((U.col, U.row))
        return [(int(U.row[k]), int(U.col[k]), float(U.data[k])) for k in order]

    def is_connected(self) -> bool:
        if self.n == 0:
            return False
        ncomp, _ = connected_components(self.adjacency, directed=False)
        return ncomp == 1

    def subgraph(self, vertices: Iterable[int]) -> "Graph":
        """Induced subgraph on ``vertices`` (kept in ascending index order)."""
        idx = np.unique(np.asarray(list(vertices), dtype=np.int64))
        A = self.adjacency[idx][:, idx]
        return Graph._build([self.labels[i] for i in idx], sp.csr_matrix(A))

    def permute(self, order: Sequence[int]) -> "Graph":
        """Same graph with vertex ``order[k]`` moved to position ``k``."""
        idx = np.asarray(order, dtype=np.int64)
        if not np.array_equal(np.sort(idx), np.arange(self.n)):
            raise GraphError("order must be a permutation of the vertex indices")
        A = self.adjacency[idx][:, idx]
        return Graph._build([self.labels[i] for i in idx], sp.csr_matrix(A))

    @classmethod
    def from_edges(
        cls,
        edges: Iterable[Sequence],
        labels: Sequence[str] | None = None,
        sum_duplicates: bool = True,
    ) -> "Graph":
        """Build a graph from ``(u, v)`` or ``(u, v, w)`` tuples.

        When ``labels`` is given, ``u``/``v`` are dense integer indices into it;
        otherwise they are identifiers and are indexed by first appearance.
        """
        index: dict[str, int] = {}
        names: list[str] = []
        if labels is not None:
            names = [str(x) for x in labels]
            index = {lab: i for i, lab in enumerate(names)}
            if len(index) != len(names):
                raise GraphError("duplicate vertex labels")
        rows: list[int] = []
        cols: list[int] = []
        vals: list[float] = []
        seen: set[tuple[int, int]] = set()
        for k, e in enumerate(edges):
            if len(e) == 2:
                u, v = e
                w = 1.0
            else:
                u, v, w = e[:3]
            if labels is None:
                i = index.setdefault(str(u), len(names))
                if i == len(names):
                    names.append(str(u))
                j = index.setdefault(str(v), len(names))
                if j == len(names):
                    names.append(str(v))
            else:
                i, j = int(u), int(v)
                if not (0 <= i < len(names) and 0 <= j < len(names)):
                    raise GraphError(f"edge {k}: index out of range")
            _check_edge(i, j, float(w), names, None)
            key = (min(i, j), max(i, j))
            if key in seen and not sum_duplicates:
                raise GraphError(f"duplicate edge {names[i]!r}-{names[j]!r}")
            seen.add(key)
            rows.append(i)
            cols.append(j)
            vals.append(float(w))
        return cls._from_coo(names, rows, cols, vals)

    @classmethod
    def from_adjacency(cls, A, labels: Sequence[str] | None = None) -> "Graph":
        """Wrap a symmetric non-negative matrix (dense or sparse)."""
        A = sp.csr_matrix(A, dtype=np.float64)
        n = A.shape[0]
        if A.shape != (n, n):
            raise GraphError("adjacency must be square")
        names = [str(i) for i in range(n)] if labels is None else [str(x) for x in labels]
        if len(names) != n:
            raise GraphError("labels length does not match adjacency")
        A.eliminate_zeros()
        if A.nnz and (A.data < 0).any():
            raise GraphError("negative edge weight")
        if A.nnz and not np.isfinite(A.data).all():
            raise GraphError("non-finite edge weight")
        if A.diagonal().any():
            raise GraphError(f"self-loop at vertex {names[int(np.flatnonzero(A.diagonal())[0])]!r}")
        if (A != A.T).nnz:
            raise GraphError("adjacency is not symmetric")
        return cls._build(names, A)

    @classmethod
    def _from_coo(cls, names, rows, cols, vals) -> "Graph":
        n = len(names)
        r = np.asarray(rows, dtype=np.int64)
        c = np.asarray(cols, dtype=np.int64)
        w = np.asarray(vals, dtype=np.float64)
        A = sp.coo_matrix(
            (np.concatenate([w, w]), (np.concatenate([r, c]), np.concatenate([c, r]))),
            shape=(n, n),
        ).tocsr()
        A.sum_duplicates()
        A.eliminate_zeros()
        return cls._build(names, A)

    @classmethod
    def _build(cls, names, A: sp.csr_matrix) -> "Graph":
        A = sp.csr_matrix(A, dtype=np.float64, copy=True)
        A.sort_indices()
        deg = np.asarray(A.sum(axis=1)).ravel()
        return cls(tuple(names), _freeze_csr(A), _freeze(deg))


def _check_edge(i: int, j: int, w: float, names, lineno):
    if i == j:
        raise GraphFormatError(f"self-loop at vertex {names[i]!r}", lineno)
    if not np.isfinite(w):
        raise GraphFormatError(f"non-finite weight {w!r}", lineno)
    if w < 0:
        raise GraphFormatError(f"negative weight {w!r}", lineno)


def load_edge_list(
    source: TextIO | str,
    weighted: bool = True,
    sum_duplicates: bool = True,
) -> Graph:
    """Parse ``u v [w]`` lines into a :class:`Graph`.

    Blank lines and ``#`` comments are skipped; fields may be separated by
    whitespace or commas.  With ``weighted=False`` a third column is ignored.
    Duplicate undirected edges are summed unless ``sum_duplicates`` is false,
    in which case they are an error.
    """
    if isinstance(source, str):
        source = io.StringIO(source)
    index: dict[str, int] = {}
    names: list[str] = []
    rows: list[int] = []
    cols: list[int] = []
    vals: list[float] = []
    seen: set[tuple[int, int]] = set()
    for lineno, raw in enumerate(source, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = [t for t in _SPLIT.split(line) if t]
        if len(tok) not in (2, 3):
            raise GraphFormatError(f"expected 'u v [w]', got {raw.strip()!r}", lineno)
        w = 1.0
        if len(tok) == 3 and weighted:
            try:
                w = float(tok[2])
            except ValueError:
                raise GraphFormatError(f"unparsable weight {tok[2]!r}", lineno) from None
        u, v = tok[0], tok[1]
        if u == v:
            raise GraphFormatError(f"self-loop at vertex {u!r}", lineno)
        for name in (u, v):
            if name not in index:
                index[name] = len(names)
                names.append(name)
        i, j = index[u], index[v]
        _check_edge(i, j, w, names, lineno)
        key = (min(i, j), max(i, j))
        if key in seen and not sum_duplicates:
            raise GraphFormatError(f"duplicate edge {u!r}-{v!r}", lineno)
        seen.add(key)
        rows.append(i)
        cols.append(j)
        vals.append(w)
    return Graph._from_coo(names, rows, cols, vals)


def read_edge_list(path, **kwargs) -> Graph:
    with open(path, encoding="utf-8") as fh:
        return load_edge_list(fh, **kwargs)


def read_vertex_values(source: TextIO | str, cast=str) -> dict[str, object]:
    """Read ``vertex value`` pairs (labels sidecars, delay files, initial states)."""
    if isinstance(source, str):
        source = io.StringIO(source)
    out: dict[str, object] = {}
    for lineno, raw in enumerate(source, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = [t for t in _SPLIT.split(line, maxsplit=1) if t]
        if len(tok) != 2:
            raise GraphFormatError(f"expected 'vertex value', got {raw.strip()!r}", lineno)
        try:
            out[tok[0]] = cast(tok[1].strip())
        except ValueError:
            raise GraphFormatError(f"unparsable value {tok[1]!r}", lineno) from None
    return out


class VertexSet:
    """A subset of ``{0, ..., n-1}`` backed by a boolean mask."""

    __slots__ = ("_mask", "_size")

    def __init__(self, n: int, members: Iterable[int] = ()):
        mask = np.zeros(int(n), dtype=bool)
        idx = np.fromiter((int(i) for i in members), dtype=np.int64)
        if idx.size and (idx.min() < 0 or idx.max() >= n):
            raise IndexError("vertex index out of range")
        mask[idx] = True
        self._mask = _freeze(mask)
        self._size = int(mask.sum())

    @classmethod
    def from_mask(cls, mask) -> "VertexSet":
        mask = np.asarray(mask, dtype=bool)
        return cls(mask.size, np.flatnonzero(mask))

    @property
    def n(self) -> int:
        return self._mask.size

    @property
    def mask(self) -> np.ndarray:
        return self._mask

    @property
    def indices(self) -> np.ndarray:
        return np.flatnonzero(self._mask)

    def complement(self) -> "VertexSet":
        return VertexSet.from_mask(~self._mask)

    def __contains__(self, i) -> bool:
        return bool(self._mask[i])

    def __len__(self) -> int:
        return self._size

    def __iter__(self):
        return iter(self.indices.tolist())

    def __eq__(self, other) -> bool:
        if not isinstance(other, VertexSet):
            return NotImplemented
        return self.n == other.n and bool(np.array_equal(self._mask, other._mask))

    def __hash__(self):
        return hash((self.n, self._mask.tobytes()))

    def __repr__(self) -> str:
        return f"VertexSet(n={self.n}, {self.indices.tolist()})"


def _as_mask(S, n: int) -> np.ndarray:
    if isinstance(S, VertexSet):
        if S.n != n:
            raise ValueError(f"vertex set over {S.n} vertices, graph has {n}")
        return S.mask
    if isinstance(S, (set, frozenset)):
        S = sorted(S)
    S = np.asarray(S)
    if S.dtype == bool:
        if S.shape != (n,):
            raise ValueError("mask length does not match graph")
        return S
    return VertexSet(n, S.ravel()).mask


def _degrees(W) -> np.ndarray:
    return np.asarray(W.sum(axis=1)).ravel()


def cut_weight(W, S) -> float:
    """Total weight of edges with exactly one endpoint in ``S``."""
    W = sp.csr_matrix(W)
    m = _as_mask(S, W.shape[0])
    if not m.any() or m.all():
        return 0.0
    x = m.astype(np.float64)
    return float(x @ (W @ (1.0 - x)))


def generalized_volume(W, T, S) -> float:
    """``sum_{i in S} d_W[i] * tau[i]``; ``T=None`` means unit delays."""
    W = sp.csr_matrix(W)
    m = _as_mask(S, W.shape[0])
    c = _degrees(W)
    if T is not None:
        c = c * np.asarray(T, dtype=np.float64)
    return float(c[m].sum())


def giant_component(g: Graph) -> Graph:
    """Induced subgraph on the largest connected component.

    Ties go to the component containing the smallest vertex index.
    """
    if g.n == 0:
        raise GraphError("empty graph has no giant component")
    ncomp, comp = connected_components(g.adjacency, directed=False)
    if ncomp == 1:
        return g
    sizes = np.bincount(comp, minlength=ncomp)
    first = np.full(ncomp, g.n)
    np.minimum.at(first, comp, np.arange(g.n))
    best = min(range(ncomp), key=lambda k: (-sizes[k], first[k]))
    return g.subgraph(np.flatnonzero(comp == best))
