"""Shared fixtures and independent dense oracles.

Oracles here use dense numpy/scipy linear algebra on explicitly assembled
matrices and never call the package's solvers.
"""
import numpy as np
import pytest
import scipy.linalg as sla
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from gendyn.datasets import DatasetUnavailable, load_football, load_karate

CORPUS_SEED = 20240613
CORPUS_SIZE = 50


def adjacency(edges, n=None):
    edges = list(edges)
    if n is None:
        n = 1 + max(max(e[:2]) for e in edges)
    A = np.zeros((n, n))
    for e in edges:
        w = e[2] if len(e) > 2 else 1.0
        A[e[0], e[1]] = A[e[1], e[0]] = w
    return sp.csr_matrix(A)


def path(n):
    return adjacency([(i, i + 1) for i in range(n - 1)])


def cycle(n):
    return adjacency([(i, (i + 1) % n) for i in range(n)])


def complete(n):
    return adjacency([(i, j) for i in range(n) for j in range(i + 1, n)])


def star(k):
    return adjacency([(0, i) for i in range(1, k + 1)])


def random_connected(rng, n_lo=4, n_hi=12):
    while True:
        n = int(rng.integers(n_lo, n_hi + 1))
        p = rng.uniform(0.25, 0.7)
        U = np.triu(rng.random((n, n)) < p, 1)
        A = sp.csr_matrix((U | U.T).astype(float))
        if connected_components(A, directed=False)[0] == 1:
            return A


def corpus(seed=CORPUS_SEED, size=CORPUS_SIZE):
    rng = np.random.default_rng(seed)
    return [random_connected(rng) for _ in range(size)]


def dense_operator(W, tau, rho):
    """Assembled directly from the defining formula."""
    W = np.asarray(W.todense() if sp.issparse(W) else W, dtype=float)
    d = W.sum(axis=1)
    c = d * tau
    return np.diag(c ** (-0.5 - rho)) @ (np.diag(d) - W) @ np.diag(c ** (-0.5 + rho))


def dense_spectrum(op):
    return sla.eigh(dense_operator(op.W, op.tau, 0.0), eigvals_only=True)


def dense_propagate(op, x, t):
    """exp(-tL) x through the eigendecomposition of the symmetric form."""
    c = op.centrality
    lam, V = sla.eigh(dense_operator(op.W, op.tau, 0.0))
    E = V @ np.diag(np.exp(-t * lam)) @ V.T
    # L_rho = c^(-rho) L_sym c^(rho)
    return (c ** (-op.rho))[:, None] * E * (c ** op.rho)[None, :] @ x


@pytest.fixture(scope="session")
def karate():
    return load_karate()


@pytest.fixture(scope="session")
def football():
    try:
        return load_football()
    except DatasetUnavailable as e:
        pytest.skip(f"football dataset not available: {e}")


@pytest.fixture(scope="session")
def graph_corpus():
    return corpus()


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)
