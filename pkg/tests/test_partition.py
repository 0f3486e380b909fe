import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gendyn.graph import VertexSet, cut_weight
from gendyn.operators import CONSENSUS, RANDOM_WALK, SPECIAL_CASES, SYMMETRIC, make_operator
from gendyn.partition import (brute_force_conductance, cheeger_check, generalized_conductance,
                              sweep_partition, sweep_profile)
from gendyn.spectra import EigenResult, SpectralError, second_eigenpair

from conftest import complete, corpus, cycle, path, random_connected


def naive_phi(op):
    """Independent oracle: itertools over all proper subsets, plain Python sums."""
    n = op.n
    W = op.W.toarray()
    c = op.centrality
    best = np.inf
    for k in range(1, n):
        for S in itertools.combinations(range(n), k):
            inS = np.zeros(n, bool)
            inS[list(S)] = True
            cut = W[inS][:, ~inS].sum()
            best = min(best, cut / min(c[inS].sum(), c[~inS].sum()))
    return best


@pytest.mark.parametrize("A, S, h", [(complete(2), [0], 1.0), (cycle(4), [0, 1], 0.5),
                                     (path(3), [0], 1.0), (path(3), [1], 1.0),
                                     (path(3), [2], 1.0)])
def test_conductance_examples(A, S, h):
    assert generalized_conductance(make_operator(A, "normalized_laplacian"), S) == pytest.approx(h)


def test_conductance_rejects_trivial_sets():
    op = make_operator(cycle(4), "normalized_laplacian")
    for S in ([], [0, 1, 2, 3]):
        with pytest.raises(ValueError):
            generalized_conductance(op, S)


@pytest.mark.parametrize("A, phi", [(path(3), 1.0), (cycle(4), 0.5), (cycle(6), 1 / 3)])
def test_brute_force_examples(A, phi):
    val, S = brute_force_conductance(make_operator(A, "normalized_laplacian"))
    assert val == pytest.approx(phi, abs=1e-12)
    assert 0 in S


def test_brute_force_c4_adjacent_pair():
    _, S = brute_force_conductance(make_operator(cycle(4), "normalized_laplacian"))
    assert S == VertexSet(4, [0, 1])


def test_brute_force_matches_naive_oracle():
    for A in corpus(size=12):
        for kind in SPECIAL_CASES:
            op = make_operator(A, kind)
            phi, S = brute_force_conductance(op)
            assert phi == pytest.approx(naive_phi(op), rel=1e-12)
            assert generalized_conductance(op, S) == pytest.approx(phi, rel=1e-12)


def test_brute_force_size_limit():
    with pytest.raises(ValueError):
        brute_force_conductance(make_operator(cycle(13), "normalized_laplacian"))


def test_sweep_examples():
    op = make_operator(complete(2), "normalized_laplacian")
    part, prof = sweep_partition(None, op, second_eigenpair(op))
    assert len(part.side) == 1 and part.conductance == 1.0 and part.bound == pytest.approx(2.0)
    op = make_operator(cycle(4), "normalized_laplacian")
    part, _ = sweep_partition(None, op, second_eigenpair(op))
    assert part.conductance == pytest.approx(0.5)


def test_sweep_order_and_ties():
    op = make_operator(cycle(4), "normalized_laplacian")
    prof = sweep_profile(op, np.array([1.0, 1.0, -1.0, -1.0]))
    assert prof.order.tolist() == [0, 1, 2, 3]
    prof = sweep_profile(op, np.array([0.0, 0.0, 0.0, 0.0]))
    assert prof.order.tolist() == [0, 1, 2, 3]
    assert prof.best == 1 and prof.h.tolist() == [1.0, 0.5, 1.0]
    # argmin ties go to the smallest prefix
    prof = sweep_profile(make_operator(path(3), "normalized_laplacian"), np.array([1.0, 0, -1]))
    assert prof.best == 0


def test_sweep_profile_matches_recomputation():
    rng = np.random.default_rng(4)
    for A in corpus(size=10):
        for kind in SPECIAL_CASES:
            op = make_operator(A, kind)
            f = rng.standard_normal(op.n)
            prof = sweep_profile(op, f)
            assert np.all(np.diff(prof.vol_S) > 0)
            for i in range(op.n - 1):
                S = prof.order[: i + 1]
                assert prof.cut[i] == pytest.approx(cut_weight(op.W, S), abs=1e-10)
                assert prof.h[i] == pytest.approx(generalized_conductance(op, S), abs=1e-10)


def test_local_minima():
    op = make_operator(cycle(6), "normalized_laplacian")
    prof = sweep_profile(op, np.array([3.0, 2, 1, -1, -2, -3]))
    assert prof.h_min == pytest.approx(1 / 3)
    assert prof.local_minima().tolist() == [2]


def test_rho_invariance_and_uniform_scaling():
    for A in corpus(size=15):
        for kind in SPECIAL_CASES:
            sides = []
            for rho in (RANDOM_WALK, SYMMETRIC, CONSENSUS):
                op = make_operator(A, kind, rho)
                sides.append(sweep_partition(None, op, second_eigenpair(op))[0])
            assert sides[0].side == sides[1].side == sides[2].side
            op = make_operator(A, kind)
            base = sweep_partition(None, op, second_eigenpair(op))[0]
            for gamma in (1.5, 4.0):
                sc = op.scaled(gamma)
                p = sweep_partition(None, sc, second_eigenpair(sc))[0]
                assert p.side == base.side
                assert p.conductance == pytest.approx(base.conductance / gamma, rel=1e-9)


def test_kernel_component_ignored():
    op = make_operator(cycle(8), "normalized_laplacian")
    good = second_eigenpair(op)
    shifted = EigenResult(good.eigenvalue, good.eigenvector + 3 * op.kernel_vector(), 0.0, 0)
    a, b = sweep_partition(None, op, good)[0], sweep_partition(None, op, shifted)[0]
    assert a.side == b.side and a.bound == pytest.approx(b.bound)


def test_sweep_guarantee_enforced(monkeypatch):
    import gendyn.spectra
    op = make_operator(cycle(8), "normalized_laplacian")
    good = second_eigenpair(op)
    monkeypatch.setattr(gendyn.spectra, "rayleigh_quotient", lambda op, u: 1e-6)
    with pytest.raises(SpectralError, match="guarantee"):
        sweep_partition(None, op, good)


def test_graph_size_mismatch(karate):
    g, _ = karate
    op = make_operator(cycle(4), "normalized_laplacian")
    with pytest.raises(ValueError):
        sweep_partition(g, op, second_eigenpair(op))


def test_cheeger_report_examples():
    r = cheeger_check(2.0, 1.0, phi_exact=1.0)
    assert r.lower_ok and r.upper_ok and r.sweep_ok and r.passed
    assert r.lambda2 == 2 * r.phi
    r = cheeger_check(1.0, 0.5, phi_exact=0.5)
    assert r.passed
    r = cheeger_check(1.0, 0.5, phi_exact=0.4)
    assert r.upper_ok is False and not r.passed
    r = cheeger_check(0.01, 0.9)
    assert r.sweep_ok is False and r.phi is None and not r.passed
    r = cheeger_check(0.5, 0.4, phi_exact=2.0, tau_min=0.5)
    assert r.lower_ok is None
    d = r.to_dict()
    assert "timings" not in d and d["passed"] == r.passed


def test_cheeger_booleans_recomputable():
    r = cheeger_check(0.3, 0.5, phi_exact=0.45, epsilon=0.01, timings={"x": 1.0})
    d = r.to_dict(include_timings=True)
    assert d["timings"] == {"x": 1.0}
    assert d["lower_ok"] == (d["phi"] ** 2 / 2 <= d["lambda2"] + 1e-9)
    assert d["upper_ok"] == (d["lambda2"] <= 2 * d["phi"] + 1e-9)
    assert d["sweep_ok"] == (d["h_sweep"] <= np.sqrt(2 * (1 + d["epsilon"]) * d["lambda2"]) + 1e-9)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 100_000), st.sampled_from(SPECIAL_CASES))
def test_property_cheeger_sandwich(seed, kind):
    A = random_connected(np.random.default_rng(seed), 4, 10)
    op = make_operator(A, kind)
    eig = second_eigenpair(op)
    part, _ = sweep_partition(None, op, eig)
    phi, _ = brute_force_conductance(op)
    lam = eig.eigenvalue
    assert phi ** 2 / 2 <= lam + 1e-9
    assert lam <= 2 * phi + 1e-9
    assert phi <= part.conductance + 1e-12
    assert part.conductance <= np.sqrt(2 * (1 + eig.epsilon) * lam) + 1e-9
