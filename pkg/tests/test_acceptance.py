"""End-to-end acceptance checks, one test per criterion.

Each test prints a ``CRITERION k: PASS|FAIL|SKIP ...`` line (also collected
into the pytest terminal summary) with the tolerance used and the runtime.
Run directly with ``python tests/test_acceptance.py`` for just those lines.
"""
import math
import time

import numpy as np
import pytest
import scipy.linalg as sla

from gendyn.datasets import PACIFIC_TEN, DatasetUnavailable, karate_factions, load_football, load_karate
from gendyn.dynamics import (conserved_projection, evolve, mixing_bound_check, retention_check,
                             stationary_distribution)
from gendyn.operators import CONSENSUS, RANDOM_WALK, SPECIAL_CASES, SYMMETRIC, make_operator
from gendyn.partition import brute_force_conductance, cheeger_check, sweep_partition
from gendyn.spectra import epsilon_certificate, second_eigenpair

from conftest import complete, corpus, cycle, dense_operator, dense_spectrum, path

RESULTS: list[str] = []


def report(k, status, detail, t0):
    line = f"CRITERION {k}: {status} {detail} [{time.perf_counter() - t0:.2f}s]"
    RESULTS.append(line)
    print(line)
    return status


def conclude(k, ok, detail, t0, budget=None):
    elapsed = time.perf_counter() - t0
    if budget is not None and elapsed >= budget:
        ok = False
        detail += f" runtime {elapsed:.2f}s exceeds {budget}s"
    report(k, "PASS" if ok else "FAIL", detail, t0)
    assert ok, detail


def test_criterion_1_cheeger_sandwich():
    t0 = time.perf_counter()
    bad, worst_eps = [], 0.0
    for gi, A in enumerate(corpus()):
        for kind in SPECIAL_CASES:
            op = make_operator(A, kind)
            eig = second_eigenpair(op)
            lam_ref = dense_spectrum(op)[1]
            eps = epsilon_certificate(op, eig.eigenvector, lam_ref)
            worst_eps = max(worst_eps, eps)
            phi, _ = brute_force_conductance(op)
            part, _ = sweep_partition(None, op, eig)
            rep = cheeger_check(eig.eigenvalue, part.conductance, phi, eps, float(op.tau.min()))
            ok = rep.passed and rep.lower_ok and rep.upper_ok and phi <= part.conductance + 1e-9
            if not ok:
                bad.append((gi, kind))
    conclude(1, not bad, f"200 graph-operator pairs, slack 1e-9, max eps {worst_eps:.1e}, "
                         f"failures {bad}", t0, budget=30)


def test_criterion_2_hand_spectra():
    t0 = time.perf_counter()
    got = {name: second_eigenpair(make_operator(A, "normalized_laplacian")).eigenvalue
           for name, A in (("P3", path(3)), ("C4", cycle(4)), ("K2", complete(2)))}
    want = {"P3": 1.0, "C4": 1.0, "K2": 2.0}
    phis = {name: brute_force_conductance(make_operator(A, "normalized_laplacian"))[0]
            for name, A in (("C4", cycle(4)), ("C6", cycle(6)))}
    ok = all(abs(got[k] - want[k]) <= 1e-8 for k in want)
    ok &= abs(phis["C4"] - 0.5) <= 1e-12 and abs(phis["C6"] - 1 / 3) <= 1e-12
    conclude(2, ok, f"lambda2 {got} tol 1e-8, phi {phis}", t0, budget=1)


def test_criterion_3_karate_bisections():
    t0 = time.perf_counter()
    g, _ = load_karate()
    hi, off = karate_factions()
    truth = set(hi.tolist())
    diffs = {}
    for kind in SPECIAL_CASES:
        op = make_operator(g, kind)
        part, _ = sweep_partition(g, op, second_eigenpair(op))
        side = set(part.side)
        diffs[kind] = min(len(side ^ truth), len(side ^ set(off.tolist())))
    ok = (g.n, g.edge_count) == (34, 78) and max(diffs.values()) <= 3
    conclude(3, ok, f"n={g.n} m={g.edge_count}, faction mismatches {diffs} (limit 3)", t0, budget=5)


def test_criterion_4_football_pac10():
    t0 = time.perf_counter()
    try:
        g, lab = load_football()
    except DatasetUnavailable as e:
        report(4, "SKIP", f"football data not available ({e})", t0)
        pytest.skip("football data not available")
    pac = {g.index(v) for v, x in lab.items() if x in PACIFIC_TEN}
    comp = set(range(g.n)) - pac
    found = {}
    for kind in SPECIAL_CASES:
        op = make_operator(g, kind)
        _, prof = sweep_partition(g, op, second_eigenpair(op))
        found[kind] = any(set(prof.prefix(i).tolist()) in (pac, comp) for i in prof.local_minima())
    conclude(4, len(pac) == 10 and all(found.values()),
             f"Pac-10 size {len(pac)}, local-minimum prefix found {found}", t0, budget=10)


def test_criterion_5_stationary_convergence():
    # gated on the plain random walk; the delay-scaled operators mix more
    # slowly (gap ~0.027 on karate) and are reported for information only
    t0 = time.perf_counter()
    g, _ = load_karate()
    errs = {}
    for kind in SPECIAL_CASES:
        op = make_operator(g, kind, RANDOM_WALK)
        c = op.centrality
        pi = c / c.sum()
        x = np.zeros(g.n)
        x[0] = 1.0
        errs[kind] = float(np.abs(evolve(op, x, 500.0).values - pi).max())
        assert np.allclose(stationary_distribution(op).values, pi, rtol=1e-14)
    info = ", ".join(f"{k}={v:.1e}" for k, v in errs.items() if k != "normalized_laplacian")
    conclude(5, errs["normalized_laplacian"] <= 1e-8,
             f"random walk max|theta(500)-pi| {errs['normalized_laplacian']:.1e} tol 1e-8 "
             f"(other operators, informational: {info})", t0, budget=5)


def test_criterion_6_conservation_and_similarity():
    t0 = time.perf_counter()
    rng = np.random.default_rng(6)
    graphs = corpus() + [load_karate()[0].adjacency]
    drift, spread = 0.0, 0.0
    for A in graphs:
        for kind in SPECIAL_CASES:
            base = make_operator(A, kind)
            for rho in (RANDOM_WALK, SYMMETRIC, CONSENSUS):
                op = base.with_rho(rho)
                x = rng.standard_normal(op.n)
                p0 = conserved_projection(op, x)
                state = x
                for _ in range(10):
                    state = evolve(op, state, 1.0).values
                    drift = max(drift, abs(conserved_projection(op, state) - p0) / max(abs(p0), 1.0))
            spectra = [np.sort(sla.eigvals(dense_operator(base.W, base.tau, rho)).real)
                       for rho in (RANDOM_WALK, SYMMETRIC, CONSENSUS)]
            scale = max(np.abs(spectra[1]).max(), 1e-300)
            for s in spectra:
                spread = max(spread, np.abs(s - spectra[1]).max() / scale)
    conclude(6, drift <= 1e-10 and spread <= 1e-8,
             f"{len(graphs)} graphs x 4 operators x 3 bases, drift {drift:.1e} (tol 1e-10), "
             f"eigenvalue spread {spread:.1e} (tol 1e-8)", t0)


def half_volume_sets(op, count, rng):
    c = op.centrality
    half = op.volume / 2
    out = []
    while len(out) < count:
        order = rng.permutation(op.n)
        k = int(np.searchsorted(np.cumsum(c[order]), half, side="right"))
        S = np.sort(order[: max(k, 1)])
        if 0 < len(S) < op.n and c[S].sum() <= half:
            out.append(S)
    return out


def test_criterion_7_appendix_bounds():
    t0 = time.perf_counter()
    g, _ = load_karate()
    op = make_operator(g, "normalized_laplacian")
    grid = np.arange(0.0, 10.5, 0.5)
    sets = half_volume_sets(op, 20, np.random.default_rng(7))
    ret_fail = [i for i, S in enumerate(sets) if not retention_check(op, S, grid).passed]
    k2 = make_operator(complete(2), "normalized_laplacian")
    mixes = [mixing_bound_check(k2, 0, 1, t) for t in (1.0, 5.0, 20.0)]
    k2_exact = all(abs(m.lhs - 0.5 * math.exp(-2 * m.t)) <= 1e-12 for m in mixes)
    mixes += [mixing_bound_check(op, g.index("0"), g.index("33"), t) for t in (1.0, 5.0, 20.0)]
    mix_fail = [(m.u, m.v, m.t) for m in mixes if not m.passed]
    conclude(7, not ret_fail and not mix_fail and k2_exact,
             f"retention on {len(sets)} sets (mono tol 1e-9, deriv tol 1e-6) failures {ret_fail}; "
             f"mixing K2 + karate(0,33) at t=1,5,20 failures {mix_fail}", t0, budget=30)


def replicator_error(g):
    op = make_operator(g, "replicator")
    lam, V = np.linalg.eigh(g.adjacency.toarray())
    want = lam[-1] * V[:, -1] ** 2
    return float(np.abs(op.dW - want).max() / np.abs(want).max())


def test_criterion_8_replicator_identity():
    t0 = time.perf_counter()
    err = replicator_error(load_karate()[0])
    try:
        fb = replicator_error(load_football()[0])
        detail = f"karate rel err {err:.1e}, football rel err {fb:.1e}"
    except DatasetUnavailable:
        fb = None
        detail = f"karate rel err {err:.1e}, football part not checked (data not available)"
    ok = err <= 1e-8 and (fb is None or fb <= 1e-8)
    conclude(8, ok, detail + " tol 1e-8", t0)


def test_criterion_9_declared_out_of_scope():
    t0 = time.perf_counter()
    report(9, "SKIP", "house, blogs, facebook and power results need external data and manual "
                      "layout; declared not reproducible here", t0)
    pytest.skip("declared not reproducible without external datasets")


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q", "-s"]))
