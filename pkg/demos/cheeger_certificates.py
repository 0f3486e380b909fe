"""Cheeger certificates on small random graphs.

For each graph the exact minimum conductance comes from exhaustive
enumeration, so both sides of phi^2/2 <= lambda2 <= 2 phi can be checked
along with the sweep guarantee h <= sqrt(2 lambda2).

    python demos/cheeger_certificates.py [--graphs 10] [--seed 1]
"""
import argparse

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from gendyn import (SPECIAL_CASES, brute_force_conductance, cheeger_check, make_operator,
                    second_eigenpair, sweep_partition)


def random_graph(rng, n):
    while True:
        U = np.triu(rng.random((n, n)) < 0.4, 1)
        A = sp.csr_matrix((U | U.T).astype(float))
        if connected_components(A, directed=False)[0] == 1:
            return A


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--graphs", type=int, default=10)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    print(f"{'graph':>5} {'operator':20s} {'phi^2/2':>8} {'lambda2':>8} {'2phi':>8} {'h':>8} {'bound':>8}  ok")
    for k in range(args.graphs):
        A = random_graph(rng, int(rng.integers(5, 11)))
        for kind in SPECIAL_CASES:
            op = make_operator(A, kind)
            eig = second_eigenpair(op)
            phi, _ = brute_force_conductance(op)
            part, _ = sweep_partition(None, op, eig)
            rep = cheeger_check(eig.eigenvalue, part.conductance, phi, eig.epsilon, float(op.tau.min()))
            print(f"{k:5d} {kind:20s} {phi ** 2 / 2:8.4f} {rep.lambda2:8.4f} {2 * phi:8.4f} "
                  f"{rep.h_sweep:8.4f} {rep.sweep_bound:8.4f}  {rep.passed}")


if __name__ == "__main__":
    main()
