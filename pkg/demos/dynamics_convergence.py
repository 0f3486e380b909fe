"""How fast each process forgets where it started.

A walker starts on vertex 0 of the karate graph.  The distance to the
stationary distribution decays like exp(-lambda2 t), so the operators with
delays (small lambda2) converge visibly slower.  The retention of the
Officer faction is printed alongside its conductance, the rate at which
mass first leaks out.

    python demos/dynamics_convergence.py
"""
import numpy as np

from gendyn import (RANDOM_WALK, SPECIAL_CASES, load_karate, make_operator, retention_check,
                    second_eigenpair, stationary_distribution, trajectory)


def main():
    g, labels = load_karate()
    times = [0, 10, 50, 100, 200, 500]
    x0 = np.zeros(g.n)
    x0[0] = 1.0

    print("max |theta(t) - pi| from a walker on vertex 0")
    print(f"{'operator':20s} {'lambda2':>8} " + " ".join(f"{'t=' + str(t):>9}" for t in times))
    for kind in SPECIAL_CASES:
        op = make_operator(g, kind, RANDOM_WALK)
        pi = stationary_distribution(op).values
        errs = [np.abs(s.values - pi).max() for s in trajectory(op, x0, times)]
        lam = second_eigenpair(op).eigenvalue
        print(f"{kind:20s} {lam:8.4f} " + " ".join(f"{e:9.1e}" for e in errs))

    op = make_operator(g, "normalized_laplacian")
    officer = [g.index(v) for v, f in labels.items() if f == "Officer"]
    rep = retention_check(op, officer, [0, 1, 2, 5, 10])
    print(f"\nOfficer faction retention (conductance {rep.conductance:.4f})")
    for t, r, d in zip(rep.t, rep.retention, rep.derivative):
        print(f"  t={t:4.0f}  retained={r:.4f}  dTheta/dt={d:+.4f}")


if __name__ == "__main__":
    main()
