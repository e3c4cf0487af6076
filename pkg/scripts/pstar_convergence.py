"""p* for catalog graphon k at growing sample counts, with the empirical
cycle-cover probability of K_y at large n for comparison.

    python scripts/pstar_convergence.py
"""

import argparse

from graphon_cycles.experiments import empirical_probability
from graphon_cycles.graphon import catalog
from graphon_cycles.stochastic import default_workers, estimate_p_star


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--threads", type=int, default=default_workers())
    args = parser.parse_args()
    w = catalog("k")
    for samples in (10**4, 10**5, 10**6, 4 * 10**6):
        est = estimate_p_star(w, samples, args.seed, args.threads)
        print(f"samples={samples:>8d}  p*={est.mean:.5f}  stderr={est.stderr:.5f}")
    for n in (1000, 4000):
        b = empirical_probability(w, n, 20_000, args.seed, 1)
        print(f"n={n:>5d}  P_n={b.p_hat:.5f}  stderr={b.stderr:.5f}")


if __name__ == "__main__":
    main()
