"""Headline Monte Carlo run: interior eigenvalue density of N=100 Jordan blocks at delta=1e-8.

    python3 scripts/headline_density.py --trials 2000 --seed 20261016 --out runs/headline
"""
import argparse
import json
import logging

from jordan_spectra.experiments import RunConfig, default_threads, run_density


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--delta", type=float, default=1e-8)
    p.add_argument("--trials", type=int, default=2000)
    p.add_argument("--seed", type=int, default=20261016)
    p.add_argument("--r-max", type=float, default=0.6)
    p.add_argument("--threads", type=int, default=default_threads())
    p.add_argument("--out", default="runs/headline")
    a = p.parse_args()
    logging.basicConfig(level=logging.INFO)
    verdict = run_density(RunConfig("density", n=a.n, delta=a.delta, trials=a.trials, seed=a.seed,
                                    r_max=a.r_max, threads=a.threads, out_dir=a.out))
    print(json.dumps(verdict, indent=2, default=str))


if __name__ == "__main__":
    main()
