"""Boundary statistics over many N=500 trials: containment and interior counts per sigma."""
import argparse
import json

from jordan_spectra.density import davies_hager_check, sample_spectrum
from jordan_spectra.experiments import default_threads, map_trials
from jordan_spectra.jordan import PerturbationSpec


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--n", type=int, default=500)
    p.add_argument("--delta", type=float, default=1e-5)
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--seed", type=int, default=20261016)
    p.add_argument("--threads", type=int, default=default_threads())
    a = p.parse_args()
    specs = [PerturbationSpec(n=a.n, delta=a.delta, master_seed=a.seed, trial_index=i)
             for i in range(a.trials)]
    samples = map_trials(sample_spectrum, specs, a.threads)
    out = {}
    for sigma in (0.5, 1.0):
        reps = [davies_hager_check(s, sigma) for s in samples]
        out[str(sigma)] = {
            "bound": reps[0].bound,
            "max_inner_count": max(r.inner_count for r in reps),
            "uncontained_trials": sum(not r.contained for r in reps),
            "violation_fraction": sum(not (r.contained and r.count_ok) for r in reps) / len(reps),
            "in_scope": reps[0].in_scope,
        }
    print(json.dumps(out, indent=2))


if __name__ == "__main__":
    main()
