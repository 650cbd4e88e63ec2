"""Scatter data for the N=500 spectra at delta = 1e-5 ... 1e-2, plus annulus statistics.

Writes figures/delta-1e-k.csv under --out. Pass --plot to also render a PNG
grid if matplotlib happens to be installed (it is not a package dependency).
"""
import argparse
import csv
import json

from jordan_spectra.experiments import RunConfig, default_threads, run_figures


def plot(summary, out):
    import matplotlib.pyplot as plt

    fig, axes = plt.subplots(2, 2, figsize=(8, 8))
    for ax, panel in zip(axes.ravel(), summary["panels"]):
        with open(f"{out}/{panel['file']}") as fh:
            rows = list(csv.DictReader(fh))
        ax.scatter([float(r["re"]) for r in rows], [float(r["im"]) for r in rows], s=2)
        ax.set_title(f"delta = {panel['delta']:g}")
        ax.set_aspect("equal")
    fig.tight_layout()
    fig.savefig(f"{out}/figures.png", dpi=150)


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, default=500)
    p.add_argument("--seed", type=int, default=20261016)
    p.add_argument("--threads", type=int, default=default_threads())
    p.add_argument("--out", default="runs/figures")
    p.add_argument("--plot", action="store_true")
    a = p.parse_args()
    summary = run_figures(RunConfig("figures", n=a.n, seed=a.seed, threads=a.threads, out_dir=a.out))
    for panel in summary["panels"]:
        print(f"delta={panel['delta']:g}  annulus fraction {panel['annulus_fraction_sigma_0.5']:.3f}  "
              f"inner count (sigma=1) {panel['inner_count_sigma_1']} <= {panel['bound_sigma_1']:.1f}")
    if a.plot:
        plot(summary, a.out)
    print(json.dumps({"out": a.out}))


if __name__ == "__main__":
    main()
