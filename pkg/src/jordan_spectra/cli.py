import argparse
import json
import logging
import sys

from .experiments import COMMANDS, RunConfig, run

_FIELDS = ("n", "delta", "trials", "seed", "sigma", "r_max", "out_dir", "threads", "kind")


def build_parser():
    p = argparse.ArgumentParser(
        prog="jordan-spectra",
        description="Monte Carlo spectra of randomly perturbed Jordan blocks.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--n", type=int, help="matrix dimension N")
    p.add_argument("--delta", type=float, help="coupling constant")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--sigma", type=float, help="Davies-Hager radius parameter")
    p.add_argument("--r-max", dest="r_max", type=float)
    p.add_argument("--out", dest="out_dir", help="output directory")
    p.add_argument("--threads", type=int, help="worker threads (default $JORDAN_SPECTRA_THREADS or 1)")
    p.add_argument("--kind", choices=("gaussian", "rank-one"))
    p.add_argument("--config", help="JSON file with any of the above; flags take precedence")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def config_from_args(args):
    overrides = {k: getattr(args, k) for k in _FIELDS}
    if args.config:
        return RunConfig.from_file(args.config, command=args.command, **overrides)
    given = {k: v for k, v in overrides.items() if v is not None}
    if args.command == "figures" and "n" not in given:
        given["n"] = 500
    return RunConfig(command=args.command, **given)


def _passed(result):
    if "all_pass" in result:
        return result["all_pass"]
    if "status" in result:
        return result["status"] == "pass"
    return True


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        config = config_from_args(args)
    except (ValueError, TypeError, OSError) as exc:
        print(f"jordan-spectra: {exc}", file=sys.stderr)
        return 2
    result = run(config)
    brief = {k: v for k, v in result.items() if k not in ("equivalences", "invariants", "panels")}
    print(json.dumps(brief, indent=2, sort_keys=True, default=str))
    return 0 if _passed(result) else 1


if __name__ == "__main__":
    sys.exit(main())
