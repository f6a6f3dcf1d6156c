"""Command-line entry point: ``popinfo {run,metrics,oracle,divergence}``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .divergence import bhattacharyya_matrix, chernoff_coefficient_matrix, kl_matrix
from .errors import PopinfoError
from .experiments import load_config, run_experiment, run_oracle
from .montecarlo import FULL_SCALE_MC


def _apply_overrides(config, args):
    changes, mc = {}, {}
    if args.seed is not None:
        changes["seed"] = args.seed
        mc["seed"] = args.seed
    if getattr(args, "jmax", None) is not None:
        mc["j_max"] = args.jmax
    if getattr(args, "imax", None) is not None:
        mc["i_max"] = args.imax
    if getattr(args, "full_scale", False):
        mc["j_max"] = FULL_SCALE_MC.j_max
    if getattr(args, "n", None):
        changes["n_values"] = args.n
    if mc:
        changes["mc"] = mc
    return config.replace(**changes) if changes else config


def _emit(result, args, config):
    out = args.out or config.output.get("csv")
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        sidecar = config.output.get("json") or str(Path(out).with_suffix(".json"))
        result.write(out, sidecar)
        print(f"wrote {out} and {sidecar}", file=sys.stderr)
    else:
        sys.stdout.write(result.to_csv())


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="popinfo", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("config", help="preset name (fig1..fig6) or path to a JSON config")
        p.add_argument("--seed", type=int, help="override population and Monte-Carlo seeds")
        p.add_argument("--n", type=int, nargs="+", help="override the N sweep")
        p.add_argument("--out", help="CSV path (a JSON sidecar is written next to it)")

    run = sub.add_parser("run", help="metrics plus Monte-Carlo reference and relative errors")
    common(run)
    run.add_argument("--jmax", type=int, help="Monte-Carlo sample count")
    run.add_argument("--imax", type=int, help="bootstrap replicates")
    run.add_argument("--full-scale", action="store_true", help="use j_max = 500000")

    common(sub.add_parser("metrics", help="closed-form metrics only, no Monte-Carlo"))

    oracle = sub.add_parser("oracle", help="exact mutual information by enumeration (tiny instances)")
    common(oracle)
    oracle.add_argument("--tail-tol", type=float, default=1e-14)

    div = sub.add_parser("divergence", help="dump a divergence matrix as CSV")
    common(div)
    div.add_argument("--kind", choices=["kl", "chernoff", "bhattacharyya"], default="kl")
    div.add_argument("--beta", type=float, default=0.5)

    args = parser.parse_args(argv)
    try:
        config = _apply_overrides(load_config(args.config), args)
        if args.command == "run":
            _emit(run_experiment(config, progress=lambda n: print(f"N={n} done", file=sys.stderr)), args, config)
        elif args.command == "metrics":
            _emit(run_experiment(config, monte_carlo=False), args, config)
        elif args.command == "oracle":
            _emit(run_oracle(config, args.tail_tol), args, config)
        else:
            pop = config.population(config.n_values[-1])
            if args.kind == "kl":
                mat = kl_matrix(pop)
            elif args.kind == "bhattacharyya":
                mat = bhattacharyya_matrix(pop)
            else:
                mat = chernoff_coefficient_matrix(pop, args.beta)
            text = mat.to_csv()
            if args.out:
                Path(args.out).write_text(text)
            else:
                sys.stdout.write(text)
    except PopinfoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
