"""Command-line entry point: ``fdnoma <subcommand> [options]``."""

import argparse
import logging
import sys

from . import driver, model, optimizer, sdp, sinr
from .model import ConfigError

log = logging.getLogger("fdnoma")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3


def _common(sp):
    sp.add_argument("--config", help="flat key = value config file")
    sp.add_argument("--seed", type=int, help="64-bit master seed")
    sp.add_argument("-v", "--verbose", action="count", default=0,
                    help="diagnostics on stderr (-vv for line-search traces)")


def build_parser():
    ap = argparse.ArgumentParser(prog="fdnoma", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    rr = sub.add_parser("rate-region", help="Monte Carlo rate-region sweep to CSV")
    _common(rr)
    rr.add_argument("--trials", type=int, help="number of channel draws")
    rr.add_argument("--out", help="CSV output path (default: stdout)")
    rr.add_argument("--workers", type=int, help="worker processes")

    si = sub.add_parser("single", help="diagnostic dump for one channel draw")
    _common(si)
    si.add_argument("--trial", type=int, default=0)
    si.add_argument("--rbar", type=float, required=True)
    si.add_argument("--out", help="write the dump here instead of stdout")

    oc = sub.add_parser("oracle-check", help="line search vs. brute-force grid (Nt = 2)")
    _common(oc)
    oc.add_argument("--trials", type=int, default=10, help="number of channel draws")
    oc.add_argument("--out", help="write the report here instead of stdout")

    sd = sub.add_parser("sdp-debug", help="dump the relaxed problem at one BS power and solve it")
    _common(sd)
    sd.add_argument("--trial", type=int, default=0)
    sd.add_argument("--rbar", type=float, required=True)
    sd.add_argument("--ps-fraction", type=float, default=1.0,
                    help="BS power as a fraction of the way from v to ps_max")
    sd.add_argument("--out", help="write the dump here instead of stdout")
    return ap


def _load_config(args):
    cfg = driver.load_experiment_config(args.config) if args.config else driver.ExperimentConfig()
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if getattr(args, "trials", None) is not None and args.command == "rate-region":
        changes["n_trials"] = args.trials
    if getattr(args, "workers", None) is not None:
        changes["workers"] = args.workers
    if getattr(args, "out", None) and args.command == "rate-region":
        changes["output_path"] = args.out
    return cfg.replace(**changes) if changes else cfg


def _emit(text, path):
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _sdp_debug(cfg, args):
    p = cfg.params
    ch = model.sample_channels(p, model.trial_rng(cfg.seed, args.trial))
    r_t = float(sinr.r_tilde_of(args.rbar))
    top = sinr.q_bounds(p, ch, sinr.ps_max(p, ch), r_t)
    if top.v > top.ps_max:
        raise ConfigError(f"empty BS power interval: v={top.v:.6g} > ps_max={top.ps_max:.6g}")
    Ps = top.v + args.ps_fraction * (top.ps_max - top.v)
    prob = optimizer.build_sdr(p, ch, Ps, r_t)
    sol = sdp.solve(prob)
    return f"# Ps={Ps!r}\n" + sdp.dump_problem(prob) + sdp.dump_solution(sol)


def run(args):
    cfg = _load_config(args)
    if args.command == "rate-region":
        res = driver.run_rate_region(cfg, write=bool(cfg.output_path))
        if not cfg.output_path:
            sys.stdout.write(driver.format_csv(res.rows))
        if res.numerical_failures:
            print(f"numerical failures: {res.numerical_failures}", file=sys.stderr)
    elif args.command == "single":
        _emit(driver.run_single(cfg, args.trial, args.rbar), args.out)
    elif args.command == "oracle-check":
        rep = driver.run_oracle_check(cfg, args.trials)
        _emit(rep.format(), args.out)
        return EXIT_OK if rep.sandwich_ok else 1
    elif args.command == "sdp-debug":
        _emit(_sdp_debug(cfg, args), args.out)
    return EXIT_OK


def main(argv=None):
    args = build_parser().parse_args(argv)
    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    try:
        return run(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO
