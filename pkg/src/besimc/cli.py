"""Command line interface.

Exit codes: 0 success, 1 I/O failure, 2 bad arguments or input, 3 estimator
domain error, 4 Monte Carlo underfill.
"""

import argparse
import os
import sys
from pathlib import Path

from . import simharness as sh
from .condexp import DEFAULT_MAX_DRAWS, BallQuery, BivariateNormalSource, TrigSource, estimate_until_hits
from .distributions import BivariateNormalParams, HalfNormalParams, RandomStream
from .errors import DomainError, NoHits, Underfilled
from .hn_estimators import Sample
from .mre_location import MreLocationConfig, mre_location

DEFAULT_SEED = 1
SEED_ENV = "BESIMC_SEED"

EXIT_OK, EXIT_IO, EXIT_USAGE, EXIT_DOMAIN, EXIT_UNDERFILL = 0, 1, 2, 3, 4

_EXAMPLES = {
    "1a": (BivariateNormalSource, 1.0),
    "1b": (TrigSource, 0.5),
}


class _InputError(Exception):
    pass


def _fmt(x):
    return format(float(x), ".10g")


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected an integer >= 1, got {value}")
    return value


def _positive_float(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not value > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return value


def _fraction(text):
    value = _positive_float(text)
    if not value < 1:
        raise argparse.ArgumentTypeError(f"expected a number in (0, 1), got {text!r}")
    return value


def _count(text):
    # accepts 1e7-style input for draw budgets
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value != int(value) or value < 1:
        raise argparse.ArgumentTypeError(f"expected an integer >= 1, got {text!r}")
    return int(value)


def _seed_value(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}") from None
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return value


def _resolve_seed(args, parser):
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    if env is None or env.strip() == "":
        return DEFAULT_SEED
    try:
        return _seed_value(env.strip())
    except argparse.ArgumentTypeError as exc:
        parser.error(f"{SEED_ENV}: {exc}")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="besimc",
        description="Window Monte Carlo conditional expectations and half-normal estimators.",
    )
    sub = parser.add_subparsers(dest="command", metavar="{condexp,estimate,simulate,tables}")
    sub.required = True

    def seed_arg(p):
        p.add_argument("--seed", type=_seed_value, default=None,
                       help=f"random seed (falls back to ${SEED_ENV}, then {DEFAULT_SEED})")

    p = sub.add_parser("tables", help="regenerate the reference simulation tables as CSV")
    p.add_argument("--which", type=int, nargs="+", choices=range(1, 6), default=[1, 2, 3, 4, 5],
                   metavar="{1,2,3,4,5}")
    p.add_argument("--out", default=".", help="output directory for tableK.csv files")
    p.add_argument("--replications", type=_positive_int, default=None,
                   help="override the default replication counts")
    seed_arg(p)

    p = sub.add_parser("estimate", help="apply one estimator to a data file")
    p.add_argument("estimator", choices=sorted(sh.ESTIMATORS))
    p.add_argument("input", help="one observation per line ('-' for stdin)")
    p.add_argument("--eta0", type=_positive_float, help="known scale (pitman_location)")
    p.add_argument("--xi0", type=float, help="known location (*_known_location)")
    p.add_argument("--samples-per-n", type=_positive_int, default=100)
    p.add_argument("--epsilon-fraction", type=_fraction, default=0.5)
    p.add_argument("--shift", choices=("per_vector", "global"), default="per_vector")
    seed_arg(p)

    p = sub.add_parser("condexp", help="run a built-in conditional expectation example")
    p.add_argument("--example", choices=sorted(_EXAMPLES), default="1a",
                   help="1a: E(Y|X=1); 1b: E(sin XY | cos(X^2+Y^2)=0.5)")
    p.add_argument("--epsilon", type=_positive_float, default=0.1)
    p.add_argument("--target-hits", type=_positive_int, default=100)
    p.add_argument("--max-draws", type=_count, default=DEFAULT_MAX_DRAWS)
    p.add_argument("--rho", type=float, default=0.5)
    seed_arg(p)

    p = sub.add_parser("simulate", help="custom replication experiment on HN(xi, eta)")
    p.add_argument("--estimators", nargs="+", required=True, choices=sorted(sh.ESTIMATORS),
                   metavar="ESTIMATOR")
    p.add_argument("--xi", type=float, default=10.0)
    p.add_argument("--eta", type=_positive_float, default=4.0)
    p.add_argument("--n", type=_positive_int, nargs="+", default=[10])
    p.add_argument("--replications", type=_positive_int, default=100)
    p.add_argument("--loss", choices=sh.LOSS_KINDS, default=None)
    p.add_argument("--out", default="-", help="CSV destination ('-' for stdout)")
    seed_arg(p)
    return parser


def read_observations(path):
    """Parse one decimal observation per line; blank lines are skipped."""
    if path == "-":
        lines = sys.stdin.read().splitlines()
    else:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    values = []
    for lineno, line in enumerate(lines, start=1):
        text = line.strip()
        if not text:
            continue
        try:
            value = float(text)
        except ValueError:
            raise _InputError(f"line {lineno}: cannot parse {text!r} as a number") from None
        if value != value or value in (float("inf"), float("-inf")):
            raise _InputError(f"line {lineno}: non-finite value {text!r}")
        values.append(value)
    return values


def cmd_tables(args, seed):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for k in sorted(set(args.which)):
        cfg = sh.table_config(k, seed, args.replications)
        path = out / f"table{k}.csv"
        sh.emit_table(sh.run_experiment(cfg), path)
        print(path)
    return EXIT_OK


def cmd_estimate(args, seed):
    try:
        values = read_observations(args.input)
    except _InputError as exc:
        print(f"besimc estimate: {exc}", file=sys.stderr)
        return EXIT_USAGE
    name = args.estimator
    if name == "pitman_location" and args.eta0 is None:
        print("besimc estimate: pitman_location needs --eta0", file=sys.stderr)
        return EXIT_USAGE
    if name.endswith("_known_location") and args.xi0 is None:
        print(f"besimc estimate: {name} needs --xi0", file=sys.stderr)
        return EXIT_USAGE

    sample = Sample(values, min_size=1 if name.endswith("_known_location") or name == "pitman_location" else 2)
    stream = RandomStream(seed)
    if name == "mre_location":
        cfg = MreLocationConfig(samples_per_n=args.samples_per_n,
                                epsilon_fraction=args.epsilon_fraction, shift=args.shift)
        value, info = mre_location(sample, cfg, stream, return_details=True)
        print(_fmt(value))
        print(f"m={info['m']} epsilon={_fmt(info['epsilon'])}")
        return EXIT_OK
    params = HalfNormalParams(
        args.xi0 if args.xi0 is not None else 0.0,
        args.eta0 if args.eta0 is not None else 1.0,
    )
    print(_fmt(sh.ESTIMATORS[name].func(sample, params, stream, None)))
    return EXIT_OK


def cmd_condexp(args, seed):
    source_cls, center = _EXAMPLES[args.example]
    if args.max_draws < args.target_hits:
        print("besimc condexp: --max-draws must be at least --target-hits", file=sys.stderr)
        return EXIT_USAGE
    source = source_cls(RandomStream(seed), BivariateNormalParams(args.rho))
    est = estimate_until_hits(source, BallQuery((center,), args.epsilon),
                              args.target_hits, args.max_draws)
    print(f"value={_fmt(est.value)} hits={est.hits} draws={est.draws} epsilon={_fmt(est.epsilon)}")
    return EXIT_OK


def cmd_simulate(args, seed):
    cfg = sh.ExperimentConfig(
        experiment_id="custom",
        true_params=HalfNormalParams(args.xi, args.eta),
        sample_sizes=tuple(args.n),
        replications=args.replications,
        seed=seed,
        estimators=tuple(args.estimators),
        loss=sh.LossSpec(args.loss) if args.loss else None,
    )
    reports = sh.run_replications(cfg)
    sh.emit_table(reports, sys.stdout if args.out == "-" else args.out)
    return EXIT_OK


_COMMANDS = {
    "tables": cmd_tables,
    "estimate": cmd_estimate,
    "condexp": cmd_condexp,
    "simulate": cmd_simulate,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    seed = _resolve_seed(args, parser)
    try:
        return _COMMANDS[args.command](args, seed)
    except (Underfilled, NoHits) as exc:
        hits = getattr(exc, "hits", 0)
        print(f"besimc {args.command}: {type(exc).__name__}: {exc} (hits={hits})", file=sys.stderr)
        return EXIT_UNDERFILL
    except DomainError as exc:
        print(f"besimc {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"besimc {args.command}: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
