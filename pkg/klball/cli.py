"""
Command-line front end.

    klball dstar --dist 0.7,0.3 --v 0.2
    klball balance --dist 0.7,0.2,0.1
    klball vajda --grid 0.1:1.9:0.1
    klball bounds --dist 0.7,0.2,0.1 --grid 0.05:1.95:0.05
    klball sanov --dist 0.7,0.3 --n 200 --eps 0.2 --trials 200000 --seed 1

Scalar results are printed as JSON, sweeps as CSV. Exit codes: 0 success, 2 bad input,
3 capacity exceeded, 1 internal failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from .balance import balance, balance_exact
from .binary import BinaryDistribution, kl2
from .config import Settings, load_settings, set_settings
from .distributions import DiscreteDistribution, kl_divergence, load_distribution, total_variation
from .dstar import dstar, pinsker_lower
from .errors import CapacityError, InputError, KlballError
from .sanov import SimConfig, binary_tail_exact, mcdiarmid_bound, sanov_report
from .utils import format_number, to_jsonable
from .vajda import vajda_L, vajda_by_minimization, vajda_parametric, vajda_series, vajda_t

logger = logging.getLogger("klball")

MAX_SWEEP_POINTS = 1_000_000
SWEEP_VARIABLES = ("v", "beta", "n", "epsilon")


@dataclass(frozen=True)
class SweepSpec:
    """Evenly spaced values start, start + step, ... up to and including stop."""

    variable: str
    start: float
    stop: float
    step: float
    fixed: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise InputError(f"unknown sweep variable {self.variable!r}")
        if not self.start < self.stop:
            raise InputError(f"sweep needs start < stop, got {self.start}:{self.stop}")
        if not self.step > 0:
            raise InputError(f"sweep step must be > 0, got {self.step}")
        if (self.stop - self.start) / self.step > MAX_SWEEP_POINTS:
            raise InputError(f"sweep has more than {MAX_SWEEP_POINTS} points")

    @classmethod
    def parse(cls, variable: str, text: str, **fixed) -> "SweepSpec":
        parts = text.split(":")
        if len(parts) != 3:
            raise InputError(f"sweep must be start:stop:step, got {text!r}")
        try:
            start, stop, step = (float(x) for x in parts)
        except ValueError:
            raise InputError(f"sweep must be start:stop:step, got {text!r}") from None
        return cls(variable, start, stop, step, dict(fixed))

    def values(self) -> List[float]:
        count = int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        return [self.start + i * self.step for i in range(count)]

    def integer_values(self) -> List[int]:
        return sorted(set(int(round(x)) for x in self.values()))


def _json_out(obj, settings: Settings, out) -> None:
    out.write(json.dumps(to_jsonable(obj, settings.digits), sort_keys=True, indent=2))
    out.write("\n")


def _csv_out(header: Sequence[str], rows, settings: Settings, out) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(
            [x if isinstance(x, (str, int)) and not isinstance(x, bool) else format_number(x, settings.digits) for x in row]
        )


def _dist(args) -> DiscreteDistribution:
    return load_distribution(args.dist, renormalize=args.renormalize)


def cmd_divergence(args, settings: Settings, out) -> int:
    P = load_distribution(args.p, renormalize=args.renormalize)
    Q = load_distribution(args.q, renormalize=args.renormalize)
    _json_out(
        {"tv": total_variation(P, Q, pad=args.pad), "kl": kl_divergence(P, Q, pad=args.pad)},
        settings,
        out,
    )
    return 0


def cmd_dstar(args, settings: Settings, out) -> int:
    if args.dist is None and not args.full_range:
        raise InputError("dstar needs --dist unless --full-range is given")
    Q = None if args.dist is None else _dist(args)
    result = dstar(Q, args.v, full_range=args.full_range, method=args.method, k_max=settings.k_max)
    report = result.as_dict()
    if not args.emit_extremal:
        report.pop("extremal")
    _json_out(report, settings, out)
    return 0


def cmd_balance(args, settings: Settings, out) -> int:
    Q = _dist(args)
    report = balance_exact(Q, settings.k_max) if args.exact else balance(Q, settings.k_max)
    _json_out(report.as_dict(), settings, out)
    return 0


def cmd_vajda(args, settings: Settings, out) -> int:
    if args.grid is None:
        t = vajda_t(args.v)
        point = vajda_parametric(t)
        report = {"v": args.v, "t": t, "L": point.L, "pinsker": pinsker_lower(args.v)}
        if args.check:
            report["L_by_minimization"] = vajda_by_minimization(args.v)
        _json_out(report, settings, out)
        return 0
    sweep = SweepSpec.parse("v", args.grid)
    rows = []
    for v in sweep.values():
        if not 0.0 < v < 2.0:
            raise InputError(f"vajda grid value {v} outside (0, 2)")
        rows.append((v, vajda_L(v), pinsker_lower(v), vajda_series(v)))
    _csv_out(("v", "L", "pinsker", "series"), rows, settings, out)
    return 0


def _bounds_row(Q: DiscreteDistribution, report, v: float, settings: Settings) -> List[Optional[float]]:
    ow = report.phi / 4.0 * v * v if report.phi is not None else None
    try:
        value = dstar(Q, v, k_max=settings.k_max).value
    except CapacityError:
        value = None
    beta = report.upper_bound
    upper = kl2(max(0.0, beta - v / 2.0), beta) if v < 1.0 else None
    return [v, pinsker_lower(v), ow, vajda_L(v), value, upper]


BOUNDS_HEADER = ("v", "pinsker", "ow", "vajda_L", "dstar", "thm1a_upper")


def cmd_bounds(args, settings: Settings, out) -> int:
    if (args.grid is None) == (args.beta_grid is None):
        raise InputError("bounds needs exactly one of --grid or --beta-grid")
    if args.grid is not None:
        if args.dist is None:
            raise InputError("bounds --grid needs --dist")
        Q = _dist(args)
        report = balance(Q, settings.k_max)
        sweep = SweepSpec.parse("v", args.grid)
        rows = []
        for v in sweep.values():
            if not 0.0 < v < 2.0:
                raise InputError(f"bounds grid value {v} outside (0, 2)")
            rows.append(_bounds_row(Q, report, v, settings))
        _csv_out(BOUNDS_HEADER, rows, settings, out)
        return 0

    if args.v is None:
        raise InputError("bounds --beta-grid needs --v")
    sweep = SweepSpec.parse("beta", args.beta_grid, v=args.v)
    rows = []
    for beta in sweep.values():
        if not 0.5 <= beta < 1.0:
            raise InputError(f"beta grid value {beta} outside [1/2, 1)")
        Q = DiscreteDistribution.from_weights((beta, 1.0 - beta), renormalize=True)
        rows.append([beta] + _bounds_row(Q, balance(Q, settings.k_max), args.v, settings))
    _csv_out(("beta",) + BOUNDS_HEADER, rows, settings, out)
    return 0


SANOV_HEADER = (
    "n",
    "epsilon",
    "p_hat_ge_eps",
    "ci_halfwidth",
    "p_hat_centered",
    "rate_estimate",
    "e_jn_hat",
    "dstar",
    "mcdiarmid_bound",
    "binary_tail_exact",
)


def cmd_sanov(args, settings: Settings, out) -> int:
    Q = _dist(args)
    if args.n_grid is not None and args.eps_grid is not None:
        raise InputError("use at most one of --n-grid and --eps-grid")

    if args.n_grid is None and args.eps_grid is None:
        if args.n is None or args.eps is None:
            raise InputError("sanov needs --n and --eps")
        config = SimConfig(Q, args.n, args.eps, args.trials, args.seed)
        _json_out(sanov_report(config, settings.workers), settings, out)
        return 0

    if args.n_grid is not None:
        if args.eps is None:
            raise InputError("sanov --n-grid needs --eps")
        points = [(n, args.eps) for n in SweepSpec.parse("n", args.n_grid, epsilon=args.eps).integer_values()]
    else:
        if args.n is None:
            raise InputError("sanov --eps-grid needs --n")
        points = [(args.n, eps) for eps in SweepSpec.parse("epsilon", args.eps_grid, n=args.n).values()]

    binary = Q.size == 2 and 0.0 < Q.weights[0] < 1.0
    rows = []
    for n, eps in points:
        config = SimConfig(Q, n, eps, args.trials, args.seed)
        report = sanov_report(config, settings.workers)
        est = report["estimate"]
        reference = report["dstar"]["value"] if report["dstar"] else None
        exact = binary_tail_exact(BinaryDistribution(Q.weights[0]), n, eps) if binary else None
        rows.append(
            [
                n,
                eps,
                est["p_hat_ge_eps"],
                est["ci_halfwidth"],
                est["p_hat_centered"],
                est["rate_estimate"],
                est["e_jn_hat"],
                reference,
                mcdiarmid_bound(n, eps),
                exact,
            ]
        )
    _csv_out(SANOV_HEADER, rows, settings, out)
    return 0


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="YAML settings file (default ~/.config/klball/config.yaml)")
    common.add_argument("--k-max", type=int, help="Largest support size for exact subset enumeration")
    common.add_argument("--digits", type=int, help="Significant digits in the output")
    common.add_argument("--renormalize", action="store_true", help="Rescale input weights to sum to 1")
    common.add_argument("-v", "--verbose", action="store_true", help="Debug logging on stderr")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="klball",
        description="Minimum KL divergence outside a total variation ball, and related bounds",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("divergence", parents=[common], help="Total variation and KL divergence of P and Q")
    p.add_argument("--p", required=True, help="Distribution P (weights, file, or - for stdin)")
    p.add_argument("--q", required=True, help="Distribution Q")
    p.add_argument("--pad", action="store_true", help="Zero-pad the shorter distribution")
    p.set_defaults(func=cmd_divergence)

    p = sub.add_parser("dstar", parents=[common], help="D*(v, Q)")
    p.add_argument("--dist", help="Distribution Q (weights, file, or - for stdin)")
    p.add_argument("--v", type=float, required=True, help="Total variation radius, 0 < v < 2")
    p.add_argument("--full-range", action="store_true", help="Q has full range: D* = L(v)")
    p.add_argument("--method", choices=["auto", "enumerate", "closed"], default="auto")
    p.add_argument("--emit-extremal", action="store_true", help="Include the minimizing distribution")
    p.set_defaults(func=cmd_dstar)

    p = sub.add_parser("balance", parents=[common], help="Balance coefficient beta(Q)")
    p.add_argument("--dist", required=True, help="Distribution Q")
    p.add_argument("--exact", action="store_true", help="Fail instead of falling back to the greedy bound")
    p.set_defaults(func=cmd_balance)

    p = sub.add_parser("vajda", parents=[common], help="Vajda's lower bound L(v)")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--v", type=float, help="Single value, 0 < v < 2")
    group.add_argument("--grid", help="Sweep start:stop:step (CSV output)")
    p.add_argument("--check", action="store_true", help="Also compute L(v) by direct minimization")
    p.set_defaults(func=cmd_vajda)

    p = sub.add_parser("bounds", parents=[common], help="CSV comparison of the lower and upper bounds")
    p.add_argument("--dist", help="Distribution Q for --grid")
    p.add_argument("--grid", help="Sweep over v, start:stop:step")
    p.add_argument("--beta-grid", help="Sweep over beta with Q = (beta, 1 - beta), start:stop:step")
    p.add_argument("--v", type=float, help="Fixed v for --beta-grid")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("sanov", parents=[common], help="Monte Carlo tail of the empirical TV deviation")
    p.add_argument("--dist", required=True, help="Distribution Q")
    p.add_argument("--n", type=int, help="Sample size")
    p.add_argument("--eps", type=float, help="Deviation threshold epsilon")
    p.add_argument("--trials", type=int, default=100_000, help="Monte Carlo trials (default: 100000)")
    p.add_argument("--seed", type=int, default=0, help="Random seed (default: 0)")
    p.add_argument("--workers", type=int, help="Worker threads (results do not depend on it)")
    p.add_argument("--n-grid", help="Sweep over n, start:stop:step (CSV output)")
    p.add_argument("--eps-grid", help="Sweep over epsilon, start:stop:step (CSV output)")
    p.set_defaults(func=cmd_sanov)

    return parser


def _settings_for(args) -> Settings:
    settings = load_settings(args.config)
    return settings.override(
        k_max=args.k_max,
        digits=args.digits,
        workers=getattr(args, "workers", None),
    )


def run(argv: Optional[Sequence[str]] = None, out=None) -> int:
    """Parse argv, run the subcommand and return the exit code."""
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )
    try:
        settings = _settings_for(args)
        set_settings(settings)
        logger.debug("settings: %s", settings)
        return args.func(args, settings, out)
    except KlballError as e:
        print(f"❌ {e}", file=sys.stderr)
        return e.exit_code
    finally:
        set_settings(None)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
