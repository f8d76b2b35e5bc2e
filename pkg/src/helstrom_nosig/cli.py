"""Command-line front end (``hnl``).

Exit codes: 0 success, 1 usage or argument-domain error, 2 numerical error.
Signal / no-signal verdicts are report content and never change the exit code.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from typing import Sequence

import numpy as np

from . import reports
from .bloch_core import BlochVector, canonical_geometry
from .discrimination import (
    ProjectiveDetector,
    SuperQuantumDetector,
    TwoOutcomePovm,
    optimal_detector,
    oracle_min_error,
    pe_min,
)
from .errors import HelstromLabError, IoFailure
from .signaling import (
    OPTIMAL,
    ProtocolConfig,
    alice_basis_for_bit,
    analytic_marginals,
    no_signal_test,
    run_sessions,
)
from .steering import (
    build_psi,
    decomposition_residual,
    paper_decompositions,
    primed_basis,
    reconstruction_residual,
    reduced_state_bob,
    steer,
)

SEED_ENV = "HNL_SEED"
EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}\n{self.format_usage().rstrip()}")


# -- argument helpers ------------------------------------------------------

def _theta_from_args(args) -> float:
    if args.theta is not None and args.overlap is not None:
        raise UsageError("give either --theta or --overlap, not both")
    if args.overlap is not None:
        if not (0.0 < args.overlap < 1.0):
            raise UsageError(f"--overlap must lie strictly between 0 and 1, got {args.overlap!r}")
        return math.acos(math.sqrt(args.overlap))
    if args.theta is None:
        raise UsageError("one of --theta or --overlap is required")
    if not (0.0 < args.theta < math.pi / 2):
        raise UsageError(f"--theta must lie strictly inside (0, pi/2), got {args.theta!r}")
    return args.theta


def _floats(text: str, count: int | tuple[int, ...], what: str) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"malformed {what} parameters {text!r}") from None
    counts = (count,) if isinstance(count, int) else count
    if len(vals) not in counts:
        raise UsageError(f"{what} takes {' or '.join(map(str, counts))} numbers, got {len(vals)}")
    return vals


def parse_detector(text: str, theta: float):
    """Parse ``optimal``, ``projective:x,y,z``, ``povm:t,s,x,y,z`` or ``super:EPS[,Q]``."""
    kind, _, params = text.partition(":")
    try:
        if kind == OPTIMAL and not params:
            return OPTIMAL
        if kind == "projective":
            v = np.array(_floats(params, 3, kind))
            n = np.linalg.norm(v)
            if abs(n - 1.0) > 1e-9:
                raise UsageError(f"projective axis must be a unit vector (norm {n:.6g})")
            return ProjectiveDetector(BlochVector.from_array(v / n))
        if kind == "povm":
            t, s, *v = _floats(params, 5, kind)
            if not (0 <= t <= 1 and 0 <= s <= 1) or np.linalg.norm(v) == 0:
                raise UsageError("povm weights must lie in [0, 1] and the direction be nonzero")
            n = np.array(v) / np.linalg.norm(v)
            return TwoOutcomePovm.from_weights(t, s, BlochVector.from_array(n))
        if kind == "super":
            vals = _floats(params, (1, 2), kind)
            q = vals[1] if len(vals) == 2 else 0.5
            return SuperQuantumDetector(vals[0], canonical_geometry(theta), q)
    except HelstromLabError as exc:
        raise UsageError(f"invalid detector {text!r}: {exc}") from None
    raise UsageError(f"unknown detector {text!r}; use optimal, projective:x,y,z, povm:t,s,x,y,z or super:EPS[,Q]")


def detector_label(d) -> str:
    if isinstance(d, str):
        return d
    if isinstance(d, ProjectiveDetector):
        return "projective:" + ",".join(format(c, ".17g") for c in d.axis.array)
    if isinstance(d, SuperQuantumDetector):
        return f"super:{d.epsilon:.17g},{d.q_other:.17g}"
    b = d.bias
    return "povm:offset={:.17g},bias={}".format(d.offset, ",".join(format(c, ".17g") for c in b))


def parse_range(text: str, what: str) -> list[float]:
    """``a:b:step`` inclusive of ``b`` (up to rounding)."""
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"{what} must be a:b:step, got {text!r}")
    try:
        a, b, step = (float(p) for p in parts)
    except ValueError:
        raise UsageError(f"malformed {what} {text!r}") from None
    if step <= 0:
        raise UsageError(f"{what} step must be positive")
    if b < a:
        return []
    count = int(math.floor((b - a) / step + 1e-9)) + 1
    return [a + k * step for k in range(count)]


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {env!r}") from None


def _positive(name):
    def conv(text):
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be an integer") from None
        if v < 1:
            raise argparse.ArgumentTypeError(f"{name} must be at least 1")
        return v
    return conv


# -- subcommands -----------------------------------------------------------

def cmd_bound(args):
    theta = _theta_from_args(args)
    g = canonical_geometry(theta)
    axis = optimal_detector(g).axis
    return reports.BoundReport(theta, g.overlap, pe_min(g), g.p, (axis.x, axis.y, axis.z))


def cmd_steer(args):
    theta = _theta_from_args(args)
    g = canonical_geometry(theta)
    psi = build_psi(g)
    rho = reduced_state_bob(psi)
    basis = primed_basis(g)
    d_comp, d_primed = paper_decompositions(g)
    bloch = rho.bloch
    return reports.SteerReport(
        theta=theta,
        p=g.p,
        psi=(psi.c00, psi.c01, psi.c10, psi.c11),
        rho_b_bloch=(bloch.x, bloch.y, bloch.z),
        primed_first=(basis.first.a0, basis.first.a1),
        primed_second=(basis.second.a0, basis.second.a1),
        orthonormality_defect=float(abs(np.vdot(basis.first.vector, basis.second.vector))),
        eq2_residual=reconstruction_residual(g, basis),
        residual_alpha_delta=decomposition_residual(rho, d_comp),
        residual_beta_minus_delta=decomposition_residual(rho, d_primed),
        steer_bit0_probs=steer(psi, alice_basis_for_bit(0, g)).probabilities,
        steer_bit1_probs=steer(psi, alice_basis_for_bit(1, g)).probabilities,
    )


def cmd_oracle(args):
    theta = _theta_from_args(args)
    if args.grid < 1000:
        raise UsageError("--grid must be at least 1000")
    g = canonical_geometry(theta)
    seed = _seed(args)
    res = oracle_min_error(g, args.grid, args.povms, seed)
    bound = pe_min(g)
    a = res.argmin_axis
    return reports.OracleReport(
        theta, g.overlap, bound, args.grid, args.povms, seed, res.min_error, (a.x, a.y, a.z), res.min_error - bound
    )


def _config(args, theta, detector):
    return ProtocolConfig(theta, detector, rounds=args.rounds, sessions=getattr(args, "sessions", 1), seed=_seed(args))


def cmd_simulate(args):
    theta = _theta_from_args(args)
    detector = parse_detector(args.detector, theta)
    cfg = _config(args, theta, detector)
    g = cfg.geometry
    p0, p1 = analytic_marginals(cfg.resolve_detector(), g)
    margin = min(p0 - 0.5, 0.5 - p1)
    hoeffding = math.exp(-2 * cfg.rounds * margin**2) if margin > 0 else 1.0
    records = run_sessions(cfg, workers=args.workers)
    wrong = sum(r.bob_guess != r.bit_sent for r in records)
    return reports.SimulationReport(
        theta, detector_label(detector), cfg.rounds, cfg.sessions, cfg.seed, p0, p1, hoeffding,
        wrong / len(records), sum(r.tie_broken for r in records),
    )


def cmd_nosig(args):
    theta = _theta_from_args(args)
    detector = parse_detector(args.detector, theta)
    if args.rounds < 100:
        raise UsageError("--rounds must be at least 100 for the no-signaling test")
    return no_signal_test(_config(args, theta, detector), threshold=args.threshold)


def cmd_sweep(args):
    thetas = parse_range(args.theta_range, "--theta-range")
    eps = parse_range(args.eps_range, "--eps-range") if args.eps_range else []
    if not thetas or (args.eps_range and not eps):
        raise UsageError("empty sweep range")
    if args.rounds < 100:
        raise UsageError("--rounds must be at least 100 for the no-signaling test")
    if not (0.0 <= args.q <= 1.0):
        raise UsageError("--q must lie in [0, 1]")
    seed = _seed(args)
    rows = []
    for theta in thetas:
        if not (0.0 < theta < math.pi / 2):
            raise UsageError(f"sweep theta {theta!r} outside (0, pi/2)")
        g = canonical_geometry(theta)
        bound = pe_min(g)
        cells = [(OPTIMAL, 0.0)]
        cells += [(SuperQuantumDetector(e, g, args.q), e) for e in eps if 0.0 < e <= bound]
        for det, e in cells:
            rep = no_signal_test(ProtocolConfig(theta, det, rounds=args.rounds, seed=seed), args.threshold)
            rows.append(
                reports.SweepRow(theta, g.overlap, bound, g.p, detector_label(det), e, rep.gap, rep.z_statistic, rep.verdict)
            )
    return reports.SweepReport(tuple(rows))


# -- parser ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=reports.FORMATS, default="text")
    common.add_argument("--output", help="write the report here instead of stdout")
    common.add_argument("--seed", type=int, help=f"master seed (default ${SEED_ENV} or 0)")

    angle = _Parser(add_help=False)
    angle.add_argument("--theta", type=float, help="half-angle between the Bloch vectors, radians")
    angle.add_argument("--overlap", type=float, help="|<alpha|beta>|^2, alternative to --theta")

    parser = _Parser(prog="hnl", description="Helstrom bound and no-signaling laboratory.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("bound", parents=[common, angle], help="closed-form bound and optimal axis")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("steer", parents=[common, angle], help="shared state, reduced state and both decompositions")
    p.set_defaults(func=cmd_steer)

    p = sub.add_parser("oracle", parents=[common, angle], help="brute-force minimum-error search")
    p.add_argument("--grid", type=int, default=10_000)
    p.add_argument("--povms", type=int, default=10_000)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("simulate", parents=[common, angle], help="Monte Carlo estimate of Bob's bit error")
    p.add_argument("--detector", default=OPTIMAL)
    p.add_argument("--rounds", type=_positive("--rounds"), default=2000)
    p.add_argument("--sessions", type=_positive("--sessions"), default=200)
    p.add_argument("--workers", type=_positive("--workers"), default=1)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("nosig", parents=[common, angle], help="two-proportion no-signaling test")
    p.add_argument("--detector", default=OPTIMAL)
    p.add_argument("--rounds", type=_positive("--rounds"), default=100_000)
    p.add_argument("--threshold", type=float, default=5.0)
    p.set_defaults(func=cmd_nosig)

    p = sub.add_parser("sweep", parents=[common], help="no-signaling test over theta and epsilon grids")
    p.add_argument("--theta-range", required=True, metavar="A:B:STEP")
    p.add_argument("--eps-range", metavar="A:B:STEP")
    p.add_argument("--q", type=float, default=0.5, help="super-quantum response on delta/-delta")
    p.add_argument("--rounds", type=_positive("--rounds"), default=10_000)
    p.add_argument("--threshold", type=float, default=5.0)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
        result = args.func(args)
        reports.write_report(result, args.format, args.output)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except IoFailure as exc:
        print(f"hnl: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (HelstromLabError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"hnl: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


parse_and_dispatch = main

if __name__ == "__main__":
    sys.exit(main())
