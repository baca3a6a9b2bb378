"""Command-line front end: ``certify``, ``scan`` and ``synthesize``.

Exit codes
----------
0   Certified / Positive / synthesis succeeded
1   Refuted / NotPositive
2   Inconclusive
3   synthesis program infeasible
64  usage or parse error (bad flags, malformed JSON)
65  data error (invalid grid, method not applicable, B(0) = 0, ...)
70  internal verification failure of a synthesized controller
"""

import argparse
import os
import sys

import numpy as np

from .certify import (DEFAULT_SAMPLES, DEFAULT_STRATEGY, Method, Step, Verdict,
                      check_exact_polynomial, check_exact_sampled, check_necessary,
                      certify, certify_corollary1, certify_theorem1)
from .exceptions import DomainError, InfeasibleError, SynthesisError
from .plantfile import PlantFileError, load_plant
from .positivity import ExPos, expos
from .rational import step_response
from .scan import ScanSpecError, load_scan_spec, run_scan, write_csv
from .synthesis import (COSTS, SynthesisProblem, sensitivity_peak, synthesis_auto_delta,
                        synthesize)

EXIT_OK, EXIT_REFUTED, EXIT_INCONCLUSIVE, EXIT_INFEASIBLE = 0, 1, 2, 3
EXIT_USAGE, EXIT_DATA, EXIT_SOFTWARE = 64, 65, 70

VERDICT_EXIT = {
    Verdict.CERTIFIED: EXIT_OK, Verdict.REFUTED: EXIT_REFUTED,
    Verdict.INCONCLUSIVE: EXIT_INCONCLUSIVE,
    ExPos.POSITIVE: EXIT_OK, ExPos.POSITIVE_SAMPLED: EXIT_OK, ExPos.NOT_POSITIVE: EXIT_REFUTED,
}
CERTIFY_METHODS = ("auto", "necessary", "theorem1", "corollary1", "exact", "polynomial", "expos")
STEP_SAMPLES = 1000


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fmt(x):
    return "%.12g" % x


def _fmt_complex(z):
    if z.imag == 0:
        return _fmt(z.real)
    return f"{_fmt(z.real)}{'+' if z.imag > 0 else '-'}{_fmt(abs(z.imag))}j"


def _fail(code, message):
    print(f"error: {message}", file=sys.stderr)
    return code


def _auto_steps(args):
    """Strategy for ``--method auto``; ``--mu``/``--delta`` pin the sufficient tests."""
    if args.mu is None and args.delta is None:
        steps = DEFAULT_STRATEGY
    else:
        mu = args.mu or 1
        steps = (Step(Method.THEOREM1, mu, args.delta), Step(Method.COROLLARY1, mu, args.delta),
                 Step(Method.EXACT_SAMPLED))
    return tuple(s._replace(t_max=args.tmax) if s.method is Method.EXACT_SAMPLED else s
                 for s in steps)


def _run_certify(tf, args):
    method = args.method
    if method == "auto":
        return certify(tf, _auto_steps(args))
    if method == "necessary":
        return check_necessary(tf)
    if method in ("theorem1", "corollary1"):
        run = certify_theorem1 if method == "theorem1" else certify_corollary1
        return run(tf, args.mu or 1, args.delta)
    if method == "exact":
        return check_exact_sampled(tf, args.tmax, DEFAULT_SAMPLES)
    if method == "polynomial":
        if args.gamma is None:
            raise DomainError("--method polynomial needs --gamma")
        return check_exact_polynomial(tf, args.gamma)
    return expos(tf)


def cmd_certify(args):
    tf = load_plant(args.plant)
    try:
        result = _run_certify(tf, args)
    except DomainError as exc:
        return _fail(EXIT_DATA, str(exc))
    print(f"verdict: {result.verdict.value}")
    print(f"method: {getattr(result.method, 'value', result.method)}")
    if getattr(result, "mu", None) is not None:
        print(f"mu: {result.mu}")
    if getattr(result, "delta", None) is not None:
        print(f"delta: {_fmt(result.delta)}")
    if result.witness is not None:
        print(f"witness: {result.witness}")
    if result.detail:
        print(f"detail: {result.detail}")
    return VERDICT_EXIT[result.verdict]


def cmd_scan(args):
    spec = load_scan_spec(args.spec)
    rows = run_scan(spec, jobs=args.jobs)
    if args.out == "-":
        write_csv(rows, sys.stdout)
    else:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            write_csv(rows, fh)
        rows_n, cols_n = spec.shape
        print(f"wrote {len(rows)} rows ({rows_n} x {cols_n} cells, "
              f"{len(spec.methods)} methods) to {args.out}")
    return EXIT_OK


def cmd_synthesize(args):
    plant = load_plant(args.plant)
    notes = []
    delta = args.delta
    try:
        if delta is None:
            delta = synthesis_auto_delta(plant, args.mu)
            notes.append(f"delta not given; auto-delta = {_fmt(delta)}")
        problem = SynthesisProblem(plant, delta, args.mu, theta=args.theta, n_r=args.nr,
                                   epsilon=args.epsilon, cost=args.cost)
        result = synthesize(problem)
    except InfeasibleError as exc:
        return _fail(EXIT_INFEASIBLE, f"infeasible: {exc}")
    except SynthesisError as exc:
        return _fail(EXIT_SOFTWARE, str(exc))
    except DomainError as exc:
        return _fail(EXIT_DATA, str(exc))

    ms = sensitivity_peak(plant, result.F, result.G)
    for note in notes:
        print(f"note: {note}")
    print(f"delta: {_fmt(problem.delta)}  mu: {problem.mu}  n_r: {problem.n_r}  "
          f"epsilon: {_fmt(problem.epsilon)}  cost: {problem.cost}")
    print("f: " + " ".join(_fmt(c) for c in result.F.padded(plant.n)))
    print("g: " + " ".join(_fmt(c) for c in result.G.padded(plant.n)))
    print(f"K_c: {_fmt(result.K_c)}")
    print("closed-loop poles: " + " ".join(_fmt_complex(p) for p in result.closed_loop_poles))
    print(f"M_s: {_fmt(ms)}")
    print(f"objective: {_fmt(result.objective)}  max violation: {result.max_violation:.3e}  "
          f"solver: {result.solver}")
    if args.out:
        slowest = min(abs(p.real) for p in result.closed_loop_poles)
        t = np.linspace(0.0, 10.0 / slowest, STEP_SAMPLES)
        y = step_response(result.closed_loop, t)
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write("t,y\n")
            for ti, yi in zip(t, y):
                fh.write(f"{_fmt(ti)},{_fmt(yi)}\n")
        print(f"step response: {args.out}")
    return EXIT_OK


def build_parser():
    parser = _Parser(prog="lcmtools", description="LCM certification, external "
                     "positivity and monotone-tracking controller synthesis.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("certify", help="certify a plant file")
    p.add_argument("plant", help="plant JSON file")
    p.add_argument("--method", choices=CERTIFY_METHODS, default="auto")
    p.add_argument("--mu", type=int, default=None)
    p.add_argument("--delta", type=float, default=None, help="shift (default: auto)")
    p.add_argument("--tmax", type=float, default=None, help="horizon of sampled checks")
    p.add_argument("--gamma", type=float, default=None, help="unit of a commensurable spectrum")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("scan", help="region scan over two pole parameters")
    p.add_argument("spec", help="scan spec JSON file")
    p.add_argument("--out", default="-", help="CSV output path ('-' for stdout)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("synthesize", help="monotone-tracking controller synthesis")
    p.add_argument("plant", help="plant JSON file")
    p.add_argument("--delta", type=float, default=None, help="shift (default: auto)")
    p.add_argument("--mu", type=int, default=1)
    p.add_argument("--nr", type=int, default=None, help="number of real closed-loop poles")
    p.add_argument("--theta", type=float, nargs="+", default=None,
                   help="angles of the shifted closed-loop poles (2n-1 values)")
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--cost", choices=COSTS, default="polezero")
    p.add_argument("--out", default=None, help="step-response CSV path")
    p.set_defaults(func=cmd_synthesize)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except PlantFileError as exc:
        return _fail(EXIT_USAGE, str(exc))
    except ScanSpecError as exc:
        return _fail(EXIT_DATA, str(exc))
    except BrokenPipeError:
        # reader went away (e.g. piped into head); silence the flush at exit
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
