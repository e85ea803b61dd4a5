"""Command-line entry point: ``ordbayes analyze | simulate | oracle``.

Exit codes: 0 success, 2 input error, 3 estimation failure.
"""

import argparse
import json
import sys

import numpy as np

from . import binomial as bn
from . import multinomial as mn
from .compare import MODEL_SET_CODES, sweep_q
from .errors import BudgetExceeded, DomainError, EstimationError, InputError
from .io import emit_report, load_table
from .simulate import SimScenario, get_scenario, run_simulation
from .tables import BinomialHyper, BinomialTable, McConfig, MultinomialHyper, TrainingSpec

EXIT_OK, EXIT_INPUT, EXIT_ESTIMATION = 0, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        sys.exit(EXIT_INPUT)


def _floats(text, what):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise InputError(f"{what}: expected comma-separated numbers, got {text!r}") from None


def _q_list(text):
    values = _floats(text, "--q")
    if not values:
        raise InputError("--q: the q grid is empty")
    return values


def _models(text):
    codes = [c.strip() for c in text.split(",") if c.strip()]
    for c in codes:
        if c not in MODEL_SET_CODES:
            raise InputError(f"--models: unknown model set {c!r}; choose from {sorted(MODEL_SET_CODES)}")
    return codes


def _binomial_hyper(r, alpha_null, alpha_enc):
    null = tuple(_floats(alpha_null, "--alpha-null")) if alpha_null else (1.0, 1.0)
    if len(null) != 2:
        raise InputError("--alpha-null takes two values A,B")
    if not alpha_enc:
        enc = np.ones((r, 2))
    else:
        vals = _floats(alpha_enc, "--alpha-enc")
        if len(vals) == 2:
            enc = np.tile(vals, (r, 1))
        elif len(vals) == 2 * r:
            enc = np.reshape(vals, (r, 2))
        else:
            raise InputError(f"--alpha-enc takes 2 or {2 * r} values for {r} rows")
    return BinomialHyper(enc, null)


def _multinomial_hyper(shape, alpha_null, alpha_enc):
    r, c = shape
    if alpha_null:
        vals = _floats(alpha_null, "--alpha-null")
        if len(vals) == 2:
            rows, cols = np.full(r, vals[0]), np.full(c, vals[1])
        elif len(vals) == r + c:
            rows, cols = np.array(vals[:r]), np.array(vals[r:])
        else:
            raise InputError(f"--alpha-null takes 2 or {r + c} values (row margin, then column margin)")
    else:
        rows, cols = np.ones(r), np.ones(c)
    if alpha_enc:
        vals = _floats(alpha_enc, "--alpha-enc")
        if len(vals) == 1:
            cells = np.full((r, c), vals[0])
        elif len(vals) == r * c:
            cells = np.reshape(vals, (r, c))
        else:
            raise InputError(f"--alpha-enc takes 1 or {r * c} values")
    else:
        cells = np.ones((r, c))
    return MultinomialHyper(cells, rows, cols)


def _mc(args):
    return McConfig(samples=args.samples, burnin=args.burnin, seed=args.seed)


def _write(args, payload: bytes):
    if args.output:
        with open(args.output, "wb") as fh:
            fh.write(payload)
    else:
        sys.stdout.buffer.write(payload)
        sys.stdout.flush()


def _load(args):
    tf = load_table(args.table, args.format, args.kind)
    table = tf.to_table()
    if isinstance(table, BinomialTable):
        hyper = _binomial_hyper(table.r, args.alpha_null, args.alpha_enc)
    else:
        hyper = _multinomial_hyper(table.shape, args.alpha_null, args.alpha_enc)
    return table, hyper


def cmd_analyze(args):
    table, hyper = _load(args)
    report = sweep_q(
        table,
        hyper,
        args.constraint,
        _q_list(args.q),
        _mc(args),
        scheme=args.scheme,
        model_sets=_models(args.models),
        workers=args.workers,
    )
    _write(args, emit_report(report, args.out))


def cmd_simulate(args):
    if args.custom:
        try:
            n_part, p_part = args.custom.split(":")
            scenario = SimScenario("custom", int(n_part), _floats(p_part, "--custom"))
        except ValueError:
            raise InputError("--custom expects N:P1,P2,... e.g. 13:0.6,0.15") from None
    else:
        scenario = get_scenario(args.scenario, args.rows)
    report = run_simulation(
        scenario,
        _mc(args),
        q_values=_q_list(args.q),
        replicates=args.replicates,
        scheme=args.scheme,
        model_sets=_models(args.models),
        workers=args.workers,
    )
    _write(args, emit_report(report, args.out))


def cmd_oracle(args):
    table, hyper = _load(args)
    if isinstance(table, BinomialTable):
        if args.t is not None:
            t = TrainingSpec.explicit(_floats(args.t, "--t")).resolve(table.n)
        else:
            t = TrainingSpec.fraction(args.q).resolve(table.n)
        default = bn.bf_default_e0(table, hyper)
        exact = bn.bf_intrinsic_e0_exact(table, hyper, t)
        t_out = [int(v) for v in t]
    else:
        if args.t is not None:
            t = TrainingSpec.explicit([int(args.t)]).resolve(table.n)
        else:
            t = TrainingSpec.fraction(args.q).resolve(table.n)
        default = mn.bf_default_e0_mult(table, hyper)
        exact = mn.bf_intrinsic_e0_mult_exact(table, hyper, int(t))
        t_out = int(t)
    doc = {"t": t_out, "bf_default_e0": default, "bf_intrinsic_e0_exact": exact}
    _write(args, (json.dumps(doc, sort_keys=True, indent=2) + "\n").encode("utf-8"))


def build_parser():
    p = _Parser(prog="ordbayes", description="Objective Bayes factors for order-constrained contingency tables.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def table_opts(sp):
        sp.add_argument("--table", required=True, help="CSV or JSON count table")
        sp.add_argument("--kind", choices=["binomial", "multinomial"], help="sampling model (required for CSV)")
        sp.add_argument("--format", choices=["csv", "json"], help="table format (default: from suffix)")
        sp.add_argument("--alpha-null", help="binomial: A,B; multinomial: row,col or r+c values")
        sp.add_argument("--alpha-enc", help="binomial: A,B or 2r values; multinomial: one value or r*c values")

    def mc_opts(sp, samples):
        sp.add_argument("--samples", type=int, default=samples, help="kept Monte Carlo draws S")
        sp.add_argument("--burnin", type=int, default=None, help="Metropolis burn-in (default S/10)")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--scheme", choices=list(bn.POSTERIOR_SCHEMES), default="algorithm")
        sp.add_argument("--models", default="0e,0c,0ce", help="comma-separated model sets")
        sp.add_argument("--workers", type=int, default=None, help="worker processes")
        sp.add_argument("--out", choices=["json", "csv", "md"], default="json")
        sp.add_argument("--output", help="write to this file instead of stdout")

    a = sub.add_parser("analyze", help="Bayes factors and model probabilities over a q grid")
    table_opts(a)
    a.add_argument("--constraint", help="e.g. 'p[1]>p[2]>p[3]' or 'cond(1,1)<cond(2,1)'")
    a.add_argument("--q", default="0,0.25,0.5,0.75,1", help="comma-separated training fractions")
    mc_opts(a, 100_000)
    a.set_defaults(func=cmd_analyze)

    s = sub.add_parser("simulate", help="simulation study under a descending order")
    grp = s.add_mutually_exclusive_group(required=True)
    grp.add_argument("--scenario", help="built-in scenario label, e.g. XL1")
    grp.add_argument("--custom", help="N:P1,P2,... trials per row and true probabilities")
    s.add_argument("--rows", type=int, choices=[2, 3], default=2, help="rows of the built-in scenario")
    s.add_argument("--replicates", type=int, default=50)
    s.add_argument("--q", default="0,0.25,0.5,0.75,1")
    mc_opts(s, 20_000)
    s.set_defaults(func=cmd_simulate)

    o = sub.add_parser("oracle", help="exact-enumeration Bayes factor")
    table_opts(o)
    o.add_argument("--q", type=float, default=0.0, help="training fraction")
    o.add_argument("--t", help="explicit training sizes (comma-separated; one total for multinomial)")
    o.add_argument("--output", help="write to this file instead of stdout")
    o.set_defaults(func=cmd_oracle)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except EstimationError as exc:
        sys.stderr.write(f"estimation failure: {exc}\n")
        return EXIT_ESTIMATION
    except (InputError, DomainError, BudgetExceeded) as exc:
        sys.stderr.write(f"input error: {exc}\n")
        return EXIT_INPUT
    except OSError as exc:
        sys.stderr.write(f"input error: {exc}\n")
        return EXIT_INPUT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
