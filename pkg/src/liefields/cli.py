"""Command-line front end.

Subcommands: bracket, closure, invariants, verify, flow, monodromy, mobility,
catalog verify. Exit code 0 on success/pass, 1 on check failure, 2 on usage or
parse errors. Same argv and seed give byte-identical stdout; the SEED
environment variable overrides the default seed 0."""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction

from . import algebra as A, algfile, catalog as CAT, expr as E, flows as FL, invariants as I, mobility as M
from . import fields as F


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _default_seed() -> int:
    try:
        return int(os.environ.get("SEED", "0"))
    except ValueError:
        return 0


def _parse_point(text: str):
    parts = [p.strip() for p in text.split(",")]
    return tuple(Fraction(p) for p in parts)


def _require_instantiated(X, af) -> None:
    missing = F.field_params([X])
    if missing:
        names = ", ".join(af.params[j] for j in sorted(missing))
        raise algfile.AlgebraFileError(
            f"integration needs values for the parameters: {names} (use --param)")


def _parse_param_overrides(pairs, params):
    values = {}
    for pair in pairs or []:
        if "=" not in pair:
            raise algfile.AlgebraFileError(f"--param needs name=value, got {pair!r}")
        name, value = pair.split("=", 1)
        name = name.strip()
        if name not in params:
            raise algfile.AlgebraFileError(f"unknown parameter {name!r}")
        values[params.index(name)] = Fraction(value.strip())
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="liefields")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="override the sampling seed")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=argparse.ArgumentParser)

    def add_parser(name, **kwargs):
        return sub.add_parser(name, parents=[common], **kwargs)

    b = add_parser("bracket", help="Lie bracket of two field literals")
    b.add_argument("first")
    b.add_argument("second")
    b.add_argument("--vars", default="x y z", help="space-separated variable names")

    c = add_parser("closure", help="structure constants of an algebra file")
    c.add_argument("file")

    inv = add_parser("invariants", help="count of joint invariants of s points")
    inv.add_argument("file")
    inv.add_argument("--points", type=int, default=2)
    inv.add_argument("--param", action="append", metavar="NAME=VALUE")

    v = add_parser("verify", help="verdict for a joint-invariant candidate")
    v.add_argument("file")
    v.add_argument("--invariant", required=True)
    v.add_argument("--points", type=int, default=2)
    v.add_argument("--mode", choices=["symbolic", "numeric"], default="symbolic")
    v.add_argument("--param", action="append", metavar="NAME=VALUE")

    fl = add_parser("flow", help="integrate one generator")
    fl.add_argument("file")
    fl.add_argument("--gen", type=int, required=True, help="1-based generator index")
    fl.add_argument("--from", dest="start", required=True, metavar="PT")
    fl.add_argument("--t", type=float, required=True)
    fl.add_argument("--steps", type=int, default=10000)
    fl.add_argument("--param", action="append", metavar="NAME=VALUE")
    fl.add_argument("--csv", help="write the trajectory as CSV (t, x1, ..., xn)")

    mo = add_parser("monodromy", help="first common return time of a generator combination")
    mo.add_argument("file")
    mo.add_argument("--gen-combo", required=True, metavar="c1,...,cr")
    mo.add_argument("--from", dest="start", required=True, metavar="PT")
    mo.add_argument("--t-max", type=float, default=20.0)
    mo.add_argument("--steps", type=int, default=20000)
    mo.add_argument("--tol", type=float, default=1e-6)
    mo.add_argument("--param", action="append", metavar="NAME=VALUE")

    mob = add_parser("mobility", help="free mobility in the infinitesimal")
    mob.add_argument("file")
    mob.add_argument("--param", action="append", metavar="NAME=VALUE")

    cat = add_parser("catalog", help="built-in catalog operations")
    cat.add_argument("action", choices=["verify"])
    cat.add_argument("--entry", default=None)
    cat.add_argument("--format", choices=["json", "text"], default="text")

    return parser


def run(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return 2 if err.code not in (0, None) else 0
    seed = args.seed if args.seed is not None else _default_seed()
    try:
        return _dispatch(args, seed)
    except (E.ParseError, algfile.AlgebraFileError, F.FieldError, KeyError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except (E.ExprError, I.DomainExhausted, FL.DivergenceSuspected,
            FL.NormalizationImpossible, A.NotTransitiveAtBase,
            M.UnsupportedDimension, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


def _dispatch(args, seed: int) -> int:
    if args.command == "bracket":
        vars_ = tuple(args.vars.split())
        X = F.parse_field(args.first, vars_)
        Y = F.parse_field(args.second, vars_)
        print(F.field_to_string(F.bracket(X, Y), vars_))
        return 0

    if args.command == "catalog":
        reports = CAT.verify_catalog(seed=seed, entry_id=args.entry)
        print(CAT.export_report(reports, format=args.format))
        return 0 if all(r.passed for r in reports) else 1

    af = algfile.load_algebra_file(args.file)
    L = af.presentation()
    pv = _parse_param_overrides(getattr(args, "param", None), af.params)

    if args.command == "closure":
        try:
            C = A.check_closure(L)
        except A.NotClosedError as err:
            print(f"NotClosed({err.j + 1},{err.k + 1}): residual "
                  f"{F.field_to_string(err.residual, af.vars, af.params)}")
            return 1
        for j in range(L.order):
            for k in range(j + 1, L.order):
                terms = []
                for s in range(L.order):
                    cs = C.c[j][k][s]
                    if not cs.is_zero:
                        terms.append(f"({E.to_string(cs, af.vars, af.params)})*X{s + 1}")
                rhs = " + ".join(terms) if terms else "0"
                print(f"[X{j + 1}, X{k + 1}] = {rhs}")
        if "closed" in af.expectations and af.expectations["closed"] is not True:
            print("expected not closed, observed closed")
            return 1
        return 0

    if args.command == "invariants":
        count = A.joint_invariant_count(L, args.points, seed=seed, param_values=pv or None)
        print(count)
        expect = af.expectations.get("pair_invariant_count")
        if args.points == 2 and expect is not None and expect != count:
            print(f"expected {expect}")
            return 1
        return 0

    if args.command == "verify":
        names = F.point_var_names(af.vars, args.points)
        body = E.parse_expression(args.invariant, names, af.params)
        out = I.verify_joint_invariant(L, I.InvariantCandidate(args.points, body),
                                       mode=args.mode, seed=seed, param_values=pv or None)
        print(out.verdict.value)
        if out.verdict is I.Verdict.REFUTED:
            residual = E.to_string(out.witness_residual, names, af.params)
            print(f"witness: generator {out.witness_generator + 1}, residual {residual}")
            return 1
        return 0

    if args.command == "flow":
        if not 1 <= args.gen <= L.order:
            raise algfile.AlgebraFileError(f"--gen must be in 1..{L.order}")
        X = L.generators[args.gen - 1]
        if pv:
            X = F.VectorField(X.dim, tuple(E.substitute_params(c, pv) for c in X.coeffs))
        _require_instantiated(X, af)
        start = _parse_point(args.start)
        tracked = {}
        for idx, J in enumerate(af.invariants()):
            if J.s == 1:
                tracked[f"invariant[{idx}]"] = J.body
        traj = FL.numeric_flow(X, F.Point(start), args.t, args.steps,
                               tracked=tracked or None, record=bool(args.csv))
        print("endpoint: " + ", ".join(_fmt(v) for v in traj.endpoint))
        for label in sorted(traj.drift):
            print(f"drift {label}: {_fmt(traj.drift[label])}")
        if args.csv:
            with open(args.csv, "w", encoding="utf-8") as fh:
                for t, pt in traj.samples:
                    fh.write(",".join([_fmt(t)] + [_fmt(v) for v in pt]) + "\n")
        return 0

    if args.command == "monodromy":
        weights = [Fraction(w) for w in args.gen_combo.split(",")]
        if len(weights) != L.order:
            raise algfile.AlgebraFileError(
                f"--gen-combo needs {L.order} coefficients, got {len(weights)}")
        X = F.zero_field(L.dim)
        for w, g in zip(weights, L.generators):
            if w:
                X = X + (E.const(w) * g)
        if pv:
            X = F.VectorField(X.dim, tuple(E.substitute_params(c, pv) for c in X.coeffs))
        _require_instantiated(X, af)
        start = _parse_point(args.start)
        period, diag = FL.monodromy_period(X, F.Point(start), t_max=args.t_max,
                                           tol=args.tol, steps=args.steps, seed=seed)
        if period is None:
            misses = ", ".join(_fmt(d) for _, t, d in diag[:4])
            print(f"None (min distances: {misses})")
        else:
            print(f"period {_fmt(period)}")
        return 0

    if args.command == "mobility":
        verdict = M.free_mobility_infinitesimal(L, seed=seed, param_values=pv or None)
        if verdict.free_mobility:
            print("free mobility: true")
        else:
            print(f"free mobility: false (failing stage: {verdict.failing_stage})")
        expect = af.expectations.get("free_mobility")
        if expect is not None and expect != verdict.free_mobility:
            print(f"expected {str(expect).lower()}")
            return 1
        return 0

    raise algfile.AlgebraFileError(f"unknown command {args.command!r}")


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
